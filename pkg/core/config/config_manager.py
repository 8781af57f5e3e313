"""
Configuration Manager - Read, validate and normalize run descriptions

A run description is one JSON document:

    {
      "command": "run" | "quotient" | "compare",
      "system":   {"kind": "example1" | "example2" | "linear_oscillator" | "spring_network", ...},
      "scheme":   {"variant": ..., "dissipation": {...}, "degeneracy": {...}, "metric": [[...]]},
      "solver":   {"dt": ..., "rel_tol": ..., "max_iters": ..., "jacobian": ...},
      "duration": seconds,
      "output":   "results/run.csv",
      "quotient": {"h": ..., "parallel": false, "sample_every": 1},
      "seed":     integer
    }

Unknown keys are rejected everywhere. Missing dt / duration fall back to the
canonical run of the chosen system when it has one.
"""

import copy
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from core.constants import DEFAULT_DEGENERACY_THRESHOLD, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL
from core.dgrad import (
    DegeneracyPolicy,
    DissipationCase,
    DissipationConfig,
    ForceScheme,
    SchemeVariant,
)
from core.errors import GdrError, SchemaError
from core.integrator import JacobianMode, SolverConfig, steps_between
from core.linalg import as_symmat
from core.model import validate_system
from core.systems import SystemSetup, get_registry
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_OUTPUT = "results/run.csv"


class Command(Enum):
    RUN = "run"
    QUOTIENT = "quotient"
    COMPARE = "compare"


# ==================== Schema ====================

_NUMBER = {"type": "number"}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}
_VEC3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}
_MATRIX_OR_SCALAR = {"anyOf": [_NUMBER, _MATRIX]}


def _closed(properties: dict, required: Optional[list] = None) -> dict:
    """Object schema that rejects unknown keys"""
    schema = {"type": "object", "properties": properties, "additionalProperties": False}
    if required:
        schema["required"] = required
    return schema


RUN_SCHEMA = _closed(
    {
        "command": {"enum": [c.value for c in Command]},
        # The system block is checked against its kind-specific schema afterwards
        "system": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"type": "string"}},
        },
        "scheme": _closed({
            "variant": {"enum": [v.value for v in SchemeVariant]},
            "dissipation": _closed({
                "case": {"enum": [c.value for c in DissipationCase]},
                "chi_f": {"type": "number", "minimum": 0},
                "chi_s": {"type": "number", "minimum": 0},
                "D": _MATRIX_OR_SCALAR,
                "D_invariant": _MATRIX_OR_SCALAR,
            }),
            "degeneracy": _closed({
                "rel_threshold": {"type": "number", "exclusiveMinimum": 0},
                "mode": {"enum": ["fallback", "strict"]},
            }),
            "metric": _MATRIX_OR_SCALAR,
        }),
        "solver": _closed({
            "dt": {"type": "number", "exclusiveMinimum": 0},
            "rel_tol": {"type": "number", "exclusiveMinimum": 0},
            "max_iters": {"type": "integer", "minimum": 1},
            "jacobian": {"enum": [j.value for j in JacobianMode]},
        }),
        "duration": {"type": "number", "minimum": 0},
        "output": {"type": "string", "minLength": 1},
        "quotient": _closed({
            "h": {"type": "number", "exclusiveMinimum": 0},
            "parallel": {"type": "boolean"},
            "sample_every": {"type": "integer", "minimum": 1},
        }),
        "seed": {"type": "integer"},
    },
    required=["system"],
)

_INITIAL = {"q0": _VECTOR, "s0": _VECTOR}

SYSTEM_SCHEMAS = {
    "example1": _closed({"kind": {"const": "example1"}, **_INITIAL}),
    "example2": _closed({
        "kind": {"const": "example2"},
        "vn_scale": {"type": "number", "minimum": 0},
        **_INITIAL,
    }),
    "linear_oscillator": _closed(
        {"kind": {"const": "linear_oscillator"}, "M": _MATRIX_OR_SCALAR, "K": _MATRIX_OR_SCALAR, **_INITIAL},
        required=["M", "K"],
    ),
    "spring_network": _closed({
        "kind": {"const": "spring_network"},
        "n_particles": {"type": "integer", "minimum": 2},
        "topology": {"anyOf": [
            {"enum": ["cube", "chain"]},
            {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
        ]},
        "stiffness": {"type": "number", "minimum": 0},
        "mass": {"type": "number", "exclusiveMinimum": 0},
        "particles": {"type": "array", "minItems": 1, "items": _closed(
            {"position": _VEC3, "velocity": _VEC3, "mass": {"type": "number", "exclusiveMinimum": 0}},
            required=["position"],
        )},
        "springs": {"type": "array", "items": _closed(
            {
                "i": {"type": "integer"},
                "j": {"type": "integer"},
                "stiffness": {"type": "number", "minimum": 0},
                "rest_length": {"type": "number", "minimum": 0},
            },
            required=["i", "j"],
        )},
        "load": {"anyOf": [
            {"type": "null"},
            _closed(
                {
                    "base_force": _VECTOR,
                    "breakpoints": {"type": "array", "items": {
                        "type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2,
                    }},
                },
                required=["base_force"],
            ),
        ]},
        "spin": _VEC3,
        "velocity_noise": {"type": "number", "minimum": 0},
    }),
}


# ==================== Typed configuration ====================

@dataclass(frozen=True)
class QuotientConfig:
    """Coarsest step size of a quotient study and how its runs are executed"""
    h: float
    parallel: bool = False
    sample_every: int = 1


@dataclass
class RunConfig:
    """Validated run description with defaults applied"""
    command: Command
    system: dict
    setup: SystemSetup
    scheme: ForceScheme
    solver: SolverConfig
    duration: float
    output: Path
    quotient: QuotientConfig
    seed: Optional[int] = None
    # Normalized document, written next to the outputs
    document: dict = field(default_factory=dict)

    @property
    def t_end(self) -> float:
        return self.setup.initial.t + self.duration


def parse_config(
    text: Union[str, dict],
    output: Optional[str] = None,
    seed: Optional[int] = None,
) -> RunConfig:
    """
    Validate a run description and build its typed configuration.

    Args:
        text: JSON text or an already decoded document
        output: Overrides the document's output path
        seed: Overrides the document's seed

    Raises:
        SchemaError: with the JSON path of the offending key
    """
    if isinstance(text, str):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError("", f"Invalid JSON: {e}") from e
    else:
        document = copy.deepcopy(text)

    _validate(document, RUN_SCHEMA, [])
    system_block = document["system"]
    kind = system_block["kind"]
    if kind not in SYSTEM_SCHEMAS or get_registry().get_system(kind) is None:
        raise SchemaError.at(["system", "kind"], f"Unknown system kind '{kind}'")
    _validate(system_block, SYSTEM_SCHEMAS[kind], ["system"])

    if output is not None:
        document["output"] = output
    if seed is not None:
        document["seed"] = seed

    try:
        setup = get_registry().build(system_block, seed=document.get("seed"))
    except (GdrError, ValueError, KeyError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError("system", str(e)) from e

    # Violations are logged; the run proceeds
    for violation in validate_system(setup.system):
        logger.warning(f"{kind}: {violation.kind.value}: {violation.message}")

    solver = _solver(document, setup)
    duration = _duration(document, setup, solver)
    scheme = _scheme(document, setup, solver)

    quotient_block = document.setdefault("quotient", {})
    quotient_block.setdefault("h", solver.dt)
    quotient_block.setdefault("parallel", False)
    quotient_block.setdefault("sample_every", 1)
    document.setdefault("command", Command.RUN.value)
    document.setdefault("output", DEFAULT_OUTPUT)

    config = RunConfig(
        command=Command(document["command"]),
        system=system_block,
        setup=setup,
        scheme=scheme,
        solver=solver,
        duration=duration,
        output=Path(document["output"]),
        quotient=QuotientConfig(**quotient_block),
        seed=document.get("seed"),
        document=document,
    )
    logger.debug(f"Parsed {config.command.value} config for {kind}: {scheme.variant.value}, dt={solver.dt}")
    return config


def _validate(document: Any, schema: dict, prefix: list):
    error = best_match(Draft7Validator(schema).iter_errors(document))
    if error is not None:
        raise SchemaError.at(prefix + list(error.absolute_path), error.message)


def _solver(document: dict, setup: SystemSetup) -> SolverConfig:
    block = document.setdefault("solver", {})
    if "dt" not in block:
        if setup.solver is None:
            raise SchemaError.at(["solver", "dt"], "required for this system")
        block["dt"] = setup.solver.dt
    block.setdefault("rel_tol", DEFAULT_REL_TOL)
    block.setdefault("max_iters", DEFAULT_MAX_ITERS)
    block.setdefault("jacobian", JacobianMode.FINITE_DIFFERENCE.value)
    return SolverConfig(
        dt=block["dt"],
        rel_tol=block["rel_tol"],
        max_iters=block["max_iters"],
        jacobian=JacobianMode(block["jacobian"]),
    )


def _duration(document: dict, setup: SystemSetup, solver: SolverConfig) -> float:
    if "duration" not in document:
        if setup.duration is None:
            raise SchemaError.at(["duration"], "required for this system")
        document["duration"] = setup.duration
    duration = float(document["duration"])
    try:
        steps_between(0.0, duration, solver.dt)
    except GdrError as e:
        raise SchemaError.at(["duration"], str(e)) from e
    return duration


def _scheme(document: dict, setup: SystemSetup, solver: SolverConfig) -> ForceScheme:
    block = document.setdefault("scheme", {})
    block.setdefault("variant", SchemeVariant.NEW_CONSERVATIVE.value)

    diss = block.setdefault("dissipation", {})
    preset = setup.dissipation
    selected = DissipationCase(diss.setdefault("case", DissipationCase.CONSERVATIVE.value)).apply(preset)
    diss.setdefault("chi_f", selected.chi_f)
    diss.setdefault("chi_s", selected.chi_s)

    degeneracy = block.setdefault("degeneracy", {})
    degeneracy.setdefault("rel_threshold", DEFAULT_DEGENERACY_THRESHOLD)
    degeneracy.setdefault("mode", "fallback")

    try:
        dissipation = DissipationConfig(
            chi_f=diss["chi_f"],
            chi_s=diss["chi_s"],
            D=_matrix(diss["D"]) if "D" in diss else preset.D,
            h=solver.dt,
            D_invariant=_matrix(diss["D_invariant"]) if "D_invariant" in diss else None,
        )
    except (GdrError, ValueError) as e:
        raise SchemaError.at(["scheme", "dissipation"], str(e)) from e
    if dissipation.D is not None and dissipation.D.shape[0] != setup.system.dim:
        raise SchemaError.at(["scheme", "dissipation", "D"], f"must be {setup.system.dim}x{setup.system.dim}")

    metric = None
    if "metric" in block:
        try:
            metric = as_symmat(_matrix(block["metric"]), dim=setup.system.dim, require_spd=True)
        except (GdrError, ValueError) as e:
            raise SchemaError.at(["scheme", "metric"], str(e)) from e

    scheme = ForceScheme(
        variant=SchemeVariant(block["variant"]),
        dissipation=dissipation,
        degeneracy=DegeneracyPolicy(degeneracy["rel_threshold"], degeneracy["mode"]),
        metric=metric,
    )
    if scheme.requires_symmetry and not setup.system.has_symmetry:
        raise SchemaError.at(["scheme", "variant"], f"{scheme.variant.value} needs a system with invariants")
    return scheme


def _matrix(value) -> Any:
    # Scalars describe 1x1 matrices
    return [[value]] if isinstance(value, (int, float)) else value


class ConfigManager:
    """
    Loads one run description from disk.
    Provides the validated RunConfig and writes the normalized document back.
    """

    def __init__(self, config_path: Path):
        self.config_path = Path(config_path)
        self._config: dict = {}
        self._run_config: Optional[RunConfig] = None

    def load(self) -> dict:
        """
        Load the raw document.

        Raises:
            FileNotFoundError: if the file does not exist
            SchemaError: if the file is not valid JSON
        """
        if not self.config_path.exists():
            logger.error(f"Config file not found: {self.config_path}")
            raise FileNotFoundError(self.config_path)
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                self._config = json.load(f)
        except json.JSONDecodeError as e:
            logger.error(f"Invalid JSON in config file: {e}")
            raise SchemaError("", f"Invalid JSON: {e}") from e
        if not isinstance(self._config, dict):
            raise SchemaError("", "run description must be a JSON object")
        logger.info(f"Configuration loaded from {self.config_path}")
        return self._config

    def parse(self, output: Optional[str] = None, seed: Optional[int] = None) -> RunConfig:
        """Validate the loaded document; loads it first if needed"""
        if not self._config:
            self.load()
        self._run_config = parse_config(self._config, output=output, seed=seed)
        return self._run_config

    def save(self, path: Path) -> bool:
        """Save the normalized configuration (defaults applied)"""
        document = self._run_config.document if self._run_config is not None else self._config
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(document, f, indent=4, ensure_ascii=False)
            logger.info(f"Configuration saved to {path}")
            return True
        except OSError as e:
            logger.error(f"Failed to save configuration: {e}")
            return False

    def get(self, key: str, default: Any = None) -> Any:
        """Get a raw configuration value by key"""
        return self._config.get(key, default)

    def set(self, key: str, value: Any):
        """Set a raw configuration value; takes effect on the next parse()"""
        self._config[key] = value
        self._run_config = None
