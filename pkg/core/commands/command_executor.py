"""
Command Executor - run | quotient | compare over a validated RunConfig
Every command writes a CSV, a <output>.summary.json and a plain-text summary
on standard output; expected failures become exit codes, never tracebacks
"""

import functools
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd

from core.config import Command, RunConfig
from core.constants import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_SOLVER_FAILURE
from core.dgrad import SchemeVariant
from core.diagnostics import (
    MomentaSample,
    QuotientSeries,
    ScheduledRun,
    energy_balance_residual,
    first_quotient,
    run_resolutions,
    second_quotient,
)
from core.errors import (
    DegenerateDenominatorError,
    GdrError,
    NewtonDivergedError,
    SchemaError,
    SingularJacobianError,
    SpringCollapseError,
)
from core.integrator import Trajectory, integrate, steps_between
from core.model import SystemModel
from utils.logger import get_logger
from utils.run_summary import format_summary, write_summary

logger = get_logger(__name__)

# Solver failures; every other GdrError is a configuration problem
SOLVER_ERRORS = (NewtonDivergedError, SingularJacobianError, SpringCollapseError, DegenerateDenominatorError)

CSV_FLOAT_FORMAT = "%.17g"


class CommandStatus(Enum):
    SUCCESS = "success"
    ERROR = "error"


@dataclass
class CommandResult:
    """Result of a command execution"""
    status: CommandStatus
    exit_code: int
    message: str = ""
    outputs: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    duration_ms: int = 0


def guarded(command: Callable[[RunConfig], CommandResult]) -> Callable[[RunConfig], CommandResult]:
    """Map expected failures of a command onto exit codes"""

    @functools.wraps(command)
    def wrapper(cfg: RunConfig) -> CommandResult:
        start = time.perf_counter()
        try:
            result = command(cfg)
        except SOLVER_ERRORS as e:
            logger.error(f"{command.__name__} failed: {e}")
            result = CommandResult(CommandStatus.ERROR, EXIT_SOLVER_FAILURE, str(e))
        except (SchemaError, FileNotFoundError, GdrError) as e:
            logger.error(f"{command.__name__} rejected its configuration: {e}")
            result = CommandResult(CommandStatus.ERROR, EXIT_CONFIG_ERROR, str(e))
        result.duration_ms = int((time.perf_counter() - start) * 1000)
        return result

    return wrapper


# ==================== run ====================

@guarded
def run_simulation(cfg: RunConfig) -> CommandResult:
    """Integrate once; one CSV row per record"""
    setup = cfg.setup
    system = setup.system
    logger.info(f"Running {system.name} with {cfg.scheme.variant.value} for {cfg.duration} s at dt={cfg.solver.dt}")

    trajectory = integrate(system, cfg.scheme, cfg.solver, setup.initial, cfg.t_end)
    samples = [MomentaSample.from_report(system, r) for r in trajectory.records]

    output = cfg.output
    write_csv(trajectory_frame(system, trajectory, samples), output)

    summary = {
        "command": Command.RUN.value,
        "system": system.name,
        "scheme": cfg.scheme.variant.value,
        "steps": trajectory.n_steps,
        "final": _sample_block(samples[-1]),
        "drift": _drift_block(samples, start_time=setup.initial.t),
        "newton": _newton_block(trajectory),
        "energy_balance_max": _max_balance_residual(trajectory, samples),
        "total_dissipation": trajectory.total_dissipation(),
        "degenerate_steps": trajectory.degenerate_steps,
        "stationary": _stationary_block(system, samples),
        "config": cfg.document,
    }
    summary_file = write_summary(output, summary)
    _print_summary(summary)
    logger.info(f"Run finished: {trajectory.n_steps} steps written to {output}")
    return CommandResult(CommandStatus.SUCCESS, EXIT_OK, f"{trajectory.n_steps} steps", [output, summary_file], summary)


def trajectory_frame(system: SystemModel, trajectory: Trajectory, samples: list[MomentaSample]) -> pd.DataFrame:
    """Fixed column layout: t, q*, s*, T, V, E, l_*, j_*, diss_f, diss_s, newton_iters"""
    n = system.dim
    frame = pd.DataFrame({"t": trajectory.times()})
    positions, velocities = trajectory.positions(), trajectory.velocities()
    for i in range(n):
        frame[f"q{i}"] = positions[:, i]
    for i in range(n):
        frame[f"s{i}"] = velocities[:, i]
    frame["T"] = [s.T for s in samples]
    frame["V"] = [s.V for s in samples]
    frame["E"] = [s.E for s in samples]
    for name, attr in (("l", "l"), ("j", "j")):
        values = np.array([getattr(s, attr) if getattr(s, attr) is not None else [np.nan] * 3 for s in samples])
        for axis, suffix in enumerate("xyz"):
            frame[f"{name}_{suffix}"] = values[:, axis]
    frame["diss_f"] = [r.diss_f for r in trajectory.records]
    frame["diss_s"] = [r.diss_s for r in trajectory.records]
    frame["newton_iters"] = [r.iters for r in trajectory.records]
    return frame


def write_csv(frame: pd.DataFrame, output: Path):
    """Full double precision, LF line endings, empty cells for missing values"""
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", na_rep="")
    logger.debug(f"Wrote {len(frame)} rows to {output}")


# ==================== quotient ====================

@guarded
def run_quotient(cfg: RunConfig) -> CommandResult:
    """Q_II from runs at h, h/2, h/4, plus Q_I when an exact solution exists"""
    setup = cfg.setup
    system = setup.system
    h = cfg.quotient.h
    n_steps = steps_between(setup.initial.t, cfg.t_end, h)
    times = setup.initial.t + h * np.arange(0, n_steps + 1, cfg.quotient.sample_every)

    runner = ScheduledRun(system, cfg.scheme, cfg.solver, setup.initial, cfg.t_end)
    if cfg.quotient.parallel:
        with ProcessPoolExecutor(max_workers=3) as executor:
            coarse, mid, fine = run_resolutions(runner, (h, h / 2.0, h / 4.0), executor)
    else:
        coarse, mid, fine = run_resolutions(runner, (h, h / 2.0, h / 4.0))

    frame = pd.DataFrame({"t": times})
    series = {"II": second_quotient(coarse, mid, fine, times)}
    if system.has_exact_solution:
        initial = setup.initial
        series["I"] = first_quotient(lambda t: system.exact_solution(initial, t).stacked(), coarse, mid, times)
    for label, values in series.items():
        frame[f"Q_{label}"] = values.Q
        frame[f"log2Q_{label}"] = values.log2Q
        frame[f"masked_{label}"] = values.masked.astype(int)

    output = cfg.output
    write_csv(frame, output)
    summary = {
        "command": Command.QUOTIENT.value,
        "system": system.name,
        "scheme": cfg.scheme.variant.value,
        "step_sizes": [h, h / 2.0, h / 4.0],
        "samples": int(times.size),
        **{f"Q_{label}": _quotient_block(values) for label, values in series.items()},
        "config": cfg.document,
    }
    summary_file = write_summary(output, summary)
    _print_summary(summary)
    return CommandResult(CommandStatus.SUCCESS, EXIT_OK, f"{times.size} samples", [output, summary_file], summary)


def _quotient_block(series: QuotientSeries) -> dict:
    return {
        "median_log2": series.median_log2(),
        "masked": series.n_masked,
        "mask_rate": series.mask_rate,
    }


# ==================== compare ====================

@guarded
def run_compare(cfg: RunConfig) -> CommandResult:
    """Same initial-value problem under every applicable force variant"""
    setup = cfg.setup
    system = setup.system
    variants = [SchemeVariant.MIDPOINT, SchemeVariant.AVERAGE, SchemeVariant.GONZALEZ, SchemeVariant.NEW_CONSERVATIVE]
    if system.has_symmetry:
        variants.append(SchemeVariant.G_EQUIVARIANT)

    rows = []
    failures = []
    for variant in variants:
        scheme = replace(cfg.scheme, variant=variant)
        try:
            trajectory = integrate(system, scheme, cfg.solver, setup.initial, cfg.t_end)
        except SOLVER_ERRORS as e:
            logger.error(f"{variant.value}: {e}")
            failures.append(variant.value)
            rows.append({"scheme": variant.value, "status": "failed"})
            continue

        samples = [MomentaSample.from_report(system, r) for r in trajectory.records]
        drift = _drift_block(samples, start_time=max(setup.initial.t, system.load_end_time()))
        rows.append({
            "scheme": variant.value,
            "status": "ok",
            "max_energy_drift": drift["energy"],
            "rel_energy_drift": drift["energy_relative"],
            "max_l_drift": drift.get("l", np.nan),
            "max_j_drift": drift.get("j", np.nan),
            "mean_newton_iters": trajectory.mean_iterations(),
            "total_dissipation": trajectory.total_dissipation(),
        })
        logger.info(f"{variant.value}: energy drift {drift['energy']:.3e}")

    frame = pd.DataFrame(rows)
    output = cfg.output
    write_csv(frame, output)
    summary = {
        "command": Command.COMPARE.value,
        "system": system.name,
        "schemes": {row["scheme"]: {k: v for k, v in row.items() if k != "scheme"} for row in rows},
        "config": cfg.document,
    }
    summary_file = write_summary(output, summary)
    _print_summary(summary)

    if failures:
        return CommandResult(
            CommandStatus.ERROR, EXIT_SOLVER_FAILURE, f"Failed schemes: {', '.join(failures)}",
            [output, summary_file], summary,
        )
    return CommandResult(CommandStatus.SUCCESS, EXIT_OK, f"{len(rows)} schemes", [output, summary_file], summary)


# ==================== Summary blocks ====================

def _sample_block(sample: MomentaSample) -> dict:
    block = {"t": sample.t, "E": sample.E, "T": sample.T, "V": sample.V}
    if sample.l is not None:
        block["l"] = sample.l
        block["j"] = sample.j
    return block


def _drift_block(samples: list[MomentaSample], start_time: float) -> dict:
    """Maximum deviation from the first sample at or after start_time"""
    tail = [s for s in samples if s.t >= start_time - 1e-12] or samples[-1:]
    reference = tail[0]
    energies = np.array([s.E for s in tail])
    drift = float(np.max(np.abs(energies - reference.E)))
    block = {
        "from_t": reference.t,
        "energy": drift,
        "energy_relative": drift / abs(reference.E) if reference.E != 0 else drift,
    }
    if reference.l is not None:
        block["l"] = float(max(np.linalg.norm(s.l - reference.l) for s in tail))
        block["j"] = float(max(np.linalg.norm(s.j - reference.j) for s in tail))
    return block


def _stationary_block(system: SystemModel, samples: list[MomentaSample]) -> Optional[dict]:
    """Values held once the load is gone"""
    load_end = system.load_end_time()
    if load_end <= samples[0].t:
        return None
    after = [s for s in samples if s.t >= load_end - 1e-12]
    if not after:
        return None
    block = _sample_block(after[0])
    block["drift"] = _drift_block(after, start_time=after[0].t)
    return block


def _newton_block(trajectory: Trajectory) -> dict:
    iters = trajectory.iterations()
    return {
        "mean_iters": trajectory.mean_iterations(),
        "max_iters": int(iters.max()) if iters.size else 0,
        "total_iters": int(iters.sum()),
    }


def _max_balance_residual(trajectory: Trajectory, samples: list[MomentaSample]) -> float:
    residuals = [abs(energy_balance_residual(r, prev)) for r, prev in zip(trajectory.reports, samples)]
    return max(residuals, default=0.0)


def _print_summary(summary: dict):
    sys.stdout.write(format_summary(summary) + "\n")
    sys.stdout.flush()


class CommandExecutor:
    """
    Dispatches a RunConfig to its command.
    Commands never raise for expected failures; they return a CommandResult.
    """

    def __init__(self):
        self._commands: dict[Command, Callable[[RunConfig], CommandResult]] = {}
        self.register_command(Command.RUN, run_simulation)
        self.register_command(Command.QUOTIENT, run_quotient)
        self.register_command(Command.COMPARE, run_compare)

    def register_command(self, command: Command, callback: Callable[[RunConfig], CommandResult]):
        """Register the callback of a command"""
        self._commands[command] = callback
        logger.debug(f"Registered command: {command.value}")

    def execute(self, cfg: RunConfig) -> CommandResult:
        """Run the command named in the configuration"""
        callback = self._commands.get(cfg.command)
        if callback is None:
            return CommandResult(CommandStatus.ERROR, EXIT_CONFIG_ERROR, f"Unknown command: {cfg.command}")
        result = callback(cfg)
        logger.info(f"{cfg.command.value} finished with exit code {result.exit_code} in {result.duration_ms} ms")
        return result
