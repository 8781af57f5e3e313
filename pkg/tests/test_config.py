import json

import numpy as np
import pytest

from core.config import Command, ConfigManager, parse_config
from core.config import config_manager
from core.dgrad import DegeneracyMode, SchemeVariant
from core.errors import SchemaError
from core.integrator import JacobianMode
from core.model import Violation, ViolationKind

OSCILLATOR = {"kind": "linear_oscillator", "M": 1.0, "K": [[4.0]]}


def _schema_path(document) -> str:
    with pytest.raises(SchemaError) as info:
        parse_config(document)
    return info.value.path


def test_defaults_for_a_catalog_system():
    cfg = parse_config({"system": {"kind": "example1"}})
    assert cfg.command is Command.RUN
    assert cfg.solver.dt == 1e-3
    assert cfg.solver.rel_tol == 1e-10
    assert cfg.solver.max_iters == 50
    assert cfg.solver.jacobian is JacobianMode.FINITE_DIFFERENCE
    assert cfg.duration == 50.0
    assert cfg.t_end == 50.0
    assert cfg.scheme.variant is SchemeVariant.NEW_CONSERVATIVE
    assert cfg.scheme.degeneracy.mode is DegeneracyMode.FALLBACK
    assert cfg.scheme.degeneracy.rel_threshold == 1e-10
    # Conservative unless a case is requested
    assert not cfg.scheme.dissipation.is_active
    assert str(cfg.output) == "results/run.csv"
    assert cfg.quotient.h == 1e-3
    assert cfg.document["solver"]["dt"] == 1e-3


def test_dissipation_case_selects_the_preset():
    cfg = parse_config({"system": {"kind": "example1"}, "scheme": {"dissipation": {"case": "full"}}})
    dissipation = cfg.scheme.dissipation
    assert (dissipation.chi_f, dissipation.chi_s) == (0.0025, 0.008)
    assert dissipation.h == 1e-3
    np.testing.assert_array_equal(dissipation.D, [[16.0, -15.0], [-15.0, 16.0]])

    cfg = parse_config({"system": {"kind": "example1"}, "scheme": {"dissipation": {"case": "velocity", "chi_s": 0.01}}})
    assert (cfg.scheme.dissipation.chi_f, cfg.scheme.dissipation.chi_s) == (0.0, 0.01)


def test_overrides_and_text_input():
    document = json.dumps({"system": OSCILLATOR, "solver": {"dt": 0.1}, "duration": 1.0, "seed": 1})
    cfg = parse_config(document, output="out/x.csv", seed=9)
    assert str(cfg.output) == "out/x.csv"
    assert cfg.seed == 9
    np.testing.assert_array_equal(cfg.setup.initial.q, [1.0])


@pytest.mark.parametrize("document, path", [
    ({"system": {"kind": "example1"}, "bogus": 1}, ""),
    ({"system": {"kind": "example1"}, "solver": {"dt": -1.0}}, "solver.dt"),
    ({"system": {"kind": "example1"}, "solver": {"dt": 0.1, "extra": True}}, "solver"),
    ({"system": {"kind": "example1"}, "scheme": {"variant": "leapfrog"}}, "scheme.variant"),
    ({"system": {"kind": "example1", "q0": "far"}}, "system.q0"),
    ({"system": {"kind": "unknown"}}, "system.kind"),
    ({"system": {"kind": "example1"}, "scheme": {"variant": "g_equivariant"}}, "scheme.variant"),
    ({"system": {"kind": "example1"}, "scheme": {"metric": [[1.0, 2.0], [2.0, 1.0]]}}, "scheme.metric"),
    ({"system": {"kind": "example1"}, "scheme": {"dissipation": {"D": [[1.0]]}}}, "scheme.dissipation.D"),
    ({"system": {"kind": "example1"}, "duration": 0.0015}, "duration"),
    ({"system": OSCILLATOR, "duration": 1.0}, "solver.dt"),
    ({"system": OSCILLATOR, "solver": {"dt": 0.1}}, "duration"),
    ({"system": {"kind": "linear_oscillator", "K": 1.0}}, "system"),
    ({"system": {"kind": "spring_network", "springs": [{"i": 0}]}}, "system.springs.0"),
])
def test_schema_errors_name_the_offending_key(document, path):
    assert _schema_path(document) == path


def test_invalid_json_text():
    assert _schema_path("{not json") == ""


def test_config_manager_round_trip(tmp_path):
    source = tmp_path / "run.json"
    source.write_text(json.dumps({"system": OSCILLATOR, "solver": {"dt": 0.1}, "duration": 1.0}), encoding="utf-8")
    manager = ConfigManager(source)
    cfg = manager.parse()
    assert cfg.solver.dt == 0.1
    assert manager.get("system")["kind"] == "linear_oscillator"
    assert manager.get("seed", 5) == 5

    saved = tmp_path / "normalized.json"
    assert manager.save(saved)
    normalized = json.loads(saved.read_text(encoding="utf-8"))
    assert normalized["solver"]["rel_tol"] == 1e-10
    assert normalized["scheme"]["dissipation"]["case"] == "conservative"
    # The normalized document parses to the same run
    again = parse_config(normalized)
    assert again.solver == cfg.solver
    assert again.duration == cfg.duration


def test_config_manager_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigManager(tmp_path / "missing.json").load()
    broken = tmp_path / "broken.json"
    broken.write_text("[1, 2", encoding="utf-8")
    with pytest.raises(SchemaError):
        ConfigManager(broken).load()
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(SchemaError):
        ConfigManager(listed).load()


def test_system_is_validated_while_parsing(monkeypatch, caplog):
    document = {"system": OSCILLATOR, "solver": {"dt": 0.1}, "duration": 1.0}
    with caplog.at_level("WARNING", logger="core.config.config_manager"):
        parse_config(document)
    assert not caplog.records

    checked = []

    def flag_gradient(system):
        checked.append(system)
        return [Violation(ViolationKind.GRADIENT_MISMATCH, "gradient off by 1e-3")]

    monkeypatch.setattr(config_manager, "validate_system", flag_gradient)
    with caplog.at_level("WARNING", logger="core.config.config_manager"):
        cfg = parse_config(document)
    assert checked == [cfg.setup.system]
    assert "gradient_mismatch: gradient off by 1e-3" in caplog.text
