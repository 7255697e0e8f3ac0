import numpy as np
import pytest

from qgeo.errors import RegimeError, SchemaError
from qgeo.report import rows_to_csv
from qgeo.scenarios import CATALOG, config_schema, default_config, run_scenario, validate_config

FAST = ["cone", "quantization", "metric", "two-packet"]
SLOW = ["grating", "vector-ab", "scalar-ab", "non-abelian"]


@pytest.mark.parametrize("name", FAST)
def test_fast_scenarios_pass(name):
    rows = run_scenario({"scenario": name})
    assert rows and all(r.passed for r in rows), [r.quantity for r in rows if not r.passed]


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW)
def test_slow_scenarios_pass(name):
    rows = run_scenario({"scenario": name})
    assert rows and all(r.passed for r in rows), [r.quantity for r in rows if not r.passed]


def test_defaults_validate():
    for name in CATALOG:
        resolved = validate_config(default_config(name))
        assert resolved["output"]["format"] == "csv"
        assert config_schema(name)["additionalProperties"] is False


@pytest.mark.parametrize("config,path", [
    ({"scenario": "cone", "params": {"deficits": "x"}}, ("params", "deficits")),
    ({"scenario": "cone", "params": {"focus": {"l1": "a"}}}, ("params", "focus", "l1")),
    ({"scenario": "cone", "params": {"nope": 1}}, ("params",)),
    ({"scenario": "cone", "bogus": 1}, ()),
    ({"scenario": "nope"}, ("scenario",)),
    ({"scenario": "cone", "output": {"format": "xml"}}, ("output", "format")),
    ({"scenario": "cone", "workers": 0}, ("workers",)),
])
def test_schema_errors_carry_paths(config, path):
    with pytest.raises(SchemaError) as info:
        validate_config(config)
    assert info.value.path == path


def test_overrides_merge_over_defaults():
    resolved = validate_config({"scenario": "cone", "params": {"focus": {"l2": 3.0}}, "tolerances": {"length": 1e-9}})
    assert resolved["params"]["focus"] == {"l1": 1.0, "l2": 3.0}
    assert resolved["tolerances"]["length"] == 1e-9
    assert resolved["tolerances"]["dphi"] == default_config("cone")["tolerances"]["dphi"]


def test_reports_are_deterministic():
    a = rows_to_csv(run_scenario({"scenario": "cone"}))
    b = rows_to_csv(run_scenario({"scenario": "cone", "workers": 3}))
    assert a == b


def test_flat_cone_has_zero_phase_row():
    rows = run_scenario({"scenario": "cone", "params": {"deficits": [0.0]}})
    dphi = [r for r in rows if r.quantity == "dphi"]
    assert len(dphi) == 1 and dphi[0].passed and dphi[0].value == 0


def test_phase_jump_across_string():
    rows = run_scenario({"scenario": "vector-ab", "params": {"fluxes": [1.0]}})
    jumps = {r.quantity: r for r in rows if r.quantity.startswith("phase_shift@")}
    assert jumps and all(r.passed for r in jumps.values())
    same_side = jumps["phase_shift@x=-2.5"]
    crossed = jumps["phase_shift@x=2.5"]
    assert abs(same_side.value) < 1e-9
    assert abs(np.exp(1j * crossed.value) - np.exp(1j * crossed.reference)) < 1e-9
    assert abs(np.exp(1j * crossed.reference) - 1) > 0.1


def test_sweep_point_error_becomes_failing_row(monkeypatch):
    import qgeo.scenarios as sc

    real = sc.string_phase_shift

    def flaky(cone, *args):
        if cone.deficit == 0.5:
            raise RegimeError("injected")
        return real(cone, *args)

    monkeypatch.setattr(sc, "string_phase_shift", flaky)
    errors = []
    rows = run_scenario({"scenario": "cone", "params": {"deficits": [0.1, 0.5]}}, errors=errors)
    bad = [r for r in rows if r.quantity.startswith("error:")]
    assert [r.quantity for r in bad] == ["error:RegimeError"]
    assert not bad[0].passed and np.isnan(bad[0].value) and bad[0].sweep == 0.5
    assert len(errors) == 1 and all(r.passed for r in rows if r.sweep == 0.1)


def test_tighter_tolerance_can_fail():
    rows = run_scenario({"scenario": "metric", "tolerances": {"order_min": 100.0}})
    failed = [r.quantity for r in rows if not r.passed]
    assert failed and all(q.startswith("order_ratio") for q in failed)
