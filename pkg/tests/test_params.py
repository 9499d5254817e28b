import json
import math

import pytest

from epibehave.params import (ModelParams, baseline_params, load_params, params_from_mapping,
                              severity_margin, v_infected_value, validate)


def test_baseline_values(base):
    assert base.beta == pytest.approx(0.3 + 1 / 7)
    assert base.gamma == pytest.approx(1 / 7)
    assert base.rho == pytest.approx(0.72 / 365)
    assert base.eta == -2761.63
    assert base.s0 == pytest.approx(1 - 0.95e-4)


def test_baseline_is_valid(base):
    assert validate(base).ok
    assert validate(base, endogenous=True).ok


@pytest.mark.parametrize("change, message", [
    ({"gamma": -1.0}, "gamma must be positive"),
    ({"i0": 1.0}, "i0 must lie in (0,1)"),
    ({"i0": 0.0}, "i0 must lie in (0,1)"),
    ({"eta": 5.0}, "eta must be non-positive"),
    ({"pi_r": 1.0}, "flow payoffs must satisfy pi_s >= pi_r >= pi_i"),
    ({"beta": math.nan}, "beta must be finite"),
])
def test_validation_messages(base, change, message):
    report = validate(base.with_(**change))
    assert not report.ok
    assert message in list(report)


def test_severity_assumption(base):
    bad = base.with_(pi_i=-1.0)
    assert severity_margin(bad) < 0
    assert validate(bad).ok
    assert not validate(bad, endogenous=True).ok


def test_multiple_violations_reported(base):
    assert len(validate(base.with_(gamma=-1.0, c=0.0))) == 2


def test_v_infected_constant_flow(base):
    p = base.with_(pi_i=3.0, pi_r=3.0)
    assert v_infected_value(p) == pytest.approx(3.0 / p.rho)


def test_mapping_and_rho_pair(base):
    p = params_from_mapping({"beta": 0.5, "rho_tilde": 0.05 / 365, "lambda": 0.67 / 365})
    assert p.beta == 0.5
    assert p.rho == pytest.approx(base.rho)
    with pytest.raises(KeyError):
        params_from_mapping({"betta": 1.0})
    with pytest.raises(ValueError):
        params_from_mapping({"rho": 0.1, "lambda": 0.1, "rho_tilde": 0.1})
    with pytest.raises(ValueError):
        params_from_mapping({"lambda": 0.1})


def test_load_params(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"c": 3.0}))
    assert load_params(f).c == 3.0
    f.write_text("[1, 2]")
    with pytest.raises(ValueError):
        load_params(f)


def test_frozen():
    with pytest.raises(Exception):
        baseline_params().beta = 1.0  # type: ignore[misc]
    assert isinstance(baseline_params(), ModelParams)
