import json

import pytest

from conelw.exprs import parse
from conelw.green import InadmissibleLambda, build_kernel
from conelw.problem import (
    InstanceError, Settings, ThresholdSet, derive_constants, grid_extremum,
    instance_from_dict, instance_hash, load_instance, validate,
)
from conftest import make_instance

THR = ThresholdSet(1.0, 2.0, 8.0, 2.0)


def test_valid_equality_envelope():
    inst = make_instance(terms=[(0.5, "y/4", "1/4", "1/4")], lam=3.0)
    assert validate(inst, ThresholdSet(1, 2, 8, 3.0), 64) == []


def test_envelope_violation_small_y():
    inst = make_instance(terms=[(0.5, "y^2", "1", "2")])
    v = validate(inst, ThresholdSet(0.25, 0.5, 2.0, 2.0), 32)
    low = [x for x in v if x.condition.startswith("y*phi")]
    assert len(low) == 1
    t, y = low[0].point
    assert 0 < y < 1 and low[0].values["Phi"] < low[0].values["y*phi"]


def test_tau_ordering_violation():
    inst = make_instance(terms=[(0.5, "y/4", "1/4", "1/4"), (0.5, "y/4", "1/4", "1/4")],
                         lam=5.0)
    v = validate(inst, ThresholdSet(1, 2, 10, 5.0), 16)
    assert [x.condition for x in v] == ["tau_1 < tau_2"]


@pytest.mark.parametrize("thr", [ThresholdSet(2, 1, 8, 2), ThresholdSet(1, 2, 3, 2),
                                 ThresholdSet(0, 2, 8, 2)])
def test_threshold_order(thr):
    v = validate(make_instance(), thr, 8)
    assert v and v[0].condition.startswith("thresholds")


def test_sign_violations():
    v = validate(make_instance(p="t - 0.5", f=("y - 1",)), THR, 16)
    names = {x.condition for x in v}
    assert {"p >= 0", "f_1 >= 0"} <= names
    v = validate(make_instance(terms=[(0.5, "0", "0", "1")]), THR, 16)
    assert "phi_1 > 0" in {x.condition for x in v}


def test_constants_p_zero_no_terms():
    inst = make_instance()
    c = derive_constants(inst, THR, build_kernel(inst.p, 2.0))
    assert abs(c.M - 0.5) < 1e-10 and abs(c.N - 1.0) < 1e-10
    assert abs(c.int_G1 - 2.0) < 1e-12 and abs(c.int_G0 - 1.0) < 1e-12
    assert c.alpha == () and c.beta == ()


def test_constants_with_boundary_term():
    inst = make_instance(terms=[(0.5, "y/4", "1/4", "1/4")])
    c = derive_constants(inst, THR, build_kernel(inst.p, 2.0))
    assert c.beta == (0.25,) and c.alpha == (0.25,)
    assert abs(c.M - 0.375) < 1e-10
    assert abs(c.N - 0.75) < 1e-10
    assert abs(c.lambda_margin - 0.75) < 1e-12


def test_inadmissible_lambda_carries_values():
    inst = make_instance(terms=[(0.5, "y/4", "1/4", "1/4")], lam=1.2)
    with pytest.raises(InadmissibleLambda) as info:
        derive_constants(inst, ThresholdSet(1, 2, 8, 1.2), build_kernel(inst.p, 1.2))
    d = info.value.details
    assert d["lambda_margin"] == pytest.approx(-0.05)
    assert d["M"] < 0 and "N" in d


def test_constants_p_one_against_closed_form():
    import math
    lam = 3 * math.e
    inst = make_instance(p="1", lam=lam)
    c = derive_constants(inst, ThresholdSet(1, 2, 8, lam), build_kernel(inst.p, lam))
    denom = lam - math.e
    # int_0^1 lam e^{1-s}/denom ds = lam (e - 1)/denom, int_0^1 e^{1-s}/denom = (e-1)/denom
    assert c.M == pytest.approx(denom / (lam * (math.e - 1)), rel=1e-12)
    assert c.N == pytest.approx(denom / (math.e - 1), rel=1e-12)


def test_extremum_refinement_is_monotone():
    psi = parse("1/4 + 0.1*sin(7.3*y + 2.1*t)")
    coarse, _ = grid_extremum(psi, 0, 8, 16, "max")
    fine, _ = grid_extremum(psi, 0, 8, 257, "max")
    assert fine >= coarse - 1e-15
    assert fine == pytest.approx(0.35, abs=1e-9)
    phi = parse("0.2 + (y - 2.37)^2 + (t - 0.41)^2")
    lo, (t, y) = grid_extremum(phi, 2, 4, 8, "min")
    assert lo == pytest.approx(0.2, abs=1e-10)
    assert t == pytest.approx(0.41, abs=1e-4) and y == pytest.approx(2.37, abs=1e-4)


def test_constants_are_deterministic():
    inst = make_instance(terms=[(0.25, "y/5 + y*sin(y)^2/10", "1/5", "3/10")], lam=4.0)
    thr = ThresholdSet(1, 2, 8, 4.0)
    k = build_kernel(inst.p, 4.0)
    assert derive_constants(inst, thr, k) == derive_constants(inst, thr, k)


# --- loading ---------------------------------------------------------------

MINIMAL = {"p": "0", "f": ["1"], "lambda": 2, "thresholds": {"A": 1, "B": 2, "C": 8}}


def _write(tmp_path, data):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


def test_load_minimal(tmp_path):
    inst, thr, s = load_instance(_write(tmp_path, MINIMAL))
    assert inst.lam == 2.0 and inst.n == 0 and inst.m == 1
    assert thr.B_dagger == 4.0
    assert s == Settings()


def test_load_settings_and_terms(tmp_path):
    data = {**MINIMAL, "boundary_terms": [{"tau": 0.5, "Phi": "y/4", "phi": "1/4",
                                           "psi": "1/4"}],
            "settings": {"grid": 33, "root_tol": 1e-8}}
    inst, thr, s = load_instance(_write(tmp_path, data))
    assert inst.boundary_terms[0].tau == 0.5
    assert s.grid == 33 and s.root_tol == 1e-8 and s.ode_steps == 2048


def test_missing_lambda(tmp_path):
    data = dict(MINIMAL)
    del data["lambda"]
    with pytest.raises(InstanceError, match="lambda"):
        load_instance(_write(tmp_path, data))


def test_parse_error_location(tmp_path):
    with pytest.raises(InstanceError, match=r"\$\.f\[0\].*byte offset 6"):
        load_instance(_write(tmp_path, {**MINIMAL, "f": ["1/(y-1"]}))


@pytest.mark.parametrize("data, where", [
    ({**MINIMAL, "lambda": "2"}, "$.lambda"),
    ({**MINIMAL, "f": []}, "$.f"),
    ({**MINIMAL, "p": "y"}, "$.p"),
    ({**MINIMAL, "thresholds": {"A": 1, "B": 2}}, "$.thresholds.C"),
    ({**MINIMAL, "settings": {"grid": 0}}, "$.settings.grid"),
    ({**MINIMAL, "settings": {"colour": 1}}, "$.settings.colour"),
    ({**MINIMAL, "extra": 1}, "$"),
    ({**MINIMAL, "boundary_terms": [{"tau": 0.5, "Phi": "y"}]}, "$.boundary_terms[0].phi"),
    ({**MINIMAL, "f": ["log(y - 1)"]}, "$.f[0]"),
])
def test_schema_errors(tmp_path, data, where):
    with pytest.raises(InstanceError) as info:
        load_instance(_write(tmp_path, data))
    assert info.value.path == where


def test_io_and_json_errors(tmp_path):
    with pytest.raises(InstanceError, match="cannot read"):
        load_instance(tmp_path / "nope.json")
    with pytest.raises(InstanceError, match="invalid JSON"):
        load_instance(_write(tmp_path, "{not json"))


def test_hash_is_stable():
    a = instance_from_dict(MINIMAL)
    b = instance_from_dict(json.loads(json.dumps(MINIMAL)))
    assert instance_hash(*a) == instance_hash(*b)
    c = instance_from_dict({**MINIMAL, "lambda": 3})
    assert instance_hash(*a) != instance_hash(*c)
