import pytest

from conelw.green import build_kernel
from conelw.hypotheses import check_hypotheses
from conelw.problem import DerivedConstants, ThresholdSet, derive_constants
from conftest import RAMP_F, make_instance


def consts(M, N):
    return DerivedConstants((), (), M, N, 1.0, 1.0, 1.0, 8)


def test_f1_margin():
    r = check_hypotheses(make_instance(f=("0.4",)), ThresholdSet(1, 2, 8, 2), consts(0.5, 1.0), 8)
    assert r.f1_holds and r.f1.worst_margin == pytest.approx(0.1)


def test_f2_fails_everywhere():
    r = check_hypotheses(make_instance(f=("0.4",)), ThresholdSet(1, 2, 8, 2), consts(0.5, 1.0), 8)
    assert not r.f2_holds and r.f2.worst_margin == pytest.approx(-1.6)
    t, y = r.f2.witness
    assert 0 <= t <= 1 and 2 <= y <= 4


def test_f3_equality_holds():
    # f = M C / m exactly
    r = check_hypotheses(make_instance(f=("4",)), ThresholdSet(1, 2, 8, 2), consts(0.5, 1.0), 8)
    assert r.f3_holds and r.f3.worst_margin == 0.0


def test_strict_eps_knob():
    inst = make_instance(f=("0.5",))
    r = check_hypotheses(inst, ThresholdSet(1, 2, 8, 2), consts(0.5, 1.0), 8)
    assert r.f1.worst_margin == 0.0 and not r.f1_holds
    r = check_hypotheses(make_instance(f=("0.4",)), ThresholdSet(1, 2, 8, 2),
                         consts(0.5, 1.0), 8, strict_eps=0.2)
    assert not r.f1_holds


def test_ramp_instance_all_hold(ramp_instance, ramp_thresholds):
    k = build_kernel(ramp_instance.p, 2.0)
    c = derive_constants(ramp_instance, ramp_thresholds, k)
    r = check_hypotheses(ramp_instance, ramp_thresholds, c)
    assert r.all_hold
    assert r.worst_margins["F1"] == pytest.approx(0.1)
    assert r.worst_margins["F2"] == pytest.approx(1.0)
    assert r.worst_margins["F3"] == pytest.approx(1.0)


def test_per_f_reporting():
    inst = make_instance(f=("0.1", "0.3*y"))
    r = check_hypotheses(inst, ThresholdSet(1, 2, 8, 2), consts(0.5, 1.0), 16)
    # m = 2: F1 bound is 0.25; f_2 reaches 0.3 at y = A
    assert r.f1.per_f == pytest.approx((0.15, -0.05))
    assert r.f1.worst_index == 2 and r.f1.witness[1] == 1.0


@pytest.mark.parametrize("kappa", [0.5, 0.9, 1.1, 3.0])
def test_scaling_coherence(kappa):
    base = make_instance(f=(RAMP_F,))
    scaled = make_instance(f=(f"{kappa}*({RAMP_F})",))
    thr = ThresholdSet(1, 2, 8, 2)
    c = consts(0.5, 1.0)
    r0 = check_hypotheses(base, thr, c, 32)
    r1 = check_hypotheses(scaled, thr, c, 32)
    # margin = bound - f  ->  bound - kappa f
    for name, bound in (("F1", 0.5), ("F3", 4.0)):
        f_worst = bound - r0.worst_margins[name]
        assert r1.worst_margins[name] == pytest.approx(bound - kappa * f_worst)
    assert r1.worst_margins["F2"] == pytest.approx(kappa * (r0.worst_margins["F2"] + 2) - 2)
    for name in ("F1", "F2"):
        assert getattr(r1, f"{name.lower()}_holds") == (r1.worst_margins[name] > 0)


def test_witnesses_in_box(ramp_instance, ramp_thresholds):
    r = check_hypotheses(ramp_instance, ramp_thresholds, consts(0.3, 2.0), 16)
    for cond in (r.f1, r.f2, r.f3):
        t0, t1, y0, y1 = cond.box
        t, y = cond.witness
        assert t0 <= t <= t1 and y0 <= y <= y1


def test_failure_stable_under_refinement():
    inst = make_instance(f=("0.45 + 0.1*sin(40*y)",))
    thr = ThresholdSet(1, 2, 8, 2)
    coarse = check_hypotheses(inst, thr, consts(0.5, 1.0), 16)
    fine = check_hypotheses(inst, thr, consts(0.5, 1.0), 256)
    assert not fine.f1_holds
    if not coarse.f1_holds:
        assert fine.f1.worst_margin <= coarse.f1.worst_margin


def test_report_serializes(ramp_instance, ramp_thresholds):
    import json
    r = check_hypotheses(ramp_instance, ramp_thresholds, consts(0.5, 1.0), 8)
    d = json.loads(json.dumps(r.to_dict()))
    assert d["f1_holds"] and d["grid"] == 8 and "constants" in d
