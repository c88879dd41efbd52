"""Sampled check of the growth conditions

    (F1)  f_i < M A / m   on [0,1] x [0, A]
    (F2)  f_i > N B / m   on [0,1] x [B, lam B]
    (F3)  f_i <= M C / m  on [0,1] x [0, C]
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import DerivedConstants, ProblemInstance, ThresholdSet


@dataclass(frozen=True)
class ConditionResult:
    name: str
    holds: bool
    worst_margin: float
    witness: tuple          # (t, y) of the worst sample
    worst_index: int        # which f_i (1-based) attains it
    box: tuple              # (t_lo, t_hi, y_lo, y_hi)
    per_f: tuple            # worst margin for each f_i

    def to_dict(self):
        return {"holds": self.holds, "worst_margin": self.worst_margin,
                "witness": list(self.witness), "worst_index": self.worst_index,
                "box": list(self.box), "per_f": list(self.per_f)}


@dataclass(frozen=True)
class HypothesisReport:
    f1: ConditionResult
    f2: ConditionResult
    f3: ConditionResult
    grid: int
    constants: DerivedConstants
    strict_eps: float = 0.0

    @property
    def f1_holds(self):
        return self.f1.holds

    @property
    def f2_holds(self):
        return self.f2.holds

    @property
    def f3_holds(self):
        return self.f3.holds

    @property
    def all_hold(self):
        return self.f1_holds and self.f2_holds and self.f3_holds

    @property
    def worst_margins(self):
        return {"F1": self.f1.worst_margin, "F2": self.f2.worst_margin,
                "F3": self.f3.worst_margin}

    @property
    def witnesses(self):
        return {"F1": self.f1.witness, "F2": self.f2.witness, "F3": self.f3.witness}

    def to_dict(self):
        return {
            "f1_holds": self.f1_holds, "f2_holds": self.f2_holds,
            "f3_holds": self.f3_holds,
            "worst_margins": self.worst_margins,
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
            "conditions": {"F1": self.f1.to_dict(), "F2": self.f2.to_dict(),
                           "F3": self.f3.to_dict()},
            "grid": self.grid, "strict_eps": self.strict_eps,
            "constants": self.constants.to_dict(),
        }


def _condition(name, inst, y_lo, y_hi, grid, margin_of, strict, eps):
    t = np.linspace(0.0, 1.0, grid + 1)
    y = np.linspace(y_lo, y_hi, grid + 1)
    tt, yy = np.meshgrid(t, y, indexing="ij")
    worst, witness, index, per_f = np.inf, (0.0, y_lo), 0, []
    for i, fi in enumerate(inst.f, 1):
        margins = margin_of(fi(tt, yy))
        k = np.unravel_index(int(np.argmin(margins)), margins.shape)
        per_f.append(float(margins[k]))
        if margins[k] < worst:
            worst, witness, index = float(margins[k]), (float(tt[k]), float(yy[k])), i
    holds = worst > eps if strict else worst >= 0.0
    return ConditionResult(name, bool(holds), worst, witness, index,
                           (0.0, 1.0, float(y_lo), float(y_hi)), tuple(per_f))


def check_hypotheses(inst: ProblemInstance, thr: ThresholdSet, consts: DerivedConstants,
                     grid: int = 257, strict_eps: float = 0.0) -> HypothesisReport:
    """Evaluate (F1)-(F3) on (grid+1)^2 lattices of their boxes.

    Margins are signed slacks (positive = satisfied). The strict conditions
    F1, F2 need margin > strict_eps; F3 needs margin >= 0.
    """
    m = inst.m
    M, N = consts.M, consts.N
    A, B, C, lam = thr.A, thr.B, thr.C, thr.lam
    f1 = _condition("F1", inst, 0.0, A, grid, lambda f: M * A / m - f, True, strict_eps)
    f2 = _condition("F2", inst, B, lam * B, grid, lambda f: f - N * B / m, True, strict_eps)
    f3 = _condition("F3", inst, 0.0, C, grid, lambda f: M * C / m - f, False, strict_eps)
    return HypothesisReport(f1, f2, f3, grid, consts, strict_eps)
