"""Concave functional theta, the cone subsets P_C and P(theta, A, B), and
bucketing of solutions into the three localization classes.

theta(y) is the pointwise minimum of y. On the cone of nonnegative,
nondecreasing curves this is y(0), while the sup norm is y(1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import SolutionCurve

Y1, Y2, Y3, UNCLASSIFIED = "Y1", "Y2", "Y3", "UNCLASSIFIED"
CONE_TOL = 1e-9


class NotInConeError(ValueError):
    pass


def theta(y: SolutionCurve) -> float:
    return float(np.min(y.values))


def in_cone(y: SolutionCurve, tol: float = CONE_TOL) -> bool:
    return bool(np.all(y.values >= -tol)) and y.is_monotone(tol)


def _require_cone(y):
    if not in_cone(y):
        raise NotInConeError(
            f"curve is not nonnegative and nondecreasing (min {y.min_value:.6g}, "
            f"largest drop {float(-np.min(np.diff(y.values))):.6g})")


def in_P_C(y: SolutionCurve, C: float) -> bool:
    """||y|| < C."""
    _require_cone(y)
    return y.sup_norm < C


def in_P_theta(y: SolutionCurve, A: float, B: float) -> bool:
    """A <= theta(y) and ||y|| <= B."""
    _require_cone(y)
    return A <= theta(y) and y.sup_norm <= B


def concavity_check(theta_fn, y: SolutionCurve, z: SolutionCurve, samples=11) -> bool:
    """theta(s y + (1-s) z) >= s theta(y) + (1-s) theta(z) for s on a grid
    of [0, 1] (or the given iterable of weights)."""
    if not np.array_equal(y.grid, z.grid):
        raise ValueError("curves must share a grid")
    weights = np.linspace(0.0, 1.0, samples) if np.isscalar(samples) else samples
    ty, tz = theta_fn(y), theta_fn(z)
    for s in weights:
        mix = SolutionCurve(y.grid, s * y.values + (1 - s) * z.values)
        lhs = theta_fn(mix)
        rhs = s * ty + (1 - s) * tz
        if lhs < rhs - 1e-12 * max(1.0, abs(rhs)):
            return False
    return True


def bucket(sup_norm: float, theta_value: float, A: float, B: float) -> str:
    """First matching predicate among Y1, Y2, Y3."""
    if sup_norm < A:
        return Y1
    if theta_value > B:
        return Y2
    if sup_norm > A and theta_value < B:
        return Y3
    return UNCLASSIFIED


@dataclass(frozen=True)
class LocalizedSolution:
    sup_norm: float
    theta: float
    bucket: str

    def to_dict(self):
        return {"sup_norm": self.sup_norm, "theta": self.theta, "bucket": self.bucket}


@dataclass(frozen=True)
class LocalizationReport:
    solutions: tuple
    A: float
    B: float

    @property
    def buckets(self):
        return [s.bucket for s in self.solutions]

    @property
    def theorem_satisfied(self) -> bool:
        return {Y1, Y2, Y3} <= set(self.buckets)

    def to_dict(self):
        return {"A": self.A, "B": self.B,
                "solutions": [s.to_dict() for s in self.solutions],
                "theorem_satisfied": self.theorem_satisfied}


def classify(solutions, thr) -> LocalizationReport:
    """Bucket each solution; accepts curves or (sup_norm, theta) pairs."""
    out = []
    for s in solutions:
        if isinstance(s, SolutionCurve):
            norm, th = s.sup_norm, theta(s)
        else:
            norm, th = float(s[0]), float(s[1])
        out.append(LocalizedSolution(norm, th, bucket(norm, th, thr.A, thr.B)))
    return LocalizationReport(tuple(out), thr.A, thr.B)
