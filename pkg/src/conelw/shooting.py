"""Shooting on the initial value y(0) = c.

R(c) = lam*c - y(1; c) - sum_j Phi_j(tau_j, y(tau_j; c)) vanishes exactly
at solutions of the boundary value problem. The scan integrates every trial
c at once (the RK4 stages are vectorized over c), brackets sign changes, and
bisects each bracket.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curve import SolutionCurve, ode_residual, boundary_residual
from .exprs import DomainError

log = logging.getLogger(__name__)

SAFETY_FACTOR = 10.0


class BlowUpError(ArithmeticError):
    pass


class BracketError(ValueError):
    pass


def worker_count() -> int:
    """Worker cap from CONELW_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("CONELW_THREADS", "1")))
    except ValueError:
        return 1


def _rhs(inst, t, y):
    return inst.p(t, y) * y + inst.forcing(t, y)


def _rk4(inst, c, steps, upper):
    """Classical RK4 on y' = p y + sum f_i from y(0) = c (scalar or array).

    Lanes whose stage values go non-finite or leave [0, upper] are frozen and
    flagged. Returns (grid, values[steps+1, ...], ok_mask).
    """
    c = np.asarray(c, dtype=float)
    h = 1.0 / steps
    grid = np.linspace(0.0, 1.0, steps + 1)
    out = np.empty((steps + 1,) + c.shape)
    out[0] = c
    ok = np.isfinite(c) & (c >= 0) & (c <= upper)
    y = np.where(ok, c, 0.0)

    def f(t, v):
        return _rhs(inst, t, v)

    for k in range(steps):
        t = k * h
        try:
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
        except DomainError:
            # a single bad lane poisons the batch; fall back to lane-by-lane
            return _rk4_lanes(inst, c, steps, upper)
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        bad = ~np.isfinite(y_new) | (y_new < 0) | (y_new > upper)
        ok = ok & ~bad
        y = np.where(ok, y_new, y)
        out[k + 1] = y
    return grid, out, ok


def _rk4_lanes(inst, c, steps, upper):
    grid = np.linspace(0.0, 1.0, steps + 1)
    out = np.zeros((steps + 1,) + c.shape)
    ok = np.zeros(c.shape, dtype=bool)
    for idx in np.ndindex(c.shape):
        try:
            out[(slice(None),) + idx] = _rk4_scalar(inst, float(c[idx]), steps, upper)
            ok[idx] = True
        except (BlowUpError, ValueError):
            out[(slice(None),) + idx] = np.nan
    return grid, out, ok


def _rk4_scalar(inst, c, steps, upper):
    """Float-only RK4; returns the node values or raises BlowUpError."""
    h = 1.0 / steps
    p, forcing = inst.p, inst.forcing
    y = c
    out = [c]
    for k in range(steps):
        t = k * h
        tm = t + 0.5 * h
        try:
            k1 = p(t, y) * y + forcing(t, y)
            y2 = y + 0.5 * h * k1
            k2 = p(tm, y2) * y2 + forcing(tm, y2)
            y3 = y + 0.5 * h * k2
            k3 = p(tm, y3) * y3 + forcing(tm, y3)
            y4 = y + h * k3
            k4 = p(t + h, y4) * y4 + forcing(t + h, y4)
        except (DomainError, OverflowError) as exc:
            raise BlowUpError(f"IVP from c={c!r} failed at t={t!r}: {exc}") from exc
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not (0.0 <= y <= upper):
            raise BlowUpError(f"IVP from c={c!r} left [0, {upper}] near t={t + h!r}")
        out.append(y)
    return np.array(out)


def integrate_ivp(inst, c: float, steps: int = 2048, C: float | None = None) -> SolutionCurve:
    """RK4 solution of the ODE with y(0) = c on a uniform grid.

    With ``C`` given, leaving the safety box [0, 10*C] raises
    :class:`BlowUpError`; so does any non-finite stage value.
    """
    if not c >= 0:
        raise ValueError(f"initial value must be >= 0, got {c!r}")
    upper = SAFETY_FACTOR * C if C is not None else math.inf
    vals = _rk4_scalar(inst, float(c), steps, upper)
    return SolutionCurve(np.linspace(0.0, 1.0, steps + 1), vals)


def _residuals(inst, c_values, steps, upper):
    """R(c) for an array of c; NaN where the IVP blew up."""
    grid, vals, ok = _rk4(inst, c_values, steps, upper)
    lam = inst.lam
    R = lam * vals[0] - vals[-1]
    for bt in inst.boundary_terms:
        y_tau = _interp_columns(grid, vals, bt.tau)
        R = R - bt.Phi(np.full_like(y_tau, bt.tau), y_tau)
    return np.where(ok, R, np.nan)


def _interp_columns(grid, vals, tau):
    """Monotone-cubic value(s) at tau for every column of vals."""
    return PchipInterpolator(grid, vals, axis=0)(tau)


@dataclass
class ResidualProfile:
    c_grid: np.ndarray
    residuals: np.ndarray
    brackets: list = field(default_factory=list)

    @property
    def valid(self):
        return np.isfinite(self.residuals)

    def to_dict(self):
        return {"scan_points": len(self.c_grid),
                "invalid_points": int(np.sum(~self.valid)),
                "brackets": [list(b) for b in self.brackets]}


def find_brackets(c_grid, R):
    """Sign changes between consecutive valid points, plus exact zeros as
    degenerate brackets (a, a)."""
    brackets = []
    for k in range(len(c_grid)):
        if R[k] == 0.0:
            brackets.append((float(c_grid[k]), float(c_grid[k])))
        elif k + 1 < len(c_grid) and np.isfinite(R[k]) and np.isfinite(R[k + 1]) \
                and R[k] * R[k + 1] < 0:
            brackets.append((float(c_grid[k]), float(c_grid[k + 1])))
    return brackets


def scan_residual(inst, C: float, scan_points: int = 1024, steps: int = 2048) -> ResidualProfile:
    if scan_points < 2:
        raise ValueError("scan_points must be >= 2")
    c_grid = np.linspace(0.0, C, scan_points)
    upper = SAFETY_FACTOR * C
    workers = worker_count()
    if workers > 1 and scan_points >= 2 * workers:
        chunks = np.array_split(c_grid, workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ch: _residuals(inst, ch, steps, upper), chunks))
        R = np.concatenate(parts)
    else:
        R = _residuals(inst, c_grid, steps, upper)
    return ResidualProfile(c_grid, R, find_brackets(c_grid, R))


def residual_at(inst, c: float, steps: int, C: float | None = None) -> float:
    curve = integrate_ivp(inst, c, steps, C)
    return boundary_signed_residual(inst, curve)


def boundary_signed_residual(inst, curve) -> float:
    taus = [bt.tau for bt in inst.boundary_terms]
    y_tau = _interp_columns(curve.grid, curve.values, np.array(taus)) if taus else []
    return inst.lam * curve.y0 - curve.y1 - inst.boundary_sum(y_tau)


def refine_root(inst, bracket, steps: int = 2048, root_tol: float = 1e-10,
                C: float | None = None, residual=None) -> float:
    """Bisect ``bracket`` down to width <= root_tol and return the midpoint.

    ``residual`` overrides R(c) (used in tests with closed-form residuals).
    """
    a, b = float(bracket[0]), float(bracket[1])
    if a == b:
        return a
    if residual is None:
        def residual(c):
            return residual_at(inst, c, steps, C)
    try:
        ra, rb = residual(a), residual(b)
    except BlowUpError as exc:
        raise BracketError(f"bracket {bracket} invalidated: {exc}") from exc
    if ra == 0.0:
        return a
    if rb == 0.0:
        return b
    if ra * rb > 0:
        raise BracketError(f"R has the same sign at both ends of {bracket}: {ra!r}, {rb!r}")
    while b - a > root_tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        try:
            rm = residual(mid)
        except BlowUpError as exc:
            raise BracketError(f"bracket {bracket} invalidated: {exc}") from exc
        if rm == 0.0:
            return mid
        if (rm < 0) == (ra < 0):
            a, ra = mid, rm
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass
class SolveResult:
    solutions: list
    profile: ResidualProfile
    residuals: list
    rejected: list

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)


def solve_all(inst, thr, settings) -> SolveResult:
    """All residual roots on [0, C], refined and re-integrated.

    Roots closer than 10*root_tol are merged. Curves failing either residual
    check (ODE integral form, boundary condition) at ``residual_tol`` are
    listed in ``rejected`` rather than returned.
    """
    C = thr.C
    profile = scan_residual(inst, C, settings.scan_points, settings.ode_steps)
    roots = []
    for br in profile.brackets:
        try:
            roots.append(refine_root(inst, br, settings.ode_steps, settings.root_tol, C))
        except BracketError as exc:
            log.warning("dropping bracket %s: %s", br, exc)
    roots.sort()
    merged = []
    for r in roots:
        if merged and r - merged[-1] <= 10 * settings.root_tol:
            continue
        merged.append(r)

    solutions, residuals, rejected = [], [], []
    for c in merged:
        try:
            curve = integrate_ivp(inst, c, settings.ode_steps, C)
        except BlowUpError as exc:
            rejected.append({"y0": c, "reason": str(exc)})
            continue
        res = {"ode": ode_residual(inst, curve), "boundary": boundary_residual(inst, curve)}
        if res["ode"] < settings.residual_tol and res["boundary"] < settings.residual_tol:
            solutions.append(curve)
            residuals.append(res)
        else:
            rejected.append({"y0": c, "reason": "residual check failed", **res})
    return SolveResult(solutions, profile, residuals, rejected)
