"""Discretized solution curves and the residual checks for the BVP."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .quadrature import panel_integrals


@dataclass(frozen=True, eq=False)
class SolutionCurve:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape or grid.ndim != 1 or len(grid) < 2:
            raise ValueError("grid and values must be 1-D arrays of equal length >= 2")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value, nodes=2049):
        grid = np.linspace(0.0, 1.0, nodes)
        return cls(grid, np.full(nodes, float(value)))

    @classmethod
    def from_function(cls, fn, nodes=2049):
        grid = np.linspace(0.0, 1.0, nodes)
        return cls(grid, np.broadcast_to(fn(grid), grid.shape))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))

    @property
    def y0(self) -> float:
        return float(self.values[0])

    @property
    def y1(self) -> float:
        return float(self.values[-1])

    def interpolant(self):
        """Shape-preserving (monotone) cubic through the nodes."""
        return PchipInterpolator(self.grid, self.values, extrapolate=False)

    def __call__(self, t):
        out = self.interpolant()(t)
        return float(out) if np.ndim(out) == 0 else out

    def is_monotone(self, tol=1e-9) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "y"])
        for t, y in zip(self.grid, self.values):
            w.writerow([f"{t:.17g}", f"{y:.17g}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1])

    def metadata(self) -> dict:
        return {"nodes": len(self.grid), "sup_norm": self.sup_norm,
                "min_value": self.min_value, "y0": self.y0, "y1": self.y1}

    def to_json(self) -> str:
        return json.dumps({**self.metadata(), "t": self.grid.tolist(),
                           "y": self.values.tolist()})


def ode_residual(inst, curve: SolutionCurve) -> float:
    """Max over nodes of |y(t_k) - y(0) - int_0^{t_k} (p y + sum f_i)|.

    This is the integral form of y' - p y - sum f_i = 0. Each grid cell is
    integrated by Gauss-Legendre with y interpolated by the monotone cubic, so
    the check stays accurate at kinks of f where a pointwise difference
    quotient would only be first order.
    """
    yi = curve.interpolant()

    def rhs(s):
        ys = yi(s)
        return inst.p(s, ys) * ys + inst.forcing(s, ys)

    cells = panel_integrals(rhs, curve.grid)
    integral = np.concatenate([[0.0], np.cumsum(cells)])
    return float(np.max(np.abs(curve.values - curve.values[0] - integral)))


def ode_residual_fd(inst, curve: SolutionCurve) -> float:
    """Pointwise residual y' - p y - sum f_i with central differences at
    interior nodes. Only second order where f is smooth."""
    t, y = curve.grid, curve.values
    dy = (y[2:] - y[:-2]) / (t[2:] - t[:-2])
    tm, ym = t[1:-1], y[1:-1]
    return float(np.max(np.abs(dy - inst.p(tm, ym) * ym - inst.forcing(tm, ym))))


def boundary_residual(inst, curve: SolutionCurve) -> float:
    """|lam y(0) - y(1) - sum_j Phi_j(tau_j, y(tau_j))|."""
    taus = [bt.tau for bt in inst.boundary_terms]
    y_tau = curve(np.array(taus)) if taus else []
    return abs(inst.lam * curve.y0 - curve.y1 - inst.boundary_sum(y_tau))
