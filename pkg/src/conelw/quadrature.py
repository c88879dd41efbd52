"""Composite 5-point Gauss-Legendre quadrature and the cumulative coefficient
integral P(t) = int_0^t p."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprs import Expr, DomainError

DEFAULT_PANELS = 64

# 5-point Gauss-Legendre rule on [-1, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


class IntegrationError(ArithmeticError):
    pass


class InstanceValidationError(ValueError):
    pass


def _finite_or_raise(values, points):
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        x = np.broadcast_to(points, values.shape)[bad].flat[0]
        raise IntegrationError(f"integrand is not finite at x = {x!r}")
    return values


def panel_integrals(f, edges):
    """Integrate ``f`` over each panel ``[edges[k], edges[k+1]]``.

    ``f`` is called once with a 2-D array of abscissae (panels x 5) and must
    return values of the same shape.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    vals = _finite_or_raise(vals, x)
    return half * (vals @ _GL_WEIGHTS)


def integrate(f, a: float, b: float, n_panels: int = DEFAULT_PANELS) -> float:
    """Composite Gauss-Legendre (5 points per panel) approximation of
    ``int_a^b f``. ``f`` must accept numpy arrays."""
    if not a <= b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if n_panels < 1:
        raise ValueError("n_panels must be >= 1")
    if a == b:
        return 0.0
    edges = np.linspace(a, b, n_panels + 1)
    return float(np.sum(panel_integrals(f, edges)))


def _integrate_spans(f, lo, hi):
    """Vectorized single-panel GL5 over many intervals [lo_k, hi_k]."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[..., None] + half[..., None] * _GL_NODES
    vals = _finite_or_raise(np.broadcast_to(f(x), x.shape), x)
    return half * (vals @ _GL_WEIGHTS)


@dataclass(frozen=True)
class CumulativeCoefficient:
    """Tabulated P(t) = int_0^t p(eta) d eta on a uniform grid.

    Between nodes P is completed by integrating p from the nearest node on
    the left, so evaluation keeps quadrature accuracy.
    """

    nodes: np.ndarray
    values: np.ndarray
    p: Expr
    sub_panels: int = 1

    def _p(self, x):
        return self.p(x, np.zeros_like(x))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any((t_arr < 0) | (t_arr > 1)):
            raise ValueError("t must lie in [0, 1]")
        n = len(self.nodes) - 1
        k = np.clip(np.floor(t_arr * n).astype(int), 0, n - 1)
        left = self.nodes[k]
        out = self.values[k] + _integrate_spans(self._p, left, t_arr)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def total(self) -> float:
        return float(self.values[-1])


def cumulative(p: Expr, grid_size: int = 256, n_panels: int = 1) -> CumulativeCoefficient:
    """Tabulate P on ``grid_size + 1`` uniform nodes of [0, 1].

    Each grid cell is integrated with ``n_panels`` Gauss-Legendre panels.
    ``p`` must depend on ``t`` only and be nonnegative at the sample points.
    """
    if not p.free_vars <= {"t"}:
        raise InstanceValidationError(
            f"coefficient p may only depend on t, got variables {sorted(p.free_vars)}")
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    nodes = np.linspace(0.0, 1.0, grid_size + 1)

    def pf(x):
        return p(x, np.zeros_like(x))

    try:
        fine = np.linspace(0.0, 1.0, grid_size * max(n_panels, 1) * 4 + 1)
        samples = pf(fine)
    except DomainError as exc:
        raise InstanceValidationError(f"p cannot be evaluated on [0,1]: {exc}") from exc
    if np.any(samples < 0):
        k = int(np.argmax(samples < 0))
        raise InstanceValidationError(
            f"p must be nonnegative: p({fine[k]!r}) = {samples[k]!r}")
    sub = np.linspace(0.0, 1.0, grid_size * n_panels + 1)
    pieces = panel_integrals(pf, sub).reshape(grid_size, n_panels).sum(axis=1)
    values = np.concatenate([[0.0], np.cumsum(pieces)])
    return CumulativeCoefficient(nodes, values, p, n_panels)
