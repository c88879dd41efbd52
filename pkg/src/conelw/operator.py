"""The integral operator whose fixed points solve the BVP, and Picard
iteration on it.

    (K y)(t) = int_0^1 G(t,s) sum_i f_i(s, y(s)) ds
               + w(t) sum_j Phi_j(tau_j, y(tau_j))

Since G(t,s) = c(s<t) exp(P(t)) exp(-P(s)) / denom, the s-integral splits at
s = t into two cumulative integrals of exp(-P(s)) F(s); with t on the grid
nodes the split points are the cell edges, so no Gauss panel straddles the
kernel's jump.
"""
from __future__ import annotations

import numpy as np

from .curve import SolutionCurve
from .green import GreensKernel
from .quadrature import panel_integrals


class DivergenceError(ArithmeticError):
    pass


def apply_K(kernel: GreensKernel, inst, y: SolutionCurve) -> SolutionCurve:
    t = y.grid
    yi = y.interpolant()
    P = kernel.P

    def weighted_forcing(s):
        return np.exp(-P(s)) * inst.forcing(s, yi(s))

    cells = panel_integrals(weighted_forcing, t)
    left = np.concatenate([[0.0], np.cumsum(cells)])            # int_0^t
    right = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])  # int_t^1
    eP = np.exp(P(t))
    integral = eP * (kernel.lam * left + kernel.expP1 * right) / kernel.denom

    taus = np.array([bt.tau for bt in inst.boundary_terms])
    bsum = inst.boundary_sum(yi(taus)) if len(taus) else 0.0
    return SolutionCurve(t, integral + eP / kernel.denom * bsum)


def picard(kernel, inst, y_init: SolutionCurve, max_iter=100, tol=1e-12, bound=None):
    """Iterate y <- K y from ``y_init``.

    Returns ``(curve, converged, iterations)``. Convergence means the sup-norm
    change dropped below ``tol``; K is not contractive in general, so a False
    flag is an ordinary outcome. With ``bound`` set, leaving [0, bound] raises
    :class:`DivergenceError`.
    """
    y = y_init
    for k in range(1, max_iter + 1):
        z = apply_K(kernel, inst, y)
        if bound is not None and (np.any(z.values < 0) or np.any(z.values > bound)
                                  or not np.all(np.isfinite(z.values))):
            raise DivergenceError(
                f"Picard iterate {k} left [0, {bound}] (range "
                f"{z.min_value:.6g} .. {float(np.max(z.values)):.6g})")
        change = float(np.max(np.abs(z.values - y.values)))
        y = z
        if change < tol:
            return y, True, k
    return y, False, max_iter
