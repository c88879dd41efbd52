"""Green's function of  y' - p y = h,  lam*y(0) = y(1) + b  and its boundary
weight.

For s < t the kernel is lam*exp(P(t)-P(s))/(lam - e^{P(1)}), otherwise
e^{P(1)}*exp(P(t)-P(s))/(lam - e^{P(1)}); the diagonal t == s belongs to the
second branch. The boundary weight w(t) = exp(P(t))/(lam - e^{P(1)}) is the
homogeneous solution with lam*w(0) - w(1) = 1, so that

    y(t) = int_0^1 G(t,s) h(s) ds + w(t) b

solves the problem above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exprs import Expr
from .quadrature import CumulativeCoefficient, cumulative


class InadmissibleLambda(ValueError):
    """lam is too small for the theory to apply.

    ``details`` carries whatever quantities were computed (expP1, denom, M, N,
    lambda_margin) so reports can show them.
    """

    def __init__(self, message, **details):
        self.details = details
        super().__init__(message)


@dataclass(frozen=True)
class GreensKernel:
    lam: float
    expP1: float
    denom: float
    cumulative: CumulativeCoefficient

    def P(self, t):
        return self.cumulative(t)

    def G(self, t, s):
        return G(self, t, s)

    def boundary_weight(self, t):
        return boundary_weight(self, t)


def build_kernel(p: Expr, lam: float, grid_size: int = 256, n_panels: int = 1) -> GreensKernel:
    cum = cumulative(p, grid_size, n_panels)
    expP1 = math.exp(cum.total)
    denom = lam - expP1
    if not denom > 0:
        raise InadmissibleLambda(
            f"lambda = {lam!r} must exceed exp(int_0^1 p) = {expP1!r}",
            lam=lam, expP1=expP1, denom=denom)
    return GreensKernel(float(lam), expP1, denom, cum)


def G(k: GreensKernel, t, s):
    """Kernel value(s); ``t`` and ``s`` broadcast."""
    t_arr = np.asarray(t, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    scale = np.exp(k.P(t_arr) - k.P(s_arr)) / k.denom
    out = scale * np.where(s_arr < t_arr, k.lam, k.expP1)
    return float(out) if np.ndim(out) == 0 else out


def boundary_weight(k: GreensKernel, t):
    out = np.exp(k.P(np.asarray(t, dtype=float))) / k.denom
    return float(out) if np.ndim(out) == 0 else out


def check_invariants(k: GreensKernel, samples: int = 9, eps: float = 1e-8, h: float = 1e-5):
    """Numerically check the jump, boundary-relation and ODE properties.

    Returns a dict ``name -> (max_error, tolerance, passed)``.
    """
    s = np.linspace(0.0, 1.0, samples + 2)[1:-1]

    jump = G(k, s + eps, s) - G(k, s - eps, s)
    jump_err = float(np.max(np.abs(jump - 1.0)))

    bnd_err = float(np.max(np.abs(k.lam * G(k, 0.0, s) - G(k, 1.0, s))))

    # d/dt G = p(t) G away from the diagonal
    tt, ss = np.meshgrid(s, s, indexing="ij")
    tt = tt.ravel()
    ss = ss.ravel()
    far = np.abs(tt - ss) > 10 * h
    tt, ss = tt[far], ss[far]
    dG = (G(k, tt + h, ss) - G(k, tt - h, ss)) / (2 * h)
    pG = k.cumulative.p(tt, np.zeros_like(tt)) * G(k, tt, ss)
    scale = np.maximum(np.abs(pG), np.abs(G(k, tt, ss)))
    ode_err = float(np.max(np.abs(dG - pG) / scale))

    return {
        "diagonal_jump": (jump_err, 1e-6, jump_err < 1e-6),
        "boundary_relation": (bnd_err, 1e-10, bnd_err < 1e-10),
        "ode_property": (ode_err, 1e-4, ode_err < 1e-4),
    }
