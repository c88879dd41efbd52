"""Problem instances: data, validation, derived constants and JSON loading."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .exprs import Expr, ExprError, DomainError, parse
from .green import GreensKernel, InadmissibleLambda
from .quadrature import integrate, DEFAULT_PANELS


class InstanceError(ValueError):
    """Malformed instance file or instance data."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class BoundaryTerm:
    tau: float
    Phi: Expr
    phi_lower: Expr
    psi_upper: Expr


@dataclass(frozen=True)
class ProblemInstance:
    p: Expr
    f: tuple
    boundary_terms: tuple
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        object.__setattr__(self, "boundary_terms", tuple(self.boundary_terms))

    @property
    def m(self):
        return len(self.f)

    @property
    def n(self):
        return len(self.boundary_terms)

    def forcing(self, t, y):
        """Sum of the f_i at (t, y)."""
        total = self.f[0](t, y)
        for fi in self.f[1:]:
            total = total + fi(t, y)
        return total

    def boundary_sum(self, y_at_tau):
        """Sum of Phi_j(tau_j, y(tau_j)) given the values y(tau_j)."""
        return float(sum(bt.Phi(bt.tau, float(v))
                         for bt, v in zip(self.boundary_terms, y_at_tau)))

    def to_dict(self):
        return {
            "p": self.p.source,
            "f": [fi.source for fi in self.f],
            "lambda": self.lam,
            "boundary_terms": [
                {"tau": bt.tau, "Phi": bt.Phi.source, "phi": bt.phi_lower.source,
                 "psi": bt.psi_upper.source}
                for bt in self.boundary_terms
            ],
        }


@dataclass(frozen=True)
class ThresholdSet:
    A: float
    B: float
    C: float
    lam: float

    @property
    def B_dagger(self):
        return self.lam * self.B

    def to_dict(self):
        return {"A": self.A, "B": self.B, "C": self.C, "B_dagger": self.B_dagger}


@dataclass(frozen=True)
class Settings:
    grid: int = 257
    quad_panels: int = DEFAULT_PANELS
    ode_steps: int = 2048
    scan_points: int = 1024
    root_tol: float = 1e-10
    residual_tol: float = 1e-6
    strict_eps: float = 0.0

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return Settings(**{**asdict(self), **changes})


@dataclass(frozen=True)
class DerivedConstants:
    alpha: tuple
    beta: tuple
    M: float
    N: float
    lambda_margin: float
    int_G1: float
    int_G0: float
    grid: int

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in asdict(self).items()}


@dataclass(frozen=True)
class Violation:
    condition: str
    point: tuple
    values: dict

    def __str__(self):
        vals = ", ".join(f"{k}={v!r}" for k, v in self.values.items())
        return f"{self.condition} at {self.point}: {vals}"

    def to_dict(self):
        return {"condition": self.condition, "point": list(self.point),
                "values": self.values}


# --- validation --------------------------------------------------------------

def _lattice(y_lo, y_hi, grid):
    t = np.linspace(0.0, 1.0, grid + 1)
    y = np.linspace(y_lo, y_hi, grid + 1)
    return np.meshgrid(t, y, indexing="ij")


def _first(mask, tt, yy):
    k = np.unravel_index(int(np.argmax(mask)), mask.shape)
    return k, (float(tt[k]), float(yy[k]))


def validate(inst: ProblemInstance, thr: ThresholdSet, grid: int = 257) -> list:
    """Sample the standing hypotheses on a (grid+1)^2 lattice of [0,1]x[0,C].

    Returns a list of :class:`Violation`; empty means everything holds at
    this resolution.
    """
    out = []
    if not 0 < thr.A < thr.B < thr.lam * thr.B <= thr.C:
        out.append(Violation("thresholds 0 < A < B < lam*B <= C", (),
                             {"A": thr.A, "B": thr.B, "lam*B": thr.lam * thr.B,
                              "C": thr.C}))
    if inst.m < 1:
        out.append(Violation("at least one f_i", (), {"m": inst.m}))
    taus = [bt.tau for bt in inst.boundary_terms]
    for j, tau in enumerate(taus):
        if not 0.0 <= tau <= 1.0:
            out.append(Violation(f"tau_{j + 1} in [0,1]", (), {"tau": tau}))
    for j in range(len(taus) - 1):
        if not taus[j] < taus[j + 1]:
            out.append(Violation(f"tau_{j + 1} < tau_{j + 2}", (),
                                 {"tau_j": taus[j], "tau_j+1": taus[j + 1]}))

    C = thr.C if thr.C > 0 else 1.0
    tt, yy = _lattice(0.0, C, grid)

    def sample(name, e):
        try:
            return e(tt, yy)
        except DomainError as exc:
            out.append(Violation(f"{name} evaluable", (), {"error": str(exc)}))
            return None

    pv = sample("p", inst.p)
    if pv is not None and np.any(pv < 0):
        k, pt = _first(pv < 0, tt, yy)
        out.append(Violation("p >= 0", (pt[0],), {"p": float(pv[k])}))
    for i, fi in enumerate(inst.f, 1):
        fv = sample(f"f_{i}", fi)
        if fv is not None and np.any(fv < 0):
            k, pt = _first(fv < 0, tt, yy)
            out.append(Violation(f"f_{i} >= 0", pt, {f"f_{i}": float(fv[k])}))
    for j, bt in enumerate(inst.boundary_terms, 1):
        Phi = sample(f"Phi_{j}", bt.Phi)
        lo = sample(f"phi_{j}", bt.phi_lower)
        hi = sample(f"psi_{j}", bt.psi_upper)
        if Phi is None or lo is None or hi is None:
            continue
        for name, vals in ((f"phi_{j}", lo), (f"psi_{j}", hi)):
            if np.any(vals <= 0):
                k, pt = _first(vals <= 0, tt, yy)
                out.append(Violation(f"{name} > 0", pt, {name: float(vals[k])}))
        # tolerance for roundoff in equality cases such as Phi = y/4, phi = 1/4
        slack = 1e-12 * (1.0 + np.abs(Phi))
        low_bad = yy * lo > Phi + slack
        if np.any(low_bad):
            k, pt = _first(low_bad, tt, yy)
            out.append(Violation(f"y*phi_{j} <= Phi_{j}", pt,
                                 {"y*phi": float(yy[k] * lo[k]), "Phi": float(Phi[k])}))
        high_bad = Phi > yy * hi + slack
        if np.any(high_bad):
            k, pt = _first(high_bad, tt, yy)
            out.append(Violation(f"Phi_{j} <= y*psi_{j}", pt,
                                 {"Phi": float(Phi[k]), "y*psi": float(yy[k] * hi[k])}))
    return out


# --- extrema and constants -------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden(g, a, b, iters=40):
    """Golden-section minimization of a unimodal-ish g on [a, b]."""
    if b <= a:
        return a, g(a)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    return (c, gc) if gc < gd else (d, gd)


def grid_extremum(e: Expr, y_lo: float, y_hi: float, grid: int, kind: str):
    """Min or max of e over [0,1]x[y_lo,y_hi].

    Dense (grid+1)^2 scan, then alternating golden-section sweeps inside the
    best cell's neighbourhood. The refined value is only accepted if it
    improves on the scan, so refinement is monotone.
    Returns (value, (t, y)).
    """
    sign = 1.0 if kind == "min" else -1.0
    tt, yy = _lattice(y_lo, y_hi, grid)
    vals = sign * e(tt, yy)
    k = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = float(vals[k])
    t0, y0 = float(tt[k]), float(yy[k])
    ht = 1.0 / grid
    hy = (y_hi - y_lo) / grid
    t_lo, t_hi = max(0.0, t0 - ht), min(1.0, t0 + ht)
    y_lo_c, y_hi_c = max(y_lo, y0 - hy), min(y_hi, y0 + hy)
    t_cur, y_cur = t0, y0
    for _ in range(3):
        t_cur, _v = _golden(lambda t: sign * e(t, y_cur), t_lo, t_hi)
        y_cur, v = _golden(lambda y: sign * e(t_cur, y), y_lo_c, y_hi_c)
        if v < best:
            best, t0, y0 = v, t_cur, y_cur
    return sign * best, (t0, y0)


def derive_constants(inst: ProblemInstance, thr: ThresholdSet, kernel: GreensKernel,
                     grid: int = 257, n_panels: int = DEFAULT_PANELS) -> DerivedConstants:
    """Compute alpha_j, beta_j, M, N and the lambda margin.

    Raises :class:`InadmissibleLambda` (carrying M, N and the margin) when
    any of them is not positive.
    """
    beta = tuple(grid_extremum(bt.psi_upper, 0.0, thr.C, grid, "max")[0]
                 for bt in inst.boundary_terms)
    alpha = tuple(grid_extremum(bt.phi_lower, thr.B, thr.lam * thr.B, grid, "min")[0]
                  for bt in inst.boundary_terms)
    lam, e1, denom = kernel.lam, kernel.expP1, kernel.denom

    # Gauss nodes are interior, so the t = 1 integrand never touches its diagonal
    def g1(s):
        return kernel.G(1.0, s)

    def g0(s):
        return kernel.G(0.0, s)

    int_G1 = integrate(g1, 0.0, 1.0, n_panels)
    int_G0 = integrate(g0, 0.0, 1.0, n_panels)
    M = (1.0 - e1 * sum(beta) / denom) / int_G1
    N = (1.0 - sum(alpha) / denom) / int_G0
    margin = lam - (1.0 + sum(beta)) * e1
    if not (M > 0 and N > 0 and margin > 0):
        raise InadmissibleLambda(
            f"lambda = {lam!r} is not admissible: need lambda > (1 + sum beta) "
            f"exp(int p) = {(1.0 + sum(beta)) * e1!r}",
            M=M, N=N, lambda_margin=margin, alpha=list(alpha), beta=list(beta))
    return DerivedConstants(alpha, beta, M, N, margin, int_G1, int_G0, grid)


# --- loading ---------------------------------------------------------------

_TOP_KEYS = {"p", "f", "lambda", "boundary_terms", "thresholds", "settings"}
_REQUIRED = ("p", "f", "lambda", "thresholds")


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or not math.isfinite(value):
        raise InstanceError(f"expected a finite number, got {value!r}", where)
    return float(value)


def _expr(value, where):
    if not isinstance(value, str):
        raise InstanceError(f"expected an expression string, got {value!r}", where)
    try:
        return parse(value)
    except ExprError as exc:
        raise InstanceError(f"cannot parse {value!r}: {exc}", where) from exc


def instance_from_dict(data: dict):
    """Build (ProblemInstance, ThresholdSet, Settings) from decoded JSON."""
    if not isinstance(data, dict):
        raise InstanceError("top level must be an object", "$")
    for key in _REQUIRED:
        if key not in data:
            raise InstanceError(f"missing required field {key!r}", f"$.{key}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise InstanceError(f"unknown field(s) {sorted(unknown)}", "$")

    p = _expr(data["p"], "$.p")
    if not p.free_vars <= {"t"}:
        raise InstanceError("p may only depend on t", "$.p")
    if not isinstance(data["f"], list) or not data["f"]:
        raise InstanceError("f must be a non-empty list", "$.f")
    f = [_expr(s, f"$.f[{i}]") for i, s in enumerate(data["f"])]
    lam = _num(data["lambda"], "$.lambda")

    terms = []
    raw_terms = data.get("boundary_terms", [])
    if not isinstance(raw_terms, list):
        raise InstanceError("boundary_terms must be a list", "$.boundary_terms")
    for j, bt in enumerate(raw_terms):
        where = f"$.boundary_terms[{j}]"
        if not isinstance(bt, dict):
            raise InstanceError("expected an object", where)
        for key in ("tau", "Phi", "phi", "psi"):
            if key not in bt:
                raise InstanceError(f"missing required field {key!r}", f"{where}.{key}")
        terms.append(BoundaryTerm(_num(bt["tau"], f"{where}.tau"),
                                  _expr(bt["Phi"], f"{where}.Phi"),
                                  _expr(bt["phi"], f"{where}.phi"),
                                  _expr(bt["psi"], f"{where}.psi")))

    th = data["thresholds"]
    if not isinstance(th, dict):
        raise InstanceError("thresholds must be an object", "$.thresholds")
    for key in ("A", "B", "C"):
        if key not in th:
            raise InstanceError(f"missing required field {key!r}", f"$.thresholds.{key}")
    thr = ThresholdSet(_num(th["A"], "$.thresholds.A"), _num(th["B"], "$.thresholds.B"),
                       _num(th["C"], "$.thresholds.C"), lam)

    raw = data.get("settings", {}) or {}
    if not isinstance(raw, dict):
        raise InstanceError("settings must be an object", "$.settings")
    defaults = asdict(Settings())
    clean = {}
    for key, value in raw.items():
        if key not in defaults:
            raise InstanceError(f"unknown setting {key!r}", f"$.settings.{key}")
        if isinstance(defaults[key], int):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InstanceError(f"expected a positive integer, got {value!r}",
                                    f"$.settings.{key}")
            clean[key] = value
        else:
            clean[key] = _num(value, f"$.settings.{key}")
    settings = Settings(**clean)

    inst = ProblemInstance(p, f, terms, lam)
    _check_finite(inst, thr)
    return inst, thr, settings


def _check_finite(inst, thr, n=64):
    """Every expression must be finite on a coarse sample of its domain."""
    tt, yy = _lattice(0.0, max(thr.C, 0.0) or 1.0, n)
    named = [("$.p", inst.p)] + [(f"$.f[{i}]", fi) for i, fi in enumerate(inst.f)]
    for j, bt in enumerate(inst.boundary_terms):
        named += [(f"$.boundary_terms[{j}].{k}", e)
                  for k, e in (("Phi", bt.Phi), ("phi", bt.phi_lower), ("psi", bt.psi_upper))]
    for where, e in named:
        try:
            e(tt, yy)
        except DomainError as exc:
            raise InstanceError(f"expression is not finite on its domain: {exc}", where) from exc


def load_instance(path):
    """Read an instance JSON file -> (ProblemInstance, ThresholdSet, Settings)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read instance: {exc.strerror}", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}", str(path)) from exc
    return instance_from_dict(data)


def instance_hash(inst: ProblemInstance, thr: ThresholdSet, settings: Settings) -> str:
    blob = json.dumps({"instance": inst.to_dict(), "thresholds": thr.to_dict(),
                       "settings": asdict(settings)}, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
