"""
Green's kernel
==============

For y' - p y = h with lam y(0) = y(1) + b the solution is
int_0^1 G(t,s) h(s) ds + w(t) b. Here we tabulate G for p = 1 + sin^2(pi t)
and check its defining properties numerically.
"""
import numpy as np

from conelw.exprs import parse
from conelw.green import G, boundary_weight, build_kernel, check_invariants

p = parse("1 + sin(3.141592653589793*t)^2")
k = build_kernel(p, lam=12.0)
print(f"exp(int p) = {k.expP1:.12f}   (exact e^1.5 = {np.exp(1.5):.12f})")
print(f"lam - exp(int p) = {k.denom:.6f}")

# %% A coarse table; rows t, columns s. Below the diagonal the lam branch applies.
t = np.linspace(0, 1, 5)
table = G(k, t[:, None], t[None, :])
np.set_printoptions(precision=4, suppress=True)
print("\nG(t, s):\n", table)

# %% Jump of 1 across the diagonal, lam G(0,s) = G(1,s), dG/dt = p G
for name, (err, tol, ok) in check_invariants(k, samples=25).items():
    print(f"{name:>18}: max error {err:.2e} (tol {tol:.0e}) {'ok' if ok else 'FAILED'}")

print("\nlam w(0) - w(1) =", k.lam * boundary_weight(k, 0.0) - boundary_weight(k, 1.0))
