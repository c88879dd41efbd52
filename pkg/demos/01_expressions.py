"""
The instance DSL
================

Every function in a problem instance (p, f_i, Phi_j, phi_j, psi_j) is a
short formula in t and y. This walks through parsing, evaluation on scalars
and arrays, and the errors you get back.
"""
import numpy as np

from conelw.exprs import DomainError, ParseError, parse, pretty

# %% Precedence: ^ binds tightest and is right associative, then unary minus
for src in ["2+3*4", "2^3^2", "-2^2", "2^-1"]:
    print(f"{src:>8} = {parse(src)(0.0)}")

# %% ramp and clamp give continuous piecewise-linear nonlinearities
f = parse("0.4 + 2.6*ramp(y, 1, 2)")
y = np.linspace(0, 3, 7)
print("\nf(y) on", y, "->", f(0.0, y))

# %% The tree prints back fully parenthesized and re-parses to the same tree
print("\npretty:", pretty(f.ast))
assert parse(pretty(f.ast)) == f

# %% Errors carry locations
try:
    parse("1/(y-1")
except ParseError as exc:
    print("\nparse error:", exc)

try:
    parse("1/(t-0.5)")(0.5, 0.0)
except DomainError as exc:
    print("domain error:", exc)
