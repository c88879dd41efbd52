"""
Three positive solutions
========================

p = 0, lam = 2, f(y) = 0.4 + 2.6 ramp(y, 1, 2), A = 1, B = 2, C = 8.
The shooting residual R(c) = 2c - y(1; c) has three sign changes; each
root is a solution, and the three land in the buckets ||y|| < A,
theta(y) > B, and ||y|| > A with theta(y) < B.
"""
from pathlib import Path

from conelw.cone import classify, theta
from conelw.curve import SolutionCurve
from conelw.green import build_kernel
from conelw.operator import picard
from conelw.problem import load_instance
from conelw.shooting import scan_residual, solve_all

inst, thr, settings = load_instance(Path(__file__).parent / "instances" / "three_solutions.json")

# %% Residual profile
profile = scan_residual(inst, thr.C, 33, 256)
for c, r in zip(profile.c_grid[::4], profile.residuals[::4]):
    print(f"R({c:5.2f}) = {r:+.4f}")
print("brackets:", profile.brackets)

# %% Full solve and classification
result = solve_all(inst, thr, settings)
loc = classify(result.solutions, thr)
for y, res, rec in zip(result.solutions, result.residuals, loc.solutions):
    print(f"y(0) = {y.y0:.10f}  ||y|| = {y.sup_norm:.10f}  theta = {theta(y):.10f}  "
          f"{rec.bucket}  residuals ode {res['ode']:.1e} bc {res['boundary']:.1e}")
print("all three buckets filled:", loc.theorem_satisfied)

# %% Picard iteration only finds the attracting solutions
kernel = build_kernel(inst.p, inst.lam)
for start in (0.0, 5.0):
    y, ok, its = picard(kernel, inst, SolutionCurve.constant(start), 50, 1e-12, 10 * thr.C)
    print(f"Picard from y = {start}: converged={ok} after {its} iterations, y(0) = {y.y0:.10f}")
