"""
Constants and growth conditions
===============================

Load an instance with one nonlocal boundary term, derive alpha, beta, M, N,
and check (F1)-(F3). Then make lam too small and watch the admissibility
check reject it.
"""
from pathlib import Path

from conelw.green import InadmissibleLambda, build_kernel
from conelw.hypotheses import check_hypotheses
from conelw.problem import derive_constants, load_instance, validate

HERE = Path(__file__).parent

inst, thr, settings = load_instance(HERE / "instances" / "boundary_term.json")
print("violations:", validate(inst, thr, settings.grid) or "none")

kernel = build_kernel(inst.p, inst.lam, settings.quad_panels)
consts = derive_constants(inst, thr, kernel, settings.grid)
print(f"alpha = {consts.alpha}, beta = {consts.beta}")
print(f"M = {consts.M:.6f}, N = {consts.N:.6f}, lambda margin = {consts.lambda_margin:.6f}")

report = check_hypotheses(inst, thr, consts, settings.grid)
for name, cond in (("F1", report.f1), ("F2", report.f2), ("F3", report.f3)):
    print(f"{name}: holds={cond.holds}  worst margin {cond.worst_margin:+.4f} "
          f"at (t, y) = {cond.witness}")

# %% lam = 1.2 < (1 + beta) e^{int p} = 1.25
inst, thr, settings = load_instance(HERE / "instances" / "small_lambda.json")
try:
    derive_constants(inst, thr, build_kernel(inst.p, inst.lam), settings.grid)
except InadmissibleLambda as exc:
    print("\n", exc)
    print("  details:", {k: v for k, v in exc.details.items() if k in ("M", "N", "lambda_margin")})
