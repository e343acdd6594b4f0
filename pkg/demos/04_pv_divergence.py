"""Truncations of T(1) at a point oscillate forever: no principal value."""
from fractions import Fraction

from gasket_si import GasketParams, KernelSpec
from gasket_si.gasket import parse_periodic_code
from gasket_si.pv import brute_force_check, oscillation_exact, pv_trace

spec = KernelSpec.build(GasketParams(Fraction(1, 4)))
z = parse_periodic_code("(3)(12)^inf", spec.params)
rows, certs = pv_trace(z, 6, spec)

print(f"z = {z.code_text()}")
print(f"{'epsilon':>12}  {'T_eps(1)(z)':>11}  kind")
for r in rows:
    print(f"{r.epsilon:12.6g}  {str(r.value):>11}  {r.kind} (i={r.i})")

print("\ncertificates")
for c in certs:
    j = c.to_json()
    ok = "ok" if not brute_force_check(c) else "FAILED"
    print(f"  i={c.i} beta={j['beta']:<8} R={j['R']:.3e} C={j['C']:.4f} "
          f"oscillation={oscillation_exact(c, spec)} re-check {ok}")
