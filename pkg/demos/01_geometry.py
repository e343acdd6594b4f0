"""Cells, exact coordinates and the sector half-width for a few lambdas."""
import math
from fractions import Fraction

from gasket_si import GasketParams, KernelSpec, cell
from gasket_si.gasket import GasketPoint, ball_measure_bounds

for lam in (Fraction(1, 4), Fraction(1, 5), Fraction(3, 10), Fraction(1, 10)):
    spec = KernelSpec.build(GasketParams(lam))
    print(f"lambda={lam}  d={spec.params.d:.6f}  epsilon={spec.epsilon:.6f} rad"
          f" ({math.degrees(spec.epsilon):.2f} deg, pi/6 = 30 deg)")

params = GasketParams(Fraction(1, 4))
print("\nlevel-2 cell 23 has exact vertices")
for v in cell((2, 3), params).vertices:
    print("   ", v.to_json())

# points with periodic codes are exact too
z = GasketPoint((3,), (1, 2), params)
print(f"\n{z.code_text()} = {z.point.to_json()}  ~ {z.point.to_float()}")

# the measure of a ball is bracketed by counting cells
for r in (Fraction(1, 2), Fraction(1, 20), Fraction(1, 200)):
    b = ball_measure_bounds(z.point, r, params)
    rd = float(r) ** params.d
    print(f"r={r}: {float(b.lower):.5f} <= mu(B) <= {float(b.upper):.5f}   r^d={rd:.5f}")
