"""T^n(1) vanishes identically: every shell contributes +c and -c."""
from fractions import Fraction

from gasket_si import GasketParams, KernelSpec
from gasket_si.gasket import GasketPoint
from gasket_si.operator import CellFunction, shell_terms, truncated_apply_exact

spec = KernelSpec.build(GasketParams(Fraction(1, 5)))
x = GasketPoint((1, 3, 2), (2, 1), spec.params)
one = CellFunction.constant(0)

print("x =", x.code_text())
for term in shell_terms(x, 4, spec):
    print(f"  cell {''.join(map(str, term.code)):>5}  K = {str(term.coefficient):>4}"
          f"  mu = 1/{3 ** len(term.code)}")
for n in range(1, 7):
    print(f"T^{n}(1)(x) = {truncated_apply_exact(one, x, n, spec)}")

# a non-constant f sees the asymmetry
f = CellFunction.indicator((2,), level=2)
print("\nf = indicator of S_2:", [str(truncated_apply_exact(f, x, n, spec)) for n in range(1, 5)])
