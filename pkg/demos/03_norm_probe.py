"""Operator norms of the barycenter discretisation, plateau vs homogeneous kernel."""
from fractions import Fraction

import numpy as np

from gasket_si import GasketParams, KernelSpec
from gasket_si.operator import build_matrix, operator_norm

params = GasketParams(Fraction(1, 4))
plateau = KernelSpec.build(params)
homog = KernelSpec.build(params, "homogeneous")

print(" n  nodes   plateau    homogeneous   max|row sum|")
for n in range(1, 8):
    a, b = build_matrix(n, plateau), build_matrix(n, homog)
    rows = np.abs(a.entries.sum(axis=1)).max()
    print(f"{n:2d} {a.size:6d}  {operator_norm(a):.6f}   {operator_norm(b):.6f}     {rows:.1e}")

# The plateau column stays at 1/sqrt(3): level-n blocks reproduce the level-1 matrix.
print("1/sqrt(3) =", 1 / np.sqrt(3))
