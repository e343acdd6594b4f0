"""Truncated singular integrals on the gasket.

Exact evaluation uses the shell decomposition of {y : |x - y| > lam^n}:
for each level k <= n the two children of x's level-(k-1) cell that do
not contain x.  On each such cell the kernel is one constant (one sector,
one plateau), which is checked exactly the first time the cell is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactfield import QReal
from .gasket import (
    ALPHABET,
    BARYCENTER,
    Code,
    GasketParams,
    GasketPoint,
    cell,
    dist_bounds,
    iter_codes,
    max_dist_sq,
    triangle_dist_sq,
)
from .kernel import GeometryError, KernelSpec, kernel_eval_float, sector_of

MAX_MATRIX_NODES = 10_000


class CellFunction:
    """A function constant on the cells of one level, with exact values."""

    def __init__(self, level: int, values: Mapping[Code, Fraction]):
        self.level = level
        self.values = {tuple(k): Fraction(v) for k, v in values.items()}
        if len(self.values) != 3**level or any(len(k) != level for k in self.values):
            raise ValueError(f"a level-{level} cell function needs exactly {3**level} entries")
        self._integrals: dict[Code, Fraction] = {}

    @classmethod
    def constant(cls, level: int, value=1) -> "CellFunction":
        return cls(level, {c: Fraction(value) for c in iter_codes(level)})

    @classmethod
    def indicator(cls, code: Sequence[int], level: int | None = None) -> "CellFunction":
        code = tuple(code)
        level = len(code) if level is None else level
        return cls(level, {c: Fraction(int(c[: len(code)] == code)) for c in iter_codes(level)})

    @classmethod
    def from_array(cls, level: int, values: Sequence) -> "CellFunction":
        return cls(level, dict(zip(iter_codes(level), values)))

    def as_array(self) -> np.ndarray:
        return np.array([float(self.values[c]) for c in iter_codes(self.level)])

    def integral(self, code: Code) -> Fraction:
        """Exact integral of f over S_code against mu."""
        code = tuple(code)
        if len(code) >= self.level:
            return self.values[code[: self.level]] / 3 ** len(code)
        hit = self._integrals.get(code)
        if hit is None:
            hit = sum((self.integral(code + (j,)) for j in ALPHABET), Fraction(0))
            self._integrals[code] = hit
        return hit


@dataclass(frozen=True)
class ShellTerm:
    code: Code
    coefficient: Fraction  # the constant kernel value on the cell
    min_sq: QReal


@lru_cache(maxsize=1 << 18)
def shell_term(x: GasketPoint, k: int, j: int, spec: KernelSpec) -> ShellTerm:
    """Kernel constant on the level-k sibling cell ``x[:k-1] + (j,)``.

    Verifies exactly that the hull of the cell lies in one sector seen from
    x and in the k-th plateau band of distances.
    """
    parent = x.digits(k - 1)
    if j == x.digit(k):
        raise ValueError("the shell term must avoid x's own cell")
    c = cell(parent + (j,), spec.params)
    b = dist_bounds(x.point, c)
    lo, hi, value = spec.plateau(k)
    if not (b.min_sq >= lo * lo and b.max_sq <= hi * hi):
        raise GeometryError(f"cell {c.code} is not inside plateau {k} as seen from {x.code_text()}")
    sectors = {sector_of(x.point, v).k for v in c.vertices}
    if len(sectors) != 1:
        raise GeometryError(f"cell {c.code} spans sectors {sorted(sectors)} as seen from {x.code_text()}")
    sign = 1 if sectors.pop() % 2 == 0 else -1
    return ShellTerm(c.code, sign / value, b.min_sq)


@lru_cache(maxsize=1 << 16)
def _check_membership(x: GasketPoint, n: int) -> None:
    own = cell(x.digits(n), x.params)
    if triangle_dist_sq(x.point, own.vertices):
        raise GeometryError(f"point {x.code_text()} is not inside its level-{n} cell")


def shell_terms(x: GasketPoint, n: int, spec: KernelSpec) -> list[ShellTerm]:
    return [shell_term(x, k, j, spec) for k in range(1, n + 1) for j in ALPHABET if j != x.digit(k)]


def truncated_apply_exact(f: CellFunction, x: GasketPoint, n: int, spec: KernelSpec) -> Fraction:
    """Exact T^n f(x): the integral of K(x,y) f(y) over |x - y| > lam^n."""
    if spec.variant != "plateau":
        raise ValueError("exact truncation needs the plateau kernel")
    if n < 0:
        raise ValueError("n must be non-negative")
    if x.params != spec.params:
        raise ValueError("point and kernel use different lambda")
    _check_membership(x, n)
    cutoff_sq = spec.params.lam ** (2 * n)
    total = Fraction(0)
    for term in shell_terms(x, n, spec):
        if not term.min_sq > cutoff_sq:
            raise GeometryError(f"cutoff sphere straddles cell {term.code}")
        total += term.coefficient * f.integral(term.code)
    return total


def _first_difference(code: Code, x: GasketPoint) -> int:
    for i, c in enumerate(code, start=1):
        if c != x.digit(i):
            return i
    return 0


@dataclass
class Truncation:
    """T_eps f(x) as an exact part plus a float estimate over undecided cells."""

    exact: Fraction
    approx: float = 0.0
    undecided_mass: Fraction = field(default_factory=Fraction)

    @property
    def value(self) -> float:
        return float(self.exact) + self.approx

    @property
    def is_exact(self) -> bool:
        return self.undecided_mass == 0


def truncated_integral(
    f: CellFunction,
    x: GasketPoint,
    eps_sq,
    spec: KernelSpec,
    extra_depth: int = 6,
    max_depth: int | None = None,
) -> Truncation:
    """T_eps f(x) for any cutoff, given as an exact squared radius.

    Cells are classified by exact hull distance bounds; cells that keep
    straddling the cutoff sphere down to ``max_depth`` (default: the cutoff
    scale plus ``extra_depth``) are estimated at their barycenter.
    """
    if spec.variant != "plateau":
        raise ValueError("cell-tree truncation needs the plateau kernel")
    eps_sq = QReal.coerce(eps_sq)
    lam = spec.params.lam_float
    if max_depth is None:
        eps = math.sqrt(float(eps_sq))
        scale = 0 if eps >= 1 else math.ceil(math.log(eps) / math.log(lam))
        max_depth = scale + extra_depth
    out = Truncation(Fraction(0))
    xf = np.array(x.point.to_float())
    stack = [cell((), spec.params)]
    while stack:
        c = stack.pop()
        i = _first_difference(c.code, x)
        if i == 0:
            # c contains x
            if max_dist_sq(x.point, c) <= eps_sq:
                continue
            if c.level >= max_depth:
                raise GeometryError("depth cap reached inside the cell of x; raise max_depth")
            stack.extend(c.children())
            continue
        b = dist_bounds(x.point, c)
        if b.max_sq <= eps_sq:
            continue
        term = shell_term(x, i, c.code[i - 1], spec)
        if b.min_sq > eps_sq:
            out.exact += term.coefficient * f.integral(c.code)
        elif c.level >= max_depth:
            out.undecided_mass += c.measure
            bary = np.array(c.barycenter().to_float())
            if np.hypot(*(bary - xf)) ** 2 > float(eps_sq):
                out.approx += float(term.coefficient * f.integral(c.code))
        else:
            stack.extend(c.children())
    return out


def maximal_probe(
    f: CellFunction,
    x: GasketPoint,
    epsilons: Iterable,
    spec: KernelSpec,
    squared: bool = False,
    extra_depth: int = 6,
) -> list[float]:
    """|T_eps f(x)| over a grid of cutoffs; its max lower-bounds T* f(x).

    Cutoffs are radii (float or rational) unless ``squared`` is set, in which
    case they are exact squared radii (QReal or Fraction).
    """
    out = []
    for eps in epsilons:
        if squared:
            eps_sq = QReal.coerce(eps)
        else:
            r = Fraction(eps) if isinstance(eps, (float, int)) else eps
            eps_sq = QReal.coerce(r) ** 2
        out.append(abs(truncated_integral(f, x, eps_sq, spec, extra_depth=extra_depth).value))
    return out


# -- float discretisation ----------------------------------------------------


def barycenter_nodes(level: int, params: GasketParams) -> np.ndarray:
    """Float barycenters s_alpha(b) of all level-n cells, lexicographic order."""
    lam = params.lam_float
    trans = np.array([params.translations[i].to_float() for i in ALPHABET])
    nodes = np.array([BARYCENTER.to_float()])
    for _ in range(level):
        nodes = (lam * nodes[None, :, :] + trans[:, None, :]).reshape(-1, 2)
    return nodes


def brute_force_truncated(f: CellFunction, x, eps: float, spec: KernelSpec, depth: int = 9) -> float:
    """Float quadrature of T_eps f(x) with one barycenter node per depth cell."""
    if f.level > depth:
        raise ValueError("quadrature depth must be at least the level of f")
    nodes = barycenter_nodes(depth, spec.params)
    weights = np.repeat(f.as_array(), 3 ** (depth - f.level)) / 3.0**depth
    xf = np.asarray(x.point.to_float() if isinstance(x, GasketPoint) else x, dtype=float)
    r = np.hypot(nodes[:, 0] - xf[0], nodes[:, 1] - xf[1])
    keep = r > eps
    vals = kernel_eval_float(xf[None, :], nodes[keep], spec)
    return float(np.sum(vals * weights[keep]))


@dataclass
class OpMatrix:
    level: int
    variant: str
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def build_matrix(n: int, spec: KernelSpec) -> OpMatrix:
    """Dense discretisation A[a, b] = K(c_a, c_b) 3^-n at barycenter nodes."""
    if 3**n > MAX_MATRIX_NODES:
        raise MemoryError(f"3^{n} nodes exceeds the dense limit of {MAX_MATRIX_NODES}")
    nodes = barycenter_nodes(n, spec.params)
    a = np.zeros((len(nodes), len(nodes)))
    off = ~np.eye(len(nodes), dtype=bool)
    xs = np.broadcast_to(nodes[:, None, :], a.shape + (2,))
    ys = np.broadcast_to(nodes[None, :, :], a.shape + (2,))
    a[off] = kernel_eval_float(xs[off], ys[off], spec) / 3.0**n
    return OpMatrix(n, spec.variant, a)


class NonConvergence(RuntimeError):
    pass


def operator_norm(
    a,
    tol: float = 1e-9,
    max_iter: int = 100_000,
    restarts: int = 3,
    seed: int = 0,
) -> float:
    """Largest singular value by power iteration on A^T A, best of restarts."""
    m = np.asarray(a.entries if isinstance(a, OpMatrix) else a, dtype=float)
    if not np.any(m):
        return 0.0
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        v = rng.standard_normal(m.shape[1])
        v /= np.linalg.norm(v)
        sigma = resid = 0.0
        for _ in range(max_iter):
            u = m.T @ (m @ v)
            rayleigh = float(v @ u)
            sigma = math.sqrt(max(rayleigh, 0.0))
            if rayleigh <= 0.0:
                break
            # eigen-residual of A^T A, relative to sigma^2
            resid = np.linalg.norm(u - rayleigh * v) / rayleigh
            v = u / np.linalg.norm(u)
            if resid <= tol:
                break
        else:
            raise NonConvergence(f"power iteration stalled at sigma={sigma:.6g}, residual {resid:.3e}")
        best = max(best, sigma)
    return best
