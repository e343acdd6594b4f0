"""Sector function, plateau profile and the kernel K = Omega / h.

On pairs of gasket points the kernel is evaluated exactly: the sign comes
from nearest-sector classification in Q(sqrt 3) and the profile from exact
comparison of squared distances against the plateau endpoints, so
``kernel_eval_exact`` returns a Fraction.  ``kernel_eval_float`` is the
smooth C-infinity extension used by the quadrature and matrix code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple

import numpy as np

from .exactfield import HALF_SQRT3, QReal
from .gasket import Cell, GasketParams, GasketPoint, Point, cell, common_prefix_length, iter_codes, random_point

Variant = Literal["plateau", "homogeneous"]
VARIANTS = ("plateau", "homogeneous")

_H = Fraction(1, 2)
# (cos, sin) of k*pi/3
_ROT = [
    (QReal(1), QReal(0)),
    (QReal(_H), HALF_SQRT3),
    (QReal(-_H), HALF_SQRT3),
    (QReal(-1), QReal(0)),
    (QReal(-_H), -HALF_SQRT3),
    (QReal(_H), -HALF_SQRT3),
]
_SECTOR_WIDTH = math.pi / 3


class GeometryError(RuntimeError):
    """An exact check on the gasket geometry failed (points not in E, or a bug)."""


class K2Violation(AssertionError):
    pass


class Sector(NamedTuple):
    k: int

    @property
    def sign(self) -> int:
        return 1 if self.k % 2 == 0 else -1


def _in_sector(vx: QReal, vy: QReal, k: int) -> bool:
    c, s = _ROT[k]
    rx = c * vx + s * vy
    if rx.sign() <= 0:
        return False
    ry = c * vy - s * vx
    return (rx * rx - 3 * (ry * ry)).sign() >= 0


def sector_of(x: Point, y: Point) -> Sector:
    """Nearest multiple of pi/3 to the direction of y - x, decided exactly."""
    vx, vy = y.x - x.x, y.y - x.y
    if not vx and not vy:
        raise ValueError("sector_of needs x != y")
    u = math.atan2(float(vy), float(vx)) / _SECTOR_WIDTH
    guess = round(u) % 6
    if abs(abs(u - round(u)) - 0.5) > 1e-9:
        if _in_sector(vx, vy, guess):
            return Sector(guess)
    # near a boundary: ties go to the lower index
    for k in range(6):
        if _in_sector(vx, vy, k):
            return Sector(k)
    raise AssertionError("unreachable: the six closed sectors cover the plane")


def _deviation(vx: float, vy: float) -> float:
    theta = math.atan2(vy, vx) % (2 * math.pi)
    return abs(theta - round(theta / _SECTOR_WIDTH) * _SECTOR_WIDTH)


def compute_epsilon(params: GasketParams) -> float:
    """Largest angular deviation from the six lattice directions between two
    distinct level-1 cells (hull bound; vertex pairs realise the extremes)."""
    worst = 0.0
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            for p in cell((i,), params).vertices:
                for q in cell((j,), params).vertices:
                    fx, fy = (q - p).to_float()
                    worst = max(worst, _deviation(fx, fy))
    if worst >= math.pi / 6:
        raise GeometryError(f"sector half-width {worst} is not below pi/6")
    return worst


@dataclass(frozen=True)
class KernelSpec:
    params: GasketParams
    epsilon: float
    variant: str = "plateau"

    @classmethod
    def build(cls, params: GasketParams, variant: str = "plateau") -> "KernelSpec":
        if variant not in VARIANTS:
            raise ValueError(f"unknown kernel variant {variant!r}")
        return cls(params, compute_epsilon(params), variant)

    def plateau(self, k: int) -> tuple[Fraction, Fraction, Fraction]:
        """(left end, right end, value) of the k-th plateau, k >= 1."""
        lam = self.params.lam
        return (1 / lam - 2) * lam**k, lam ** (k - 1), Fraction(1, 3 ** (k - 1))

    @property
    def h_comp_c(self) -> int:
        """h is within this factor of r^d on (0, 1]."""
        return 3

    def header(self) -> dict:
        return {**self.params.header(), "epsilon": self.epsilon, "kernel": self.variant}


# -- exact profile ----------------------------------------------------------


def plateau_index(dist_sq: QReal, spec: KernelSpec) -> int:
    """k with (1/lam - 2) lam^k <= r <= lam^(k-1), r^2 = dist_sq."""
    r = math.sqrt(float(dist_sq))
    if r <= 0:
        raise ValueError("zero distance has no plateau")
    lam = spec.params.lam_float
    guess = max(1, int(math.floor(math.log(r) / math.log(lam))) + 1)
    for k in (guess, guess - 1, guess + 1):
        if k < 1:
            continue
        lo, hi, _ = spec.plateau(k)
        if dist_sq >= lo * lo and dist_sq <= hi * hi:
            return k
    raise GeometryError(f"pair not in E_lambda-admissible position (|x-y| ~ {r!r} lies in a plateau gap)")


def h_exact(x: Point, y: Point, spec: KernelSpec) -> Fraction:
    k = plateau_index((y - x).norm_sq(), spec)
    return Fraction(1, 3 ** (k - 1))


def kernel_eval_exact(x: Point, y: Point, spec: KernelSpec) -> Fraction:
    if spec.variant != "plateau":
        raise ValueError("exact evaluation needs the plateau kernel")
    s = sector_of(x, y).sign
    return s / h_exact(x, y, spec)


def check_k2(x: Point, z: Point, y: Point, spec: KernelSpec) -> str:
    """'holds' if the regularity gate applies and K(x,y) == K(z,y) exactly,
    'not-applicable' if |x-z| >= (1 - 2 lam)|x-y|."""
    gate = (1 - 2 * spec.params.lam) ** 2
    if not ((z - x).norm_sq() < (y - x).norm_sq() * gate):
        return "not-applicable"
    kxy = kernel_eval_exact(x, y, spec)
    kzy = kernel_eval_exact(z, y, spec)
    if kxy != kzy:
        raise K2Violation(f"K(x,y)={kxy} != K(z,y)={kzy} for x={x}, z={z}, y={y}")
    return "holds"


def sample_k2_triples(rng, params: GasketParams, count: int):
    """Yield ``count`` random (x, z, y) gasket points with z sharing a long code prefix with x."""
    while count:
        x = random_point(rng, params, prefix_len=rng.randint(1, 8))
        y = random_point(rng, params, prefix_len=rng.randint(1, 8))
        if x.point == y.point:
            continue
        keep = common_prefix_length(x, y) + 1 + rng.randint(0, 3)
        tail = tuple(rng.choice((1, 2, 3)) for _ in range(rng.randint(0, 4)))
        period = tuple(rng.choice((1, 2, 3)) for _ in range(rng.randint(1, 3)))
        z = GasketPoint(x.digits(keep) + tail, period, params)
        if z.point == y.point:
            continue
        yield x, z, y
        count -= 1


# -- smooth extension --------------------------------------------------------


def smooth_step(t):
    """C-infinity monotone step, 0 for t <= 0 and 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        f1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f0 / (f0 + f1)


def h_smooth(r, spec: KernelSpec):
    """Smooth increasing profile equal to 3^-(k-1) on the k-th plateau.

    Accepts scalars or arrays; gaps (lam^k, (1/lam - 2) lam^k) are bridged by
    a flat-ended smooth step, and r > 1 stays at the first plateau value.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("h_smooth needs r > 0")
    lam = spec.params.lam_float
    log_lam = math.log(lam)
    # j with lam^j < r <= lam^(j-1)
    j = np.floor(np.log(r_arr) / log_lam).astype(np.int64) + 1
    j = np.where(r_arr <= lam**j, j + 1, j)
    j = np.where(r_arr > lam ** (j - 1.0), j - 1, j)
    j = np.maximum(j, 1)
    low = 1.0 / 3.0**j
    high = 1.0 / 3.0 ** (j - 1)
    left = (1.0 / lam - 2.0) * lam**j
    t = (r_arr - lam**j) / ((1.0 / lam - 3.0) * lam**j)
    step = smooth_step(t)
    ramp = np.where(step >= 1.0, high, np.minimum(low + (high - low) * step, high))
    out = np.where(r_arr >= left, high, ramp)
    out = np.where(r_arr > 1.0, 1.0, out)
    return out if out.ndim else float(out)


def omega_smooth(theta, spec: KernelSpec):
    """Odd smooth sector function of the direction angle theta of y - x."""
    th = np.mod(np.asarray(theta, dtype=float), 2 * math.pi)
    eps = spec.epsilon
    k = np.floor(th / _SECTOR_WIDTH)
    u = th - k * _SECTOR_WIDTH
    base = np.where(np.mod(k, 2) == 0, 1.0, -1.0)
    t = (u - eps) / (_SECTOR_WIDTH - 2 * eps)
    out = base * (1.0 - 2.0 * smooth_step(t))
    return out if out.ndim else float(out)


def kernel_eval_float(x, y, spec: KernelSpec):
    """Float kernel for points given as arrays with a trailing axis of size 2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = y - x
    r = np.hypot(v[..., 0], v[..., 1])
    theta = np.arctan2(v[..., 1], v[..., 0])
    om = omega_smooth(theta, spec)
    if spec.variant == "homogeneous":
        return om * np.asarray(r) ** (-spec.params.d)
    return om / h_smooth(r, spec)


# -- sector conditions on the cell tree --------------------------------------


def hull_sectors(a: Cell, b: Cell) -> set[int]:
    """Sectors of all vertex differences from hull(a) to hull(b).

    If the set is a singleton then every direction from a point of ``a`` to
    a point of ``b`` lies in that closed sector (sectors are convex cones).
    """
    return {sector_of(p, q).k for p in a.vertices for q in b.vertices}


def check_sector_conditions(params: GasketParams, depth: int) -> list[dict]:
    """Exhaustive check of the sibling sector rules for all parents above ``depth``.

    Returns violation records; an empty list means every same-parent pair has
    a single hull sector and the two siblings seen from one child sit in
    adjacent sectors.
    """
    violations = []
    for level in range(depth):
        for parent in iter_codes(level):
            kids = [cell(parent + (j,), params) for j in (1, 2, 3)]
            sec = {}
            for ia, a in enumerate(kids):
                for ib, b in enumerate(kids):
                    if ia == ib:
                        continue
                    s = hull_sectors(a, b)
                    if len(s) != 1:
                        violations.append({"rule": "constant", "a": a.code, "b": b.code, "sectors": sorted(s)})
                    sec[ia, ib] = min(s)
            for ia in range(3):
                ib, ic = [j for j in range(3) if j != ia]
                diff = (sec[ia, ib] - sec[ia, ic]) % 6
                if diff not in (1, 5):
                    violations.append({"rule": "adjacent", "a": kids[ia].code, "sectors": [sec[ia, ib], sec[ia, ic]]})
    return violations
