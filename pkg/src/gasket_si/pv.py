"""Divergence of principal values: isolating annuli and exact oscillation.

For a point z whose code switches at position i (z_i != z_{i+1}) the cell
beta = (z_1..z_{i-1}, y, .., y), y the third symbol repeated m times, is
the only piece of the gasket inside a thin annulus around z.  The search
below certifies that by exact cell-tree pruning; the truncations at the two
radii then differ by exactly 3^-m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exactfield import QReal
from .gasket import (
    ALPHABET,
    Code,
    GasketParams,
    GasketPoint,
    cell,
    dist_bounds,
    triangle_dist_sq,
)
from .kernel import GeometryError, KernelSpec, sector_of
from .operator import CellFunction, truncated_integral

DELTA = Fraction(1, 100)
M_CAP = 12
EXTRA_DEPTH = 8


class AnnulusNotFound(RuntimeError):
    def __init__(self, message: str, undecided: list | None = None):
        super().__init__(message)
        self.undecided = undecided or []


@dataclass(frozen=True)
class SwitchIndices:
    code_prefix: Code
    indices: tuple[int, ...]


def switch_indices(code_prefix: Sequence[int]) -> SwitchIndices:
    """1-based positions i with code[i] != code[i+1]."""
    code = tuple(code_prefix)
    idx = tuple(i for i in range(1, len(code)) if code[i - 1] != code[i])
    return SwitchIndices(code, idx)


@dataclass
class PvCertificate:
    z: GasketPoint
    i: int
    m: int
    beta: Code
    r_sq: QReal  # inner radius squared
    outer_sq: QReal  # (C R)^2
    depth: int
    isolation_log: list[dict] = field(default_factory=list, repr=False)

    @property
    def c_sq(self) -> QReal:
        """Squared annulus ratio C^2."""
        return self.outer_sq / self.r_sq

    @property
    def annulus_c(self) -> float:
        """Outer to inner radius ratio C."""
        return float(self.c_sq) ** 0.5

    @property
    def radius(self) -> float:
        return float(self.r_sq) ** 0.5

    @property
    def outer_radius(self) -> float:
        return float(self.outer_sq) ** 0.5

    def to_json(self) -> dict:
        return {
            "code": self.z.code_text(),
            "i": self.i,
            "m": self.m,
            "beta": "".join(map(str, self.beta)),
            "R_sq": str(self.r_sq),
            "C_sq": str(self.c_sq),
            "R": self.radius,
            "C": self.annulus_c,
            "depth": self.depth,
            "pruned": len(self.isolation_log),
        }


def _beta(z: GasketPoint, i: int, m: int) -> Code:
    a, b = z.digit(i), z.digit(i + 1)
    if a == b:
        raise ValueError(f"i={i} is not a switch index of {z.code_text()}")
    (y,) = set(ALPHABET) - {a, b}
    return z.digits(i - 1) + (y,) * m


def _isolate(z: GasketPoint, beta: Code, r_sq: QReal, outer_sq: QReal, depth: int):
    """Prune the cell tree against the closed annulus r_sq <= |w - z|^2 <= outer_sq.

    Returns (log, survivors).  Survivors are cells meeting the annulus that
    are not descendants of beta: either a depth-``depth`` cell that could
    not be decided, or any cell with a vertex (a point of E) in the annulus.
    The search stops at the first survivor.
    """
    log: list[dict] = []
    stack = [cell((), z.params)]
    nb = len(beta)
    while stack:
        c = stack.pop()
        if c.code[:nb] == beta:
            log.append({"code": c.code, "verdict": "beta"})
            continue
        dists = [(z.point - v).norm_sq() for v in c.vertices]
        if max(dists) < r_sq:
            log.append({"code": c.code, "verdict": "inside"})
            continue
        if triangle_dist_sq(z.point, c.vertices) > outer_sq:
            log.append({"code": c.code, "verdict": "outside"})
            continue
        if c.code != beta[: c.level] and any(r_sq <= d <= outer_sq for d in dists):
            return log, [c.code]
        if c.level >= depth:
            return log, [c.code]
        stack.extend(c.children())
    return log, []


def find_annulus(
    z: GasketPoint,
    i: int,
    spec: KernelSpec | GasketParams,
    m_start: int = 1,
    m_cap: int = M_CAP,
    delta: Fraction = DELTA,
    fixed_m: bool = False,
) -> PvCertificate:
    """Smallest m >= m_start whose annulus around S_beta is certified isolated.

    With ``fixed_m`` only ``m_start`` is tried.
    """
    params = spec.params if isinstance(spec, KernelSpec) else spec
    if z.params != params:
        raise ValueError("point and parameters use different lambda")
    if i < 1:
        raise ValueError("switch index must be >= 1")
    last: list = []
    for m in range(m_start, (m_start if fixed_m else m_cap) + 1):
        beta = _beta(z, i, m)
        b = dist_bounds(z.point, cell(beta, params))
        r_sq = b.min_sq * (1 - delta) ** 2
        outer_sq = b.max_sq * (1 + delta) ** 2
        depth = i + m + EXTRA_DEPTH
        log, survivors = _isolate(z, beta, r_sq, outer_sq, depth)
        if not survivors:
            return PvCertificate(z, i, m, beta, r_sq, outer_sq, depth, log)
        last = survivors
    raise AnnulusNotFound(f"no isolating annulus for {z.code_text()} at i={i} up to m={m}", last)


def oscillation_exact(cert: PvCertificate, spec: KernelSpec) -> Fraction:
    """|integral of K(z, y) over the annulus| = mu(S_beta) / h, exactly."""
    if spec.variant != "plateau":
        raise ValueError("exact oscillation needs the plateau kernel")
    c = cell(cert.beta, spec.params)
    sectors = {sector_of(cert.z.point, v).k for v in c.vertices}
    if len(sectors) != 1:
        raise GeometryError(f"S_beta spans sectors {sorted(sectors)}")
    b = dist_bounds(cert.z.point, c)
    lo, hi, h = spec.plateau(cert.i)
    if not (b.min_sq >= lo * lo and b.max_sq <= hi * hi):
        raise GeometryError(f"S_beta is not inside plateau {cert.i}")
    return c.measure / h


@dataclass(frozen=True)
class TraceRow:
    epsilon: float
    value: Fraction
    kind: str  # "inner", "outer" or "aligned"
    i: int


def pv_trace(
    z: GasketPoint,
    depth: int,
    spec: KernelSpec,
    m: int | None = None,
    aligned: bool = True,
) -> tuple[list[TraceRow], list[PvCertificate]]:
    """Truncations T_eps(1)(z) at certified radii for switch indices i <= depth.

    Rows come in decreasing epsilon.  Each (inner, outer) pair differs by
    exactly the oscillation of its certificate; cell-aligned cutoffs lam^n
    are interleaved when ``aligned`` is set and are zero.
    """
    one = CellFunction.constant(0)
    certs = []
    rows: list[TraceRow] = []
    for i in switch_indices(z.digits(depth + 1)).indices:
        cert = find_annulus(z, i, spec, m_start=m or 1, fixed_m=m is not None)
        certs.append(cert)
        for kind, eps_sq in (("outer", cert.outer_sq), ("inner", cert.r_sq)):
            t = truncated_integral(one, z, eps_sq, spec, max_depth=cert.depth)
            if not t.is_exact:
                raise GeometryError(f"certified radius for i={i} left undecided cells")
            rows.append(TraceRow(float(eps_sq) ** 0.5, t.exact, kind, i))
    if aligned:
        lam = spec.params.lam
        for n in range(1, depth + 1):
            t = truncated_integral(one, z, QReal(lam ** (2 * n)), spec, extra_depth=2)
            rows.append(TraceRow(float(lam**n), t.exact, "aligned", n))
    rows.sort(key=lambda r: -r.epsilon)
    return rows, certs


# -- independent re-check --------------------------------------------------


@lru_cache(maxsize=8)
def _cell_origins(params: GasketParams, depth: int) -> np.ndarray:
    """Float s_alpha(0) for all depth-``depth`` codes, lexicographic."""
    lam = params.lam_float
    trans = np.array([params.translations[j].to_float() for j in ALPHABET])
    pts = np.zeros((1, 2))
    for _ in range(depth):
        pts = (lam * pts[None, :, :] + trans[:, None, :]).reshape(-1, 2)
    return pts


def brute_force_check(cert: PvCertificate, extra: int = 2) -> list[str]:
    """Float enumeration of every cell at depth ``cert.depth + extra``.

    Works in the coordinates of z's level-(i-1) ancestor P (all of the
    gasket inside P is enumerated at full depth; the remaining level-(i-1)
    cells are tested whole).  A cell is flagged if it may meet the annulus
    and is not inside S_beta.  Returns the list of discrepancies.
    """
    params = cert.z.params
    lam = params.lam_float
    i = cert.i
    parent = cert.z.digits(i - 1)
    r_in, r_out = cert.radius, cert.outer_radius
    z = np.array(cert.z.point.to_float())
    base = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    problems = []

    # inside P: rescale so that P is the base triangle
    rel = cert.depth + extra - (i - 1)
    scale = lam ** (i - 1)
    p_origin = np.array(cell(parent, params).vertices[0].to_float())
    zr = (z - p_origin) / scale
    origins = _cell_origins(params, rel)
    side = lam**rel
    d = np.stack([np.hypot(*(origins + side * v - zr).T) for v in base])
    near = d.min(axis=0) - side
    far = d.max(axis=0)
    hit = (far >= r_in / scale) & (near <= r_out / scale)
    tail = cert.beta[i - 1 :]
    start = sum((c - 1) * 3 ** (rel - 1 - t) for t, c in enumerate(tail))
    stop = start + 3 ** (rel - len(tail))
    idx = np.flatnonzero(hit)
    bad = idx[(idx < start) | (idx >= stop)]
    problems += [f"cell #{k} at relative depth {rel} meets the annulus" for k in bad[:10]]
    if np.any(far[start:stop] > r_out / scale) or np.any(d[:, start:stop].min(axis=0) < r_in / scale):
        problems.append("part of S_beta lies outside the annulus")

    # outside P: whole level-(i-1) cells, float point-triangle distance
    if i > 1:
        origins = _cell_origins(params, i - 1)
        tris = origins[:, None, :] + scale * base[None, :, :]
        dist = _point_triangle_dist(z, tris)
        own = sum((c - 1) * 3 ** (i - 2 - t) for t, c in enumerate(parent))
        dist[own] = np.inf
        if np.any(dist <= r_out):
            problems.append(f"{int(np.sum(dist <= r_out))} level-{i - 1} cells outside P reach the annulus")
    return problems


def _point_triangle_dist(p: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Float distance from one point to many closed triangles (n, 3, 2)."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]

    def cross(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    s1 = cross(b - a, p - a)
    s2 = cross(c - b, p - b)
    s3 = cross(a - c, p - c)
    inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))

    def seg(u, v):
        e = v - u
        t = np.clip(np.einsum("ij,ij->i", p - u, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
        q = u + t[:, None] * e
        return np.hypot(*(p - q).T)

    d = np.minimum(np.minimum(seg(a, b), seg(b, c)), seg(c, a))
    return np.where(inside, 0.0, d)
