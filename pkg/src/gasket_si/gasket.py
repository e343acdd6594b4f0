"""The lambda-Sierpinski gasket: similitudes, codes, exact cells, measure.

Everything geometric is exact in Q(sqrt 3).  Codes are tuples over
``{1, 2, 3}``; the empty tuple is the root cell (the base triangle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

from .exactfield import HALF_SQRT3, ZERO, QReal

Code = tuple  # tuple[int, ...] over {1, 2, 3}
ALPHABET = (1, 2, 3)


class Point(NamedTuple):
    x: QReal
    y: QReal

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point(self.x - other.x, self.y - other.y)

    def scale(self, c) -> "Point":
        return Point(self.x * c, self.y * c)

    def dot(self, other: "Point") -> QReal:
        return self.x * other.x + self.y * other.y

    def norm_sq(self) -> QReal:
        return self.x * self.x + self.y * self.y

    def to_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self) -> list[str]:
        return [str(self.x), str(self.y)]


def point(x, y=0) -> Point:
    return Point(QReal.coerce(x), QReal.coerce(y))


BASE_TRIANGLE = (point(0, 0), point(1, 0), Point(QReal(Fraction(1, 2)), HALF_SQRT3))
# mu-barycenter of the gasket (also the centroid of the base triangle)
BARYCENTER = Point(QReal(Fraction(1, 2)), QReal(0, Fraction(1, 6)))


def check_code(code: Sequence[int]) -> Code:
    code = tuple(int(c) for c in code)
    if any(c not in ALPHABET for c in code):
        raise ValueError(f"code {code!r} uses symbols outside {{1,2,3}}")
    return code


def parse_code(text: str) -> Code:
    """``"132"`` or ``"1,3,2"`` -> ``(1, 3, 2)``."""
    return check_code(ch for ch in text if ch not in ", ()")


class GasketParams:
    """Contraction ratio and derived constants of E_lambda.

    ``lam`` must be a rational in (0, 1/3).  ``d`` is the float Hausdorff
    dimension ``-log 3 / log lam``; exactly ``lam**d == 1/3``.
    """

    __slots__ = ("lam", "d", "translations", "_hash")

    def __init__(self, lam):
        if isinstance(lam, str):
            from .exactfield import parse_rational

            lam = parse_rational(lam)
        if isinstance(lam, float):
            raise TypeError("lambda must be rational, e.g. Fraction(1, 4)")
        lam = Fraction(lam)
        if not (0 < lam < Fraction(1, 3)):
            raise ValueError(f"lambda must lie in (0, 1/3), got {lam}")
        self.lam = lam
        self.d = -math.log(3.0) / math.log(lam)
        one_minus = 1 - lam
        self.translations = {
            1: point(0, 0),
            2: point(one_minus, 0),
            3: Point(QReal(one_minus / 2), HALF_SQRT3 * one_minus),
        }
        self._hash = hash(("GasketParams", lam))

    def __eq__(self, other):
        return isinstance(other, GasketParams) and other.lam == self.lam

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"GasketParams(lam={self.lam})"

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    @property
    def regularity_c(self) -> float:
        """AD-regularity constant lam**-d (= 3)."""
        return self.lam_float ** (-self.d)

    def header(self) -> dict:
        return {"lambda": f"{self.lam.numerator}/{self.lam.denominator}", "d": self.d}


def apply_similitude(i: int, p: Point, params: GasketParams) -> Point:
    t = params.translations[i]
    lam = params.lam
    return Point(p.x * lam + t.x, p.y * lam + t.y)


def apply_word(code: Sequence[int], p: Point, params: GasketParams) -> Point:
    """s_code(p) = s_{c1} o s_{c2} o ... o s_{cn} (p)."""
    for i in reversed(code):
        p = apply_similitude(i, p, params)
    return p


@dataclass(frozen=True)
class Cell:
    code: Code
    vertices: tuple[Point, Point, Point]
    params: GasketParams = field(repr=False, compare=False)

    @property
    def level(self) -> int:
        return len(self.code)

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 3**self.level)

    @property
    def diameter(self) -> Fraction:
        return self.params.lam**self.level

    def children(self) -> list["Cell"]:
        return [cell(self.code + (j,), self.params) for j in ALPHABET]

    def barycenter(self) -> Point:
        return apply_word(self.code, BARYCENTER, self.params)

    def is_prefix_of(self, code: Sequence[int]) -> bool:
        return tuple(code[: self.level]) == self.code

    def to_json(self) -> dict:
        return {
            "code": "".join(map(str, self.code)),
            "level": self.level,
            "measure": f"{self.measure.numerator}/{self.measure.denominator}",
            "vertices": [v.to_json() for v in self.vertices],
        }


@lru_cache(maxsize=1 << 16)
def cell(code: Code, params: GasketParams) -> Cell:
    code = check_code(code)
    if not code:
        return Cell((), BASE_TRIANGLE, params)
    # S_{c1 c2 ...} = s_{c1}(S_{c2 ...})
    tail = cell(code[1:], params)
    verts = tuple(apply_similitude(code[0], v, params) for v in tail.vertices)
    return Cell(code, verts, params)


def iter_codes(level: int) -> Iterator[Code]:
    """All codes of the given length in lexicographic order."""
    if level == 0:
        yield ()
        return
    for head in iter_codes(level - 1):
        for j in ALPHABET:
            yield head + (j,)


def iter_cells(level: int, params: GasketParams) -> Iterator[Cell]:
    for code in iter_codes(level):
        yield cell(code, params)


def point_of_periodic_code(prefix: Sequence[int], period: Sequence[int], params: GasketParams) -> Point:
    """Exact point with infinite code ``prefix + period + period + ...``."""
    prefix, period = check_code(prefix), check_code(period)
    if not period:
        raise ValueError("period must be nonempty")
    # p = lam^m p + c  with  c = s_period(0)
    c = apply_word(period, point(0, 0), params)
    scale = 1 / (1 - params.lam ** len(period))
    fixed = c.scale(scale)
    return apply_word(prefix, fixed, params)


@dataclass(frozen=True)
class GasketPoint:
    """A point of E_lambda with its eventually periodic code."""

    prefix: Code
    period: Code
    params: GasketParams = field(repr=False)
    point: Point = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", check_code(self.prefix))
        object.__setattr__(self, "period", check_code(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")
        object.__setattr__(self, "point", point_of_periodic_code(self.prefix, self.period, self.params))

    @classmethod
    def vertex(cls, code: Sequence[int], j: int, params: GasketParams) -> "GasketPoint":
        """The j-th vertex of cell(code): s_code(v_j) has code ``code + j j j ...``."""
        return cls(tuple(code), (j,), params)

    def digit(self, i: int) -> int:
        """1-based i-th symbol of the infinite code."""
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.period[(i - len(self.prefix) - 1) % len(self.period)]

    def digits(self, n: int) -> Code:
        return tuple(self.digit(i) for i in range(1, n + 1))

    def code_text(self) -> str:
        pre = "".join(map(str, self.prefix))
        per = "".join(map(str, self.period))
        return f"({pre})({per})^inf" if pre else f"({per})^inf"


def parse_periodic_code(text: str, params: GasketParams) -> GasketPoint:
    """Parse ``"(3)(12)^inf"`` or ``"(12)^inf"``."""
    t = text.replace(" ", "")
    if not t.endswith("^inf"):
        raise ValueError(f"periodic code must end with ^inf: {text!r}")
    groups = t[: -len("^inf")].split(")(")
    groups = [g.strip("()") for g in groups]
    if len(groups) == 1:
        prefix, period = "", groups[0]
    elif len(groups) == 2:
        prefix, period = groups
    else:
        raise ValueError(f"malformed periodic code {text!r}")
    return GasketPoint(parse_code(prefix), parse_code(period), params)


def sibling_gap(k: int, params: GasketParams) -> Fraction:
    """Distance between distinct children of a level-k cell: (1 - 2 lam) lam^k."""
    if k < 0:
        raise ValueError("level must be non-negative")
    return (1 - 2 * params.lam) * params.lam**k


# -- exact point/triangle distances -------------------------------------------


class DistBounds(NamedTuple):
    min_sq: QReal
    max_sq: QReal


def _cross(o: Point, a: Point, b: Point) -> int:
    return ((a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)).sign()


def _segment_dist_sq(p: Point, a: Point, b: Point) -> QReal:
    ab = b - a
    ap = p - a
    t_num = ap.dot(ab)
    if t_num.sign() <= 0:
        return ap.norm_sq()
    ab2 = ab.norm_sq()
    if (t_num - ab2).sign() >= 0:
        return (p - b).norm_sq()
    # |ap|^2 - (ap.ab)^2 / |ab|^2
    return ap.norm_sq() - t_num * t_num / ab2


def point_in_triangle(p: Point, tri: Sequence[Point]) -> bool:
    a, b, c = tri
    s1, s2, s3 = _cross(a, b, p), _cross(b, c, p), _cross(c, a, p)
    has_neg = s1 < 0 or s2 < 0 or s3 < 0
    has_pos = s1 > 0 or s2 > 0 or s3 > 0
    return not (has_neg and has_pos)


def triangle_dist_sq(p: Point, tri: Sequence[Point]) -> QReal:
    """Exact squared distance from p to the closed triangle."""
    if point_in_triangle(p, tri):
        return ZERO
    a, b, c = tri
    return min(_segment_dist_sq(p, a, b), _segment_dist_sq(p, b, c), _segment_dist_sq(p, c, a))


def dist_bounds(p: Point, c: Cell) -> DistBounds:
    """Exact squared-distance bounds from p to E_lambda inside cell c.

    ``min_sq`` is the distance to the closed hull (a lower bound);
    ``max_sq`` is attained at a vertex, and vertices lie in E_lambda.
    """
    max_sq = max((p - v).norm_sq() for v in c.vertices)
    return DistBounds(triangle_dist_sq(p, c.vertices), max_sq)


def max_dist_sq(p: Point, c: Cell) -> QReal:
    return max((p - v).norm_sq() for v in c.vertices)


# -- measure of balls -------------------------------------------------------


@dataclass
class BallMeasure:
    lower: Fraction
    upper: Fraction
    depth: int
    undecided: int

    @property
    def gap(self) -> Fraction:
        return self.upper - self.lower


def ball_measure_bounds(center: Point, radius, params: GasketParams, depth: int | None = None) -> BallMeasure:
    """Rational bounds on mu(closed ball(center, radius)) by cell-tree pruning.

    Cells with all vertices inside count fully, cells whose hull misses the
    ball count zero; straddlers recurse until ``depth`` and then only enter
    the upper bound.  Default depth is 10 levels below the radius scale.
    """
    if isinstance(radius, float):
        radius = Fraction(radius)
    r_sq = QReal.coerce(radius) ** 2
    r = float(radius)
    if not (0 < r <= 1):
        raise ValueError("radius must lie in (0, 1]")
    if depth is None:
        depth = int(math.ceil(math.log(r) / math.log(params.lam_float))) + 10
    lower = Fraction(0)
    straddle = Fraction(0)
    undecided = 0
    stack = [cell((), params)]
    while stack:
        c = stack.pop()
        if max_dist_sq(center, c) <= r_sq:
            lower += c.measure
            continue
        if triangle_dist_sq(center, c.vertices) > r_sq:
            continue
        if c.level >= depth:
            straddle += c.measure
            undecided += 1
            continue
        stack.extend(c.children())
    return BallMeasure(lower, lower + straddle, depth, undecided)


# -- sampling ---------------------------------------------------------------


def random_code(rng, n: int) -> Code:
    return tuple(rng.choice(ALPHABET) for _ in range(n))


def random_point(rng, params: GasketParams, prefix_len: int = 8, max_period: int = 3) -> GasketPoint:
    """Random eventually periodic point; ``rng`` is a ``random.Random``."""
    period = random_code(rng, rng.randint(1, max_period))
    return GasketPoint(random_code(rng, prefix_len), period, params)


def common_prefix_length(a: GasketPoint, b: GasketPoint, limit: int = 64) -> int:
    for i in range(1, limit + 1):
        if a.digit(i) != b.digit(i):
            return i - 1
    return limit
