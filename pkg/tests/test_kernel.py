import math
import random
from fractions import Fraction

import numpy as np
import pytest

from gasket_si.exactfield import QReal
from gasket_si.gasket import GasketParams, GasketPoint, Point, cell, point, random_point
from gasket_si.kernel import (
    GeometryError,
    K2Violation,
    KernelSpec,
    check_k2,
    check_sector_conditions,
    compute_epsilon,
    h_exact,
    h_smooth,
    kernel_eval_exact,
    kernel_eval_float,
    omega_smooth,
    plateau_index,
    sector_of,
)

APEX = Point(QReal(Fraction(1, 2)), QReal(0, Fraction(1, 2)))


def test_sector_examples():
    assert sector_of(point(0, 0), point(1, 0)).k == 0
    s = sector_of(point(0, 0), APEX)
    assert s.k == 1 and s.sign == -1
    s = sector_of(point(1, 0), point(0, 0))
    assert s.k == 3 and s.sign == -1


def test_sector_needs_distinct_points():
    with pytest.raises(ValueError):
        sector_of(point(0, 0), point(0, 0))


def test_sector_boundary_tie_goes_low():
    # direction exactly pi/6: tan = 1/sqrt3
    assert sector_of(point(0, 0), Point(QReal(3), QReal(0, 1))).k == 0
    # direction exactly -pi/6 sits between sectors 5 and 0
    assert sector_of(point(0, 0), Point(QReal(3), QReal(0, -1))).k == 0
    # direction exactly pi/2 sits between sectors 1 and 2
    assert sector_of(point(0, 0), point(0, 1)).k == 1


def test_sector_antipodality(spec):
    rng = random.Random(4)
    for _ in range(200):
        x, y = random_point(rng, spec.params), random_point(rng, spec.params)
        if x.point == y.point:
            continue
        assert sector_of(y.point, x.point).k == (sector_of(x.point, y.point).k + 3) % 6


def test_epsilon_quarter():
    eps = compute_epsilon(GasketParams(Fraction(1, 4)))
    assert eps == pytest.approx(math.atan(math.sqrt(3) / 5), abs=1e-12)
    assert eps < math.pi / 6


def test_epsilon_shrinks_with_lambda():
    eps = [compute_epsilon(GasketParams(Fraction(1, q))) for q in (4, 10, 100, 10000)]
    assert eps == sorted(eps, reverse=True)
    assert eps[-1] < 1e-3


def test_epsilon_closed_form(spec):
    lam = spec.params.lam_float
    assert spec.epsilon == pytest.approx(math.atan(lam * math.sqrt(3) / (2 - 3 * lam)), abs=1e-12)


def test_within_sector_validity(spec):
    rng = random.Random(9)
    eps = spec.epsilon
    for _ in range(10_000):
        x, y = random_point(rng, spec.params, prefix_len=6), random_point(rng, spec.params, prefix_len=6)
        if x.point == y.point:
            continue
        vx, vy = (y.point - x.point).to_float()
        th = math.atan2(vy, vx)
        dev = abs(th - round(th / (math.pi / 3)) * (math.pi / 3))
        assert dev <= eps + 1e-9


def test_sector_conditions_small(spec):
    assert check_sector_conditions(spec.params, 4) == []


def test_h_exact_examples(quarter_spec):
    assert h_exact(point(0, 0), point(1, 0), quarter_spec) == 1
    # siblings at level k+1 inside a level-k cell: value 3^-k
    for k in range(5):
        parent = (2,) * k
        x = GasketPoint.vertex(parent + (1,), 2, quarter_spec.params)
        y = GasketPoint.vertex(parent + (3,), 1, quarter_spec.params)
        assert h_exact(x.point, y.point, quarter_spec) == Fraction(1, 3**k)


def test_h_exact_gap_raises(quarter_spec):
    # |x-y| = 0.3 lies in the gap (1/4, 1/2)
    with pytest.raises(GeometryError):
        plateau_index(QReal(Fraction(9, 100)), quarter_spec)


def test_h_exact_comparable(spec):
    rng = random.Random(1)
    d = spec.params.d
    for _ in range(500):
        x, y = random_point(rng, spec.params), random_point(rng, spec.params)
        if x.point == y.point:
            continue
        r = math.sqrt(float((x.point - y.point).norm_sq()))
        h = float(h_exact(x.point, y.point, spec))
        assert r**d / 3 <= h * (1 + 1e-12) and h <= 3 * r**d * (1 + 1e-12)


def test_h_smooth_plateaus(spec):
    lam = spec.params.lam_float
    for k in range(1, 12):
        lo, hi, val = spec.plateau(k)
        for r in np.linspace(float(lo), float(hi), 7):
            assert h_smooth(r, spec) == float(val)
        assert h_smooth(lam ** (k - 1), spec) == 3.0 ** -(k - 1)


def test_h_smooth_gaps_and_monotone(spec):
    lam = spec.params.lam_float
    r = np.geomspace(1e-7, 2.0, 10_000)
    h = h_smooth(r, spec)
    assert np.all(np.diff(h) >= 0)
    for k in range(1, 6):
        mid = 0.5 * (lam**k + (1 / lam - 2) * lam**k)
        assert 3.0**-k < h_smooth(mid, spec) < 3.0 ** -(k - 1)
    assert h_smooth(5.0, spec) == 1.0
    with pytest.raises(ValueError):
        h_smooth(0.0, spec)


def test_h_smooth_comparability_grid(spec):
    d = spec.params.d
    r = np.linspace(1e-4, 1.0, 10_000)
    h = h_smooth(r, spec)
    c = spec.h_comp_c
    assert np.all(r**d / c <= h * (1 + 1e-12))
    assert np.all(h <= c * r**d * (1 + 1e-12))


def test_kernel_exact_examples(quarter_spec):
    assert kernel_eval_exact(point(0, 0), point(1, 0), quarter_spec) == 1


def test_kernel_antisymmetry_and_size(spec):
    rng = random.Random(2)
    d = spec.params.d
    for _ in range(100):
        x, y = random_point(rng, spec.params), random_point(rng, spec.params)
        if x.point == y.point:
            continue
        k = kernel_eval_exact(x.point, y.point, spec)
        assert kernel_eval_exact(y.point, x.point, spec) == -k
        r = math.sqrt(float((x.point - y.point).norm_sq()))
        assert abs(float(k)) * r**d <= 3 + 1e-9


def test_float_kernel_matches_exact(spec):
    rng = random.Random(6)
    for _ in range(300):
        x, y = random_point(rng, spec.params), random_point(rng, spec.params)
        if x.point == y.point:
            continue
        exact = float(kernel_eval_exact(x.point, y.point, spec))
        approx = float(kernel_eval_float(x.point.to_float(), y.point.to_float(), spec))
        assert approx == pytest.approx(exact, rel=1e-12)


def test_float_kernel_on_extreme_vertex_pair(quarter_spec):
    # apex of S_1 to the near vertex of S_2 realises the sector half-width
    x, y = cell((1,), quarter_spec.params).vertices[2], cell((2,), quarter_spec.params).vertices[0]
    assert kernel_eval_float(x.to_float(), y.to_float(), quarter_spec) == float(kernel_eval_exact(x, y, quarter_spec))


def test_homogeneous_variant(quarter):
    hom = KernelSpec.build(quarter, "homogeneous")
    assert kernel_eval_float((0.0, 0.0), (1.0, 0.0), hom) == pytest.approx(1.0)
    assert kernel_eval_float((0.0, 0.0), (0.25, 0.0), hom) == pytest.approx(0.25**-quarter.d)
    with pytest.raises(ValueError):
        kernel_eval_exact(point(0, 0), point(1, 0), hom)


def test_unknown_variant(quarter):
    with pytest.raises(ValueError):
        KernelSpec.build(quarter, "riesz")


def test_omega_mean_zero_and_odd(spec):
    th = np.linspace(0, 2 * math.pi, 400_000, endpoint=False)
    om = omega_smooth(th, spec)
    assert abs(om.mean()) < 1e-8
    assert np.allclose(omega_smooth(th + math.pi, spec), -om, atol=1e-12)
    # flat on every sector arc
    for k in range(6):
        arc = np.linspace(k * math.pi / 3 - spec.epsilon, k * math.pi / 3 + spec.epsilon, 50)
        assert np.all(omega_smooth(arc, spec) == (-1) ** k)


def test_k2_examples(quarter_spec):
    p = quarter_spec.params
    x = GasketPoint.vertex((1, 2, 3, 1), 2, p)
    z = GasketPoint.vertex((1, 2, 3, 1), 3, p)
    y = GasketPoint.vertex((1, 2, 1), 1, p)
    assert check_k2(x.point, x.point, y.point, quarter_spec) == "holds"
    assert check_k2(x.point, z.point, y.point, quarter_spec) == "holds"
    far = GasketPoint.vertex((3,), 3, p)
    assert check_k2(x.point, far.point, y.point, quarter_spec) == "not-applicable"


def test_k2_randomised(spec):
    rng = random.Random(8)
    held = 0
    for _ in range(300):
        x = random_point(rng, spec.params)
        keep = rng.randint(1, 8)
        z = GasketPoint(x.digits(keep), (rng.choice((1, 2, 3)),), spec.params)
        y = random_point(rng, spec.params, prefix_len=rng.randint(1, 6))
        if y.point in (x.point, z.point):
            continue
        held += check_k2(x.point, z.point, y.point, spec) == "holds"
    assert held > 50


def test_k2_violation_is_raised(quarter_spec, monkeypatch):
    import gasket_si.kernel as kernel

    calls = iter([Fraction(1), Fraction(-1)])
    monkeypatch.setattr(kernel, "kernel_eval_exact", lambda *a: next(calls))
    with pytest.raises(K2Violation):
        kernel.check_k2(point(0, 0), point(0, 0), point(1, 0), quarter_spec)


def test_named_constants(spec):
    assert spec.params.regularity_c == pytest.approx(3.0, rel=1e-12)
    assert spec.h_comp_c == 3
