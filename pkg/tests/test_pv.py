import random
from fractions import Fraction

import pytest

from gasket_si.gasket import GasketPoint, cell, dist_bounds, random_code
from gasket_si.operator import CellFunction, maximal_probe, truncated_integral
from gasket_si.pv import (
    DELTA,
    AnnulusNotFound,
    brute_force_check,
    find_annulus,
    oscillation_exact,
    pv_trace,
    switch_indices,
)

ONE = CellFunction.constant(0)


@pytest.mark.parametrize(
    "code, expected",
    [((1, 1, 1, 1), ()), ((1, 2, 1, 2), (1, 2, 3)), ((1, 1, 2, 2, 3), (2, 4)), ((), ()), ((3,), ())],
)
def test_switch_indices(code, expected):
    assert switch_indices(code).indices == expected


def test_switch_density():
    rng = random.Random(5)
    code = random_code(rng, 30_000)
    frac = len(switch_indices(code).indices) / (len(code) - 1)
    assert frac == pytest.approx(2 / 3, abs=0.01)


def test_annulus_basic(spec):
    z = GasketPoint((), (1, 2), spec.params)
    lam = spec.params.lam_float
    cert = find_annulus(z, 1, spec)
    assert cert.beta == (3,) * cert.m
    assert 0.05 <= cert.radius / lam <= 20
    assert cert.c_sq > 1
    assert cert.annulus_c == pytest.approx(float(cert.c_sq) ** 0.5)
    b = dist_bounds(z.point, cell(cert.beta, spec.params))
    assert cert.r_sq == b.min_sq * (1 - DELTA) ** 2
    assert cert.outer_sq == b.max_sq * (1 + DELTA) ** 2
    assert brute_force_check(cert) == []


def test_annulus_rejects_non_switch(quarter_spec):
    z = GasketPoint((1, 1), (2,), quarter_spec.params)
    with pytest.raises(ValueError):
        find_annulus(z, 1, quarter_spec)


def test_m1_fails_at_quarter(quarter_spec):
    # the ring around S_3 seen from (12)^inf also meets S_2
    z = GasketPoint((), (1, 2), quarter_spec.params)
    with pytest.raises(AnnulusNotFound):
        find_annulus(z, 1, quarter_spec, m_start=1, fixed_m=True)


def test_oscillation_is_exact(spec):
    z = GasketPoint((3,), (1, 2), spec.params)
    seen = set()
    for i in switch_indices(z.digits(6)).indices:
        cert = find_annulus(z, i, spec)
        osc = oscillation_exact(cert, spec)
        assert osc == Fraction(1, 3**cert.m)
        inner = truncated_integral(ONE, z, cert.r_sq, spec, max_depth=cert.depth)
        outer = truncated_integral(ONE, z, cert.outer_sq, spec, max_depth=cert.depth)
        assert inner.is_exact and outer.is_exact
        assert abs(inner.exact - outer.exact) == osc
        seen.add((cert.m, osc))
    assert len(seen) == 1  # same oscillation at every scale


def test_probe_sees_oscillation(quarter_spec):
    z = GasketPoint((), (1, 2), quarter_spec.params)
    cert = find_annulus(z, 3, quarter_spec)
    outer, inner = maximal_probe(ONE, z, [cert.outer_sq, cert.r_sq], quarter_spec, squared=True, extra_depth=10)
    assert abs(inner - outer) == pytest.approx(3.0**-cert.m, abs=1e-6)


def test_trace(quarter_spec):
    z = GasketPoint((3,), (1, 2), quarter_spec.params)
    rows, certs = pv_trace(z, 5, quarter_spec)
    assert [r.epsilon for r in rows] == sorted((r.epsilon for r in rows), reverse=True)
    assert all(r.value == 0 for r in rows if r.kind == "aligned")
    for c in certs:
        pair = {r.kind: r.value for r in rows if r.i == c.i and r.kind != "aligned"}
        assert abs(pair["inner"] - pair["outer"]) == Fraction(1, 3**c.m)
    assert pv_trace(z, 0, quarter_spec) == ([], [])


def test_scale_covariance(spec):
    lam = spec.params.lam
    z = GasketPoint((), (1, 2, 3), spec.params)
    base = find_annulus(z, 2, spec)
    for j in (1, 2, 3):
        zj = GasketPoint((j,), (1, 2, 3), spec.params)
        cj = find_annulus(zj, 3, spec, m_start=base.m, fixed_m=True)
        assert cj.r_sq == base.r_sq * lam**2
        assert cj.c_sq == base.c_sq


def test_uniform_m_over_random_points(quarter_spec):
    rng = random.Random(21)
    ms = set()
    for _ in range(5):
        z = GasketPoint(tuple(random_code(rng, 6)), (1, 2), quarter_spec.params)
        for i in switch_indices(z.digits(8)).indices[:3]:
            ms.add(find_annulus(z, i, quarter_spec).m)
    assert ms and max(ms) <= 4


def test_brute_force_detects_bad_certificate(quarter_spec):
    z = GasketPoint((), (1, 2), quarter_spec.params)
    cert = find_annulus(z, 1, quarter_spec)
    # shrink the inner radius by hand so the annulus swallows S_2 as well
    cert.r_sq = cert.r_sq / 4
    assert brute_force_check(cert)


def test_oscillation_needs_plateau(quarter):
    from gasket_si.kernel import KernelSpec

    hom = KernelSpec.build(quarter, "homogeneous")
    z = GasketPoint((), (1, 2), quarter)
    cert = find_annulus(z, 1, hom)
    with pytest.raises(ValueError):
        oscillation_exact(cert, hom)
