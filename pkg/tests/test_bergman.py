import math

import numpy as np
import pytest

from ballharmonics.ball import SpaceShape
from ballharmonics.bergman import (
    RadialKernelSpec,
    bergman_sum,
    gross_richards_closed,
    hua_cauchy_check,
    orbital_integral_rank1,
)
from ballharmonics.hyperfun import HahnParams, gamma, hahn_poly, hyp2f1_series
from ballharmonics.quad import QuadConfig, axis_rule, halfline_rule
from ballharmonics.spherical import (
    CanonicalBasisElement,
    bk_column_matrix,
    canonical_basis,
    canonical_norm,
    gk_factor,
    spherical_calibration_constant,
)


# ---------------------------------------------------------------------------
# rank-one orbital integral


def test_orbital_u_zero_is_prefactor():
    got = orbital_integral_rank1(2.0, 0.5, 0.0)
    assert got == pytest.approx((1.0 - 0.25) ** 2.0, rel=1e-14)


def test_orbital_matches_hypergeometric_series():
    alpha, z, u = 2.0, 0.5, 0.3
    want = (
        (1.0 - abs(z) ** 2) ** alpha
        * (1.0 - abs(u) ** 2) ** alpha
        * float(np.real(hyp2f1_series(alpha, alpha, 1.0, abs(z * np.conj(u)) ** 2)))
    )
    assert orbital_integral_rank1(alpha, z, u) == pytest.approx(want, rel=1e-9)


def test_orbital_symmetric_in_arguments():
    a = orbital_integral_rank1(2.5, 0.4 + 0.3j, 0.2 - 0.5j)
    b = orbital_integral_rank1(2.5, 0.2 - 0.5j, 0.4 + 0.3j)
    assert a == pytest.approx(b, rel=1e-12)


def test_orbital_needs_ball_points():
    with pytest.raises(ValueError):
        orbital_integral_rank1(2.0, 1.0, 0.3)
    with pytest.raises(ValueError):
        orbital_integral_rank1(2.0, 0.3, 1.2)


# ---------------------------------------------------------------------------
# basis sum


def test_sum_at_y_zero_keeps_only_the_vacuum():
    sh = SpaceShape(2, 3)
    alpha = 4.5
    x = (1.7, 0.6)
    elem = CanonicalBasisElement((), alpha, sh)
    want = float(canonical_basis(elem, x) * canonical_basis(elem, (0.0, 0.0)))
    want /= canonical_norm(elem)
    assert bergman_sum(alpha, x, (0.0, 0.0), sh) == pytest.approx(want, rel=1e-12)


def test_sum_rank_one_closed_series():
    alpha = 2.5
    x, y = 1.4, 0.8
    big = (x / (1.0 + x)) * (y / (1.0 + y))
    want = (1.0 + x) ** (-alpha) * (1.0 + y) ** (-alpha) * float(
        np.real(hyp2f1_series(alpha, alpha, 1.0, big))
    )
    got = bergman_sum(alpha, (x,), (y,), SpaceShape(1, 1))
    assert got == pytest.approx(want, rel=1e-10)


def test_sum_agrees_with_orbital_integral():
    alpha = 2.0
    for (z, u) in [(0.5, 0.3), (0.7, 0.45), (0.25, 0.6)]:
        x = z**2 / (1.0 - z**2)
        y = u**2 / (1.0 - u**2)
        orb = orbital_integral_rank1(alpha, z, u)
        got = bergman_sum(alpha, (x,), (y,), SpaceShape(1, 1))
        assert got == pytest.approx(orb, rel=1e-8)


def test_sum_needs_infinite_basis_range():
    with pytest.raises(ValueError):
        bergman_sum(0.5, (0.4, 0.2), (0.3, 0.1), SpaceShape(2, 2))


def test_sum_tail_certificate():
    sh = SpaceShape(1, 1)
    full = bergman_sum(2.5, (1.5,), (1.2,), sh)
    short, tail = bergman_sum(2.5, (1.5,), (1.2,), sh, weight_bound=8, return_tail=True)
    assert abs(full - short) <= 5.0 * tail
    assert tail > 0.0
    _, tail_full = bergman_sum(2.5, (1.5,), (1.2,), sh, return_tail=True)
    assert tail_full < 1e-9 * abs(full)


# ---------------------------------------------------------------------------
# closed determinant form


def test_closed_variant_validation():
    with pytest.raises(ValueError):
        RadialKernelSpec(3.0, SpaceShape(1, 2), "other")


def test_closed_rank_one_reduction():
    alpha = 2.5
    spec = RadialKernelSpec(alpha, SpaceShape(1, 1), "shifted")
    x, y = 1.4, 0.8
    big = (x / (1.0 + x)) * (y / (1.0 + y))
    want = (1.0 + x) ** (-alpha) * (1.0 + y) ** (-alpha) * float(
        np.real(hyp2f1_series(alpha, alpha, 1.0, big))
    )
    assert gross_richards_closed(spec, (x,), (y,)) == pytest.approx(want, rel=1e-12)


def test_closed_shifted_matches_sum_on_grid():
    grid = [0.2, 0.7, 1.3, 2.1, 3.0]
    for (p, q, alpha) in [(1, 1, 2.5), (1, 2, 3.0)]:
        sh = SpaceShape(p, q)
        spec = RadialKernelSpec(alpha, sh, "shifted")
        for xv in grid:
            for yv in grid:
                ref = bergman_sum(alpha, (xv,), (yv,), sh)
                got = gross_richards_closed(spec, (xv,), (yv,))
                assert got == pytest.approx(ref, rel=1e-6)


def test_closed_shifted_matches_sum_p2():
    sh = SpaceShape(2, 2)
    spec = RadialKernelSpec(4.0, sh, "shifted")
    rng = np.random.default_rng(17)
    for _ in range(5):
        x = np.sort(rng.uniform(0.1, 2.5, size=2))
        y = np.sort(rng.uniform(0.1, 2.5, size=2))
        ref = bergman_sum(4.0, x, y, sh)
        got = gross_richards_closed(spec, x, y)
        assert got == pytest.approx(ref, rel=1e-6)


def test_closed_unshifted_misses_the_oracle():
    # the one-unit-lower parameter variant disagrees with the basis sum
    # by whole percents; the discrepancy is reported, not hidden
    for (p, q, alpha) in [(1, 1, 2.5), (1, 2, 3.0), (2, 2, 4.0)]:
        sh = SpaceShape(p, q)
        spec = RadialKernelSpec(alpha, sh, "unshifted")
        x = np.linspace(0.4, 1.1, p)
        y = np.linspace(0.6, 1.5, p)
        ref = bergman_sum(alpha, x, y, sh)
        got = gross_richards_closed(spec, x, y)
        assert abs(got - ref) > 1e-3 * abs(ref)


def test_closed_confluent_coordinates():
    sh = SpaceShape(2, 2)
    spec = RadialKernelSpec(4.0, sh, "shifted")
    ref = bergman_sum(4.0, (1.5, 1.5 + 3e-12), (0.7, 0.2), sh)
    got = gross_richards_closed(spec, (1.5, 1.5), (0.7, 0.2))
    assert got == pytest.approx(ref, rel=1e-8)
    # double confluence on both slots
    ref = bergman_sum(4.0, (0.9, 0.9 + 3e-12), (0.9, 0.9 - 3e-12), sh)
    got = gross_richards_closed(spec, (0.9, 0.9), (0.9, 0.9))
    assert got == pytest.approx(ref, rel=1e-8)


def test_closed_y_zero_reduces_to_vacuum_term():
    sh = SpaceShape(2, 2)
    spec = RadialKernelSpec(4.0, sh, "shifted")
    got = gross_richards_closed(spec, (1.5, 0.4), (0.0, 0.0))
    want = bergman_sum(4.0, (1.5, 0.4), (0.0, 0.0), sh)
    assert got == pytest.approx(want, rel=1e-10)


# ---------------------------------------------------------------------------
# Cauchy-type determinant identity


def test_hua_rank_one_is_exact():
    assert hua_cauchy_check([1.0, 0.5, 0.25], (0.5,), (0.4,)) == 0.0


def test_hua_exponential_kernel():
    a = [1.0 / math.factorial(n) for n in range(31)]
    assert hua_cauchy_check(a, (0.5, 0.2), (0.3, 0.1)) < 1e-10


def test_hua_bergman_coefficients():
    alpha, p, d = 4.0, 2, 0
    a = [
        float(gamma(alpha - p + 1 + n)) ** 2 / (math.factorial(n) * math.factorial(n + d))
        for n in range(26)
    ]
    a = [v / a[0] for v in a]
    assert hua_cauchy_check(a, (0.45, 0.15), (0.35, 0.05)) < 1e-9


def test_hua_three_coordinates():
    a = [1.0 / math.factorial(n) for n in range(21)]
    assert hua_cauchy_check(a, (0.5, 0.2, 0.1), (0.3, 0.25, 0.05)) < 1e-12


def test_hua_rejects_mismatched_tuples():
    with pytest.raises(ValueError):
        hua_cauchy_check([1.0, 1.0], (0.5, 0.2), (0.3,))


# ---------------------------------------------------------------------------
# reproducing property through the spectral pairing


def test_kernel_reproduces_canonical_vectors():
    # pair the canonical vectors against the kernel section R(., y):
    # closed-form images against the measured image of the section,
    # integrated with the inverted-weight (exotic) spectral pairing
    # Gamma^2(alpha)/(2 pi) * int F G gk / |Gamma(alpha-h+i sigma)|^2,
    # the weight under which the canonical images are orthogonal with
    # exactly their closed-form squared norms
    sh = SpaceShape(1, 2)
    alpha = 4.0
    # the exotic weight cancels the Gamma^2 modulus of the canonical
    # image exactly, so the integrand is Hahn polynomial x image x gk;
    # past sigma ~ 10 the true integrand is below 1e-6 of the result
    # while the measured image degenerates into quadrature noise
    cfg = QuadConfig(s_max=10.0)
    spec = RadialKernelSpec(alpha, sh, "shifted")
    srule = axis_rule(cfg)
    xrule = halfline_rule(cfg)
    sig = srule.nodes
    xs = xrule.nodes
    kappa = spherical_calibration_constant(sh)
    phi = bk_column_matrix(sig, xs, sh)
    c_pair = float(gamma(alpha)) ** 2 / (2.0 * math.pi)
    params = HahnParams(alpha - sh.h, sh.r, sh.r)
    base = srule.weights * gk_factor(sig, sh)
    for y in (0.35, 1.2):
        kern = np.array([gross_richards_closed(spec, (xv,), (y,)) for xv in xs])
        xw = xrule.weights * xs ** (sh.q - sh.p)
        ry_img = phi @ (kern * xw) / kappa
        for m in range(4):
            poly = np.real(np.asarray(hahn_poly(m, -(sig**2), params), dtype=complex))
            pairing = c_pair * float(np.sum(base * poly * ry_img))
            pairing /= float(gamma(alpha + m)) ** 2
            elem = CanonicalBasisElement((m,), alpha, sh)
            want = float(canonical_basis(elem, (y,)))
            assert abs(pairing - want) <= 1e-5 * max(1.0, abs(want))
