import math

import numpy as np
import pytest

from ballharmonics.ball import SpaceShape
from ballharmonics.hyperfun import gamma, rgamma
from ballharmonics.plancherel import (
    assemble_measure,
    berezin_density,
    reconstruct,
    residue_coeff,
)
from ballharmonics.quad import QuadConfig, contour_integral
from ballharmonics.spherical import SpectralPoint, gk_density, power_image


# ---------------------------------------------------------------------------
# continuous density


def test_density_requires_large_alpha():
    with pytest.raises(ValueError):
        berezin_density(1.0, SpectralPoint((0.5j,)), SpaceShape(1, 2))


def test_density_rank_one_gamma_oracle():
    # r = h = 1/2, so the value at s = i is a pure gamma expression
    sh = SpaceShape(1, 1)
    want = float(
        np.real(gamma(2.5 + 1j) * gamma(2.5 - 1j))
        * np.exp(4.0 * np.real(np.log(gamma(0.5 + 1j))))
        / (gamma(3.0) ** 2 * abs(gamma(2j)) ** 2)
    )
    got = berezin_density(3.0, SpectralPoint((1j,)), sh)
    assert got == pytest.approx(want, rel=1e-13)


def test_density_zero_coordinate():
    sh = SpaceShape(2, 2)
    assert berezin_density(4.0, SpectralPoint((0.0j, 1.3j)), sh) == 0.0


def test_density_nonnegative_on_grid():
    sh = SpaceShape(2, 2)
    grid = np.linspace(0.05, 4.0, 10)
    for u in grid:
        for v in grid:
            assert berezin_density(4.0, SpectralPoint((u * 1j, v * 1j)), sh) >= 0.0


def test_density_factorizes_across_modules():
    for (p, q, alpha, sig) in [
        (2, 2, 4.0, (0.7, 1.9)),
        (2, 3, 5.5, (2.4, 0.3)),
        (1, 2, 2.5, (1.1,)),
    ]:
        sh = SpaceShape(p, q)
        s = SpectralPoint(tuple(1j * v for v in sig))
        got = berezin_density(alpha, s, sh)
        want = float(np.real(power_image(s, alpha, sh))) * gk_density(s, sh)
        assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# atom coefficients


def test_residue_coeff_k0_closed_form():
    # at k = 0 the rising-factorial pair cancels completely
    for (p, q, alpha) in [(1, 2, 0.5), (2, 2, 0.3), (2, 3, 1.2)]:
        sh = SpaceShape(p, q)
        want = float(
            gamma(alpha - p + 1) ** 2
            * gamma(q - alpha) ** 2
            * rgamma(2 * sh.h - 2 * alpha)
        )
        assert residue_coeff(0, alpha, sh) == pytest.approx(want, rel=1e-13)
    assert residue_coeff(0, 0.5, SpaceShape(1, 2)) == pytest.approx(np.pi**2 / 4)


def test_residue_coeff_matches_contour_residue():
    # independent oracle: the coefficient is the residue of the
    # one-coordinate spectral weight at s = h - alpha - k
    def weight(w, alpha, sh):
        return (
            gamma(alpha - sh.h + w)
            * gamma(alpha - sh.h - w)
            * gamma(sh.r + w) ** 2
            * gamma(sh.r - w) ** 2
            * rgamma(2 * w)
            * rgamma(-2 * w)
        )

    cases = [
        (1, 2, 0.6, 0),
        (1, 2, -0.7, 0),
        (1, 2, -0.7, 1),
        (2, 2, 0.3, 0),
        (2, 2, 0.3, 1),
        (2, 3, 1.2, 0),
        (1, 1, -1.75, 1),
    ]
    for (p, q, alpha, k) in cases:
        sh = SpaceShape(p, q)
        w0 = sh.h - alpha - k
        oracle = contour_integral(lambda w: weight(w, alpha, sh), w0, 0.1, n=256).real
        assert residue_coeff(k, alpha, sh) == pytest.approx(oracle, rel=1e-6)


def test_residue_coeff_sign_alternation():
    # dropping the (-1)^k factor must flip c_1 relative to the oracle
    sh = SpaceShape(1, 2)
    alpha = -0.7
    c1 = residue_coeff(1, alpha, sh)
    stripped = -c1
    w0 = sh.h - alpha - 1

    def weight(w):
        return (
            gamma(alpha - sh.h + w)
            * gamma(alpha - sh.h - w)
            * gamma(sh.r + w) ** 2
            * gamma(sh.r - w) ** 2
            * rgamma(2 * w)
            * rgamma(-2 * w)
        )

    oracle = contour_integral(weight, w0, 0.1, n=256).real
    assert c1 == pytest.approx(oracle, rel=1e-10)
    assert stripped != pytest.approx(oracle, rel=1e-3)


def test_residue_coeff_pole_errors():
    with pytest.raises(ValueError):
        residue_coeff(0, 1.0, SpaceShape(2, 2))  # alpha = p - 1 - k
    with pytest.raises(ValueError):
        residue_coeff(1, -1.0, SpaceShape(1, 2))  # alpha = p - 1 - k - 1
    with pytest.raises(ValueError):
        residue_coeff(1, 0.5, SpaceShape(1, 2))  # rising-factorial zero
    with pytest.raises(ValueError):
        residue_coeff(-1, 2.0, SpaceShape(1, 2))


# ---------------------------------------------------------------------------
# measure assembly


def test_assemble_no_atoms_above_threshold():
    m = assemble_measure(4.0, SpaceShape(2, 2))
    assert m.atoms == ()
    assert m.continuous_coefficient > 0.0


def test_assemble_single_atom_case():
    m = assemble_measure(0.6, SpaceShape(1, 2))
    assert len(m.atoms) == 1
    plane = m.atoms[0]
    assert plane.kvec == (0,)
    assert plane.locations == pytest.approx((0.4,))
    want = residue_coeff(0, 0.6, SpaceShape(1, 2)) * float(rgamma(0.6)) ** 2
    assert plane.coefficient == pytest.approx(want, rel=1e-13)


def test_assemble_plane_enumeration():
    m = assemble_measure(0.2, SpaceShape(2, 2))
    assert sorted(pl.kvec for pl in m.atoms) == [(0,), (1,), (1, 0)]
    for pl in m.atoms:
        assert isinstance(pl.coefficient, float) and math.isfinite(pl.coefficient)


def test_assemble_negative_integer_alpha_is_purely_atomic():
    m = assemble_measure(-2.0, SpaceShape(1, 1))
    assert m.continuous_coefficient == 0.0
    weights = {pl.kvec[0]: pl.coefficient for pl in m.atoms}
    assert weights[0] == pytest.approx(1.0 / 6.0)
    assert weights[1] == pytest.approx(1.0 / 2.0)
    assert weights[2] == pytest.approx(1.0 / 3.0)
    assert sum(weights.values()) == pytest.approx(1.0)


def test_assemble_integer_alpha_mixed_plane_limit():
    # at alpha = 1 the continuous stratum dies and the single surviving
    # plane's 0*inf coefficient has the finite limit 1/(2 pi)
    m = assemble_measure(1.0, SpaceShape(2, 2))
    assert m.continuous_coefficient == 0.0
    assert len(m.atoms) == 1
    assert m.atoms[0].kvec == (0,)
    assert m.atoms[0].coefficient == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-13)


def test_continuous_density_matches_raw_density():
    # for alpha > h the measure's continuous stratum is the raw density
    # times the derived inversion constant
    sh = SpaceShape(2, 2)
    alpha = 4.0
    m = assemble_measure(alpha, sh)
    kappa_const = m.continuous_coefficient
    for sig in [(0.7, 1.9), (2.4, 0.3)]:
        raw = berezin_density(alpha, SpectralPoint(tuple(1j * v for v in sig)), sh)
        pref = float(rgamma(alpha)) ** 2 * float(rgamma(alpha - 1)) ** 2
        got = m.continuous_density(np.array(sig))
        assert got == pytest.approx(kappa_const / pref * raw, rel=1e-12)


def test_atom_weight_function_values():
    m = assemble_measure(0.6, SpaceShape(1, 2))
    plane = m.atoms[0]
    # residual dimension zero: the weight is the bare coefficient
    assert plane.weight(np.zeros((0,))) == pytest.approx(plane.coefficient)


# ---------------------------------------------------------------------------
# reconstruction


def test_reconstruct_rank_one_continuous():
    got = reconstruct(3.0, [2.0], SpaceShape(1, 1))
    assert got == pytest.approx(3.0**-3, abs=1e-5)


def test_reconstruct_single_atom_case():
    got = reconstruct(0.6, [1.0], SpaceShape(1, 2))
    assert got == pytest.approx(2.0**-0.6, abs=1e-4)


def test_reconstruct_origin_is_exactly_one():
    assert reconstruct(0.6, [0.0], SpaceShape(1, 2)) == 1.0
    assert reconstruct(4.0, (0.0, 0.0), SpaceShape(2, 2)) == 1.0


def test_reconstruct_purely_atomic_polynomial():
    # alpha = -2 makes the target (1+x)^2, resolved by three atoms alone
    for xv in [0.5, 2.0, 7.0]:
        got = reconstruct(-2.0, [xv], SpaceShape(1, 1))
        assert got == pytest.approx((1.0 + xv) ** 2, rel=1e-10)


def test_reconstruct_integer_alpha_mixed_plane():
    got = reconstruct(1.0, (0.7, 0.2), SpaceShape(2, 2))
    assert got == pytest.approx(1.0 / (1.7 * 1.2), rel=1e-8)


def test_reconstruct_p2_continuous():
    got = reconstruct(4.0, (1.5, 0.5), SpaceShape(2, 2))
    assert got == pytest.approx((2.5 * 1.5) ** -4.0, rel=1e-8)


def test_reconstruct_continuous_across_threshold():
    # the measure family has no jump at alpha = h: the defect against the
    # closed form stays tiny on both sides, and at small x the two
    # reconstructions themselves stay close
    sh = SpaceShape(1, 2)
    lo = reconstruct(0.95, [1.0], sh)
    hi = reconstruct(1.05, [1.0], sh)
    assert abs(lo - 2.0**-0.95) < 1e-4
    assert abs(hi - 2.0**-1.05) < 1e-4
    lo_s = reconstruct(0.95, [0.05], sh)
    hi_s = reconstruct(1.05, [0.05], sh)
    assert abs(lo_s - hi_s) < 5e-3


def test_reconstruct_rejects_large_p_and_ties():
    with pytest.raises(ValueError):
        reconstruct(5.0, [1.0, 0.5, 0.2], SpaceShape(3, 3))
    with pytest.raises(ValueError):
        reconstruct(4.0, (1.0, 1.0), SpaceShape(2, 2))


def test_reconstruct_accepts_config():
    got = reconstruct(3.0, [2.0], SpaceShape(1, 1), QuadConfig(panels=8))
    assert got == pytest.approx(3.0**-3, abs=1e-4)
