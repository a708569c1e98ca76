"""Combinatorial layer: partitions, Schur polynomials, jets, derivative minors."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ballharmonics.symfun import (
    Partition,
    PolyJet,
    apply_minor,
    as_parts,
    det_inv_jet,
    hua_coeff,
    partitions_up_to,
    schur,
    var_index,
    weyl_dim,
)

RNG = np.random.default_rng(88)


def test_partitions_up_to_order_and_count():
    parts = partitions_up_to(2, 4)
    expected = [(), (1,), (2,), (1, 1), (3,), (2, 1), (4,), (3, 1), (2, 2)]
    assert [p.parts for p in parts] == expected


def test_partitions_respect_length_bound():
    parts = partitions_up_to(3, 3)
    assert (1, 1, 1) in [p.parts for p in parts]
    assert all(len(p) <= 3 for p in parts)


def test_as_parts_strips_zeros():
    assert as_parts((3, 1, 0, 0)) == (3, 1)
    assert as_parts(Partition((2, 2))) == (2, 2)


def test_schur_small_cases():
    y = np.array([0.7, -0.3, 0.2])
    assert np.isclose(schur((1,), y), y.sum())
    e2 = y[0] * y[1] + y[0] * y[2] + y[1] * y[2]
    h2 = (y.sum() ** 2 + (y**2).sum()) / 2.0
    assert np.isclose(schur((1, 1), y), e2)
    assert np.isclose(schur((2,), y), h2)


def test_schur_bialternant_cross_check():
    # det{y_k^{mu_j + n - j}} / det{y_k^{n - j}} at distinct points
    y = np.array([0.9, 0.4, -0.6])
    n = 3
    for mu in [(2,), (2, 1), (3, 1, 1), (2, 2, 2)]:
        padded = mu + (0,) * (n - len(mu))
        num = np.linalg.det(np.array([[yk ** (padded[j] + n - 1 - j) for j in range(n)] for yk in y]))
        den = np.linalg.det(np.array([[yk ** (n - 1 - j) for j in range(n)] for yk in y]))
        assert np.isclose(schur(mu, y), num / den, rtol=1e-10)


def test_schur_stable_at_coincidences():
    y = np.array([0.5, 0.5, 0.5])
    # s_mu(t, t, t) = dim * t^{|mu|} with dim the number of SSYT = weyl_dim
    for mu in [(1,), (2, 1), (2, 2)]:
        expected = weyl_dim(mu, 3) * 0.5 ** sum(mu)
        assert np.isclose(schur(mu, y), expected, rtol=1e-12)


def test_schur_broadcasts():
    y = RNG.uniform(0, 1, size=(5, 4, 2))
    vals = schur((2, 1), y)
    assert vals.shape == (5, 4)
    assert np.isclose(vals[1, 2], schur((2, 1), y[1, 2]))


def test_weyl_dim_values():
    assert weyl_dim((), 2) == 1
    assert weyl_dim((1,), 2) == 2
    assert weyl_dim((1, 1), 2) == 1
    assert weyl_dim((2, 1, 0), 3) == 8
    assert weyl_dim((1, 1), 3) == 3


def test_hua_coeff_rank_one():
    # p = 1: coefficient of s_(m) is (alpha)_m / m!
    import math

    from ballharmonics.hyperfun import pochhammer

    alpha = 1.7
    for m in range(6):
        target = pochhammer(alpha, m) / math.factorial(m)
        assert np.isclose(hua_coeff((m,) if m else (), alpha, 1), target)


def test_hua_coeff_first_nontrivial():
    # coefficient of tr(w) in det(1-w)^{-alpha} is alpha, any p
    for p in [1, 2, 3]:
        assert np.isclose(hua_coeff((1,), 2.31, p), 2.31)


def test_hua_coeff_integer_alpha_truncates():
    # at alpha = k in {0..p-1} the coefficients vanish unless mu has <= k parts
    assert hua_coeff((1,), 0.0, 2) == 0.0
    assert hua_coeff((1, 1), 1.0, 2) == 0.0
    assert hua_coeff((3,), 1.0, 2) != 0.0


def test_det_inv_jet_rank_one_binomial():
    # p = q = 1: (1 - z conj(a))^{-k} has coefficients (k)_n conj(a)^n / n!
    import math

    a = np.array([[0.6 - 0.2j]])
    k = 1.3
    jet = det_inv_jet(a, k, 6)
    from ballharmonics.hyperfun import pochhammer

    for n in range(7):
        expected = pochhammer(k, n) * np.conj(a[0, 0]) ** n / math.factorial(n)
        assert abs(jet.coefficient((n,)) - expected) < 1e-12


def test_det_inv_jet_matches_schur_expansion():
    # det(1 - z a*)^{-alpha} = sum_mu hua_coeff(mu) s_mu(z a*): compare jets at p = q = 2
    alpha = 0.9
    a = (RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2))) * 0.4
    order = 5
    jet = det_inv_jet(a, alpha, order)

    lam_probe = (RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2))) * 0.3

    def eval_jet(j, zmat):
        vals = 0.0 + 0j
        flat = [zmat[0, 0], zmat[0, 1], zmat[1, 0], zmat[1, 1]]
        for key, cf in j.coeffs.items():
            term = cf
            for e, v in zip(key, flat):
                term *= v**e
            vals += term
        return vals

    direct = eval_jet(jet, lam_probe)

    w = lam_probe @ a.conj().T
    eig = np.linalg.eigvals(w)
    total = 0.0 + 0j
    for mu in partitions_up_to(2, order):
        total += hua_coeff(mu, alpha, 2) * schur(mu, eig)
    assert abs(direct - total) < 1e-10


def test_jet_exp_of_sum_is_product():
    j1 = PolyJet.variable(0, 2, 5).scale(0.7)
    j2 = PolyJet.variable(1, 2, 5).scale(-0.4)
    lhs = (j1 + j2).exp()
    rhs = j1.exp() * j2.exp()
    keys = set(lhs.coeffs) | set(rhs.coeffs)
    assert all(abs(lhs.coefficient(k) - rhs.coefficient(k)) < 1e-12 for k in keys)


def test_apply_minor_product_rule():
    # on the monomial z00 * z11 the 2x2 derivative minor gives 1 - 0 = 1... plus sign structure
    jet = PolyJet.variable(var_index(0, 0, 2), 4, 4) * PolyJet.variable(var_index(1, 1, 2), 4, 4)
    out = apply_minor(jet, [0, 1], [0, 1], q=2)
    assert abs(out.coefficient((0, 0, 0, 0)) - 1.0) < 1e-14
    jet2 = PolyJet.variable(var_index(0, 1, 2), 4, 4) * PolyJet.variable(var_index(1, 0, 2), 4, 4)
    out2 = apply_minor(jet2, [0, 1], [0, 1], q=2)
    assert abs(out2.coefficient((0, 0, 0, 0)) + 1.0) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
def test_schur_pieri_rank_one(m, n):
    # one variable: s_(m)(y) = y^m and products multiply
    y = np.array([0.73])
    assert np.isclose(schur((m,) if m else (), y) * schur((n,) if n else (), y), 0.73 ** (m + n))
