"""Two-route checks for the index transform layer.

Every closed form here is confronted with an independent quadrature:
polynomial images against the forward integral, the inversion constant
against its predicted 1/(2 pi), orthogonality Grams against the de
Branges-Wilson beta-type integral, and Parseval against plain x-space
inner products.
"""

import math

import numpy as np
import pytest

from ballharmonics.quad import QuadConfig
from ballharmonics.transforms import (
    CalibratedTransform,
    IndexParams,
    calibrate_kappa,
    exotic_norm_sq,
    exotic_parseval_defect,
    hahn_gram,
    index_transform,
    inverse_index_transform,
    monomial_function,
    monomial_image,
    parseval_defect,
    transform_kernel,
)

PARAMS = IndexParams(a=1.5, b=1.0, c=0.7)
CFG = QuadConfig()


def test_kernel_is_one_at_origin():
    s = np.array([0.0, 0.7, 3.0, 11.0])
    vals = transform_kernel(s, 0.0, PARAMS)
    assert np.allclose(vals, 1.0, atol=1e-14)


def test_monomial_images_match_forward_quadrature():
    sigma = np.array([0.35, 1.1, 2.6])
    for n in range(4):
        vals, errs = index_transform(monomial_function(n, PARAMS), sigma, PARAMS, CFG)
        want = monomial_image(n, sigma, PARAMS)
        rel = np.abs(vals / want - 1.0)
        assert np.max(rel) < 1e-9, (n, rel)
        assert np.max(errs) < 1e-10


def test_monomial_images_second_parameter_set():
    prm = IndexParams(a=2.2, b=0.8, c=1.4)
    sigma = np.array([0.6, 1.9])
    for n in (0, 2, 5):
        vals, _ = index_transform(monomial_function(n, prm), sigma, prm, CFG)
        want = monomial_image(n, sigma, prm)
        assert np.max(np.abs(vals / want - 1.0)) < 1e-9


def test_hahn_gram_matches_de_branges_wilson():
    prm = IndexParams(a=0.9, b=1.3, c=0.6)
    gram, diag = hahn_gram(prm, 4, CFG)
    for n in range(5):
        assert abs(gram[n, n] / diag[n] - 1.0) < 1e-9
        for m in range(n):
            assert abs(gram[n, m]) < 1e-9 * math.sqrt(diag[n] * diag[m])


def test_calibrated_kappa_is_one_over_two_pi():
    kappa, consistency = calibrate_kappa(PARAMS, CFG)
    assert abs(kappa * 2.0 * math.pi - 1.0) < 1e-8
    assert consistency < 1e-8


def test_inverse_recovers_monomials_pointwise():
    kappa, _ = calibrate_kappa(PARAMS, CFG)
    xs = np.array([0.25, 1.7, 4.2])
    for n in (0, 1):
        got, errs = inverse_index_transform(
            lambda s, n=n: monomial_image(n, s, PARAMS), xs, PARAMS, kappa, CFG
        )
        want = monomial_function(n, PARAMS)(xs)
        assert np.max(np.abs(got / want - 1.0)) < 1e-7, n
        assert np.max(errs / np.abs(want)) < 1e-7


def test_parseval_two_functions():
    tr = CalibratedTransform.build(PARAMS, CFG)
    a, b, c = PARAMS.a, PARAMS.b, PARAMS.c

    def f1(x):
        return (1.0 + x) ** (-(c + 1.0) - b)

    def f2(x):
        return (x / (1.0 + x)) * (1.0 + x) ** (-(c + 1.9) - b)

    assert tr.parseval(f1, f1) < 1e-7
    assert tr.parseval(f2, f2) < 1e-7
    assert tr.parseval(f1, f2) < 1e-7


def test_exotic_monomial_norms():
    # diagonal: spectral integral of a single monomial image
    for n in range(3):
        coeffs = [0.0] * n + [1.0]
        assert exotic_parseval_defect(coeffs, PARAMS, CFG) < 1e-8


def test_exotic_parseval_mixed_polynomial():
    assert exotic_parseval_defect([0.3, -1.2, 0.0, 2.0], PARAMS, CFG) < 1e-8


def test_exotic_norms_are_hahn_consistent():
    # || X^n ||^2 must equal hahn_norm / (Gamma(a+b+n) Gamma(a+c+n))^2,
    # the square coming from the monic normalization of the images
    from ballharmonics.hyperfun import gamma, hahn_norm

    for n in range(4):
        lhs = exotic_norm_sq(n, PARAMS)
        scale = float(gamma(PARAMS.a + PARAMS.b + n) * gamma(PARAMS.a + PARAMS.c + n))
        rhs = hahn_norm(n, PARAMS.hahn) / scale**2
        assert abs(lhs / rhs - 1.0) < 1e-13


def test_forward_rejects_nonpositive_params():
    with pytest.raises(ValueError):
        IndexParams(a=0.0, b=1.0, c=1.0)
