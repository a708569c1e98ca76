"""Expansion of prod_j (1 + x_j)^N in compact-side spherical functions.

On the cube [-1, 0]^p the determinant-form spherical functions taken at
the negative integer-offset spectral labels s_j = -(r + m_j), with
strictly decreasing band labels m_1 > ... > m_p >= 0, are symmetric
polynomials: every hypergeometric column terminates.  The power
function expands over these bands with an explicit Gamma-product
coefficient (the Pickrell expansion).  For nonnegative integer N the
reciprocal-gamma factor 1/Gamma(N + p - m_1) kills every band above
m_1 = N + p - 1, so the identity is a finite polynomial identity that
holds to machine precision; for non-integer N > -1 the coefficients
alternate in sign and decay polynomially in the band index, and the
truncated sum carries an explicit tail estimate.

The coefficients also have an independent quadrature route: the bands
are orthogonal on the cube under

    d sigma(x) = prod_k (-x_k)^(q-p) * prod_{k<l} (x_k - x_l)^2 dx,

so each coefficient equals the inner product of the power function with
its band, normalized by the band's squared norm.  ``sigma_coefficient_
oracle`` computes that ratio by quadrature and is the oracle for the
Gamma-product formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import gammaln

from .ball import PSD_RELATIVE_FLOOR, PsdReport, SpaceShape
from .quad import QuadConfig, QuadratureRule, interval_rule
from .spherical import SpectralPoint, _kappa0, _radial_array, bk_kernel, spherical_fn

__all__ = [
    "PickrellTerm",
    "band_coefficient",
    "compact_gram_psd",
    "compact_spectral_point",
    "pickrell_coeffs",
    "pickrell_eval",
    "sigma_coefficient_oracle",
]

#: number of top bands pooled into the truncation-tail estimate
TAIL_BANDS = 5

_LOG_PI = math.log(math.pi)


# ---------------------------------------------------------------------------
# band labels


def _band_tuple(m, p: int) -> tuple[int, ...]:
    """Normalize a band label to a strictly decreasing nonneg int tuple."""
    if isinstance(m, (int, np.integer)):
        m = (m,)
    vals = []
    for v in m:
        iv = int(v)
        if iv != v:
            raise ValueError("band labels must be integers")
        vals.append(iv)
    if len(vals) != p:
        raise ValueError(f"band must carry {p} labels")
    if any(v < 0 for v in vals):
        raise ValueError("band labels must be nonnegative")
    if any(vals[i] <= vals[i + 1] for i in range(p - 1)):
        raise ValueError("band labels must strictly decrease")
    return tuple(vals)


@dataclass(frozen=True)
class PickrellTerm:
    """One band of the expansion: labels m_1 > ... > m_p >= 0 and weight.

    The lowest band m = (p-1, ..., 1, 0) is the constant function; for
    nonnegative integer N all coefficients above m_1 = N + p - 1 are
    exactly zero.
    """

    m: tuple
    coefficient: float

    def __post_init__(self):
        m = (self.m,) if isinstance(self.m, (int, np.integer)) else tuple(self.m)
        object.__setattr__(self, "m", _band_tuple(m, len(m)))
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def band(self) -> int:
        return self.m[0]


def compact_spectral_point(m, shape: SpaceShape) -> SpectralPoint:
    """Spectral labels s_j = -(r + m_j) of the band m.

    At these points r + s_j = -m_j is a nonpositive integer, so every
    kernel column is a polynomial of degree m_j and the spherical
    function is a symmetric polynomial on the cube.
    """
    m = _band_tuple(m, shape.p)
    return SpectralPoint(tuple(-(shape.r + mj) for mj in m))


# ---------------------------------------------------------------------------
# the Gamma-product coefficient


def _log_rgamma_shift(base: float, mj: int):
    """(log|1/Gamma(base - mj)|, sign) for integer mj >= 0.

    Returns (None, 0.0) when the reciprocal gamma vanishes, which
    happens exactly for integer base with base - mj <= 0.  For
    non-integer base left of the poles the reflection form keeps the
    magnitude in log scale, with the sine factor reduced exactly:
    sin(pi (base - mj)) = (-1)^mj sin(pi base).
    """
    z = base - mj
    if base == round(base):
        if z <= 0.0:
            return None, 0.0
        return -float(gammaln(z)), 1.0
    if z > 0.5:
        return -float(gammaln(z)), 1.0
    s = math.sin(math.pi * base) * (1.0 if mj % 2 == 0 else -1.0)
    return float(gammaln(1.0 - z)) + math.log(abs(s)) - _LOG_PI, math.copysign(1.0, s)


def band_coefficient(N: float, m, shape: SpaceShape) -> float:
    """Coefficient of band m in the expansion of prod (1 + x_j)^N.

    The value is

        prod_{j=1..p} Gamma(N+j)^2 / ((j-1)! (q-p+j-1)!)
        * prod_j (2 m_j + q - p + 1) ((q-p+m_j)!)^2
                 / ((m_j!)^2 Gamma(N+q+m_j+1) Gamma(N+p-m_j))
        * prod_{k<l} (m_k - m_l)^2 (m_k + m_l + q - p + 1)^2,

    assembled in log scale so that high bands (where the two Gamma
    factors are astronomically large and small) stay finite.  Exact
    zeros of 1/Gamma(N+p-m_j) at integer N are returned as exact 0.0.

    The shape constant prod_j 1/((j-1)!(q-p+j-1)!) is pinned by three
    independent routes: the expansion must send N = 0 to the constant
    band with weight 1 (partition of unity at x = 0), every band weight
    must match the residue-atom sector of the spectral measure at the
    matching negative parameter, and the d-sigma quadrature projection
    must recover the same numbers.  All three agree on every desk
    shape.  The constant equals the jet normalization of the spherical
    determinant times ((q-p)!)^p, which is exactly what converts the
    squared pair product above into the spectral Vandermonde
    prod_{k<l} (s_k^2 - s_l^2) of the band labels s_j = -(r + m_j).
    """
    if not N > -1.0:
        raise ValueError("the expansion requires N > -1")
    p, q = shape.p, shape.q
    d = q - p
    m = _band_tuple(m, p)
    logmag = 0.0
    sign = 1.0
    for j in range(1, p + 1):
        logmag += 2.0 * float(gammaln(N + j)) - float(gammaln(j)) - float(gammaln(d + j))
    for mj in m:
        lg, sg = _log_rgamma_shift(N + p, mj)
        if lg is None:
            return 0.0
        logmag += lg
        sign *= sg
        logmag += math.log(2 * mj + d + 1)
        logmag += 2.0 * (float(gammaln(d + mj + 1)) - float(gammaln(mj + 1)))
        logmag -= float(gammaln(N + q + mj + 1))
    for k in range(p):
        for l in range(k + 1, p):
            logmag += 2.0 * (math.log(m[k] - m[l]) + math.log(m[k] + m[l] + d + 1))
    return sign * math.exp(logmag)


def pickrell_coeffs(N: float, shape: SpaceShape, m_bound: int = 40) -> list:
    """All band terms with m_1 <= m_bound, in lexicographic band order.

    For nonnegative integer N the list contains the exact zeros above
    m_1 = N + p - 1 (so truncation never loses mass); for non-integer
    N > -1 every retained band carries a nonzero alternating weight.
    """
    if not N > -1.0:
        raise ValueError("the expansion requires N > -1")
    if m_bound < shape.p - 1:
        raise ValueError("m_bound must admit at least the constant band")
    terms = []
    for combo in combinations(range(m_bound + 1), shape.p):
        m = tuple(sorted(combo, reverse=True))
        terms.append(PickrellTerm(m, band_coefficient(N, m, shape)))
    terms.sort(key=lambda t: t.m)
    return terms


# ---------------------------------------------------------------------------
# evaluation on the cube


def pickrell_eval(
    N: float,
    x,
    shape: SpaceShape,
    m_bound: int = 40,
    return_tail: bool = False,
):
    """Truncated band sum approximating prod (1 + x_j)^N on [-1, 0]^p.

    With ``return_tail=True`` the result is a ``(value, tail)`` pair,
    where the tail estimate pools the absolute contributions of the
    last ``TAIL_BANDS`` retained bands — a deliberate overestimate of
    the remainder of the alternating, polynomially decaying series.
    For nonnegative integer N the sum is finite and the tail is zero
    once m_bound reaches N + p - 1.
    """
    arr = _radial_array(x, shape.p, lo=-1.0)
    if np.any(arr > 0.0):
        raise ValueError("compact radial coordinates lie in [-1, 0]")
    total = 0.0
    band_mag: dict = {}
    for term in pickrell_coeffs(N, shape, m_bound):
        if term.coefficient == 0.0:
            continue
        s = np.array([-(shape.r + mj) for mj in term.m], dtype=complex)
        phi = complex(spherical_fn(s, arr, shape)).real
        contrib = term.coefficient * phi
        total += contrib
        band_mag[term.band] = band_mag.get(term.band, 0.0) + abs(contrib)
    tail = sum(band_mag.get(b, 0.0) for b in range(m_bound - TAIL_BANDS + 1, m_bound + 1))
    if return_tail:
        return total, tail
    return total


# ---------------------------------------------------------------------------
# quadrature oracle for the coefficients


def _band_columns(m, t: np.ndarray, shape: SpaceShape):
    """Kernel columns phi_{s_j}(t) on the nodes and the spread of s^2."""
    cols = [np.real(np.asarray(bk_kernel(-(shape.r + mj), t, shape))) for mj in m]
    y = [(shape.r + mj) ** 2 for mj in m]
    return cols, y


def _band_inner(ma, mb, shape: SpaceShape, rule: QuadratureRule) -> float:
    """<Phi_a, Phi_b> over the full cube under d sigma.

    For p = 2 the spherical factors are kept in determinant form, so the
    (x_1 - x_2)^2 of the measure cancels the Vandermonde denominators
    and the summand is a smooth tensor-grid expression.
    """
    t, w = rule.nodes, rule.weights
    d = shape.q - shape.p
    u0 = w * (-t) ** d
    if shape.p == 1:
        (ca,), _ = _band_columns(ma, t, shape)
        (cb,), _ = _band_columns(mb, t, shape)
        return float(np.sum(u0 * ca * cb))
    (a1, a2), ya = _band_columns(ma, t, shape)
    (b1, b2), yb = _band_columns(mb, t, shape)
    det_a = np.outer(a1, a2) - np.outer(a2, a1)
    det_b = np.outer(b1, b2) - np.outer(b2, b1)
    k0 = _kappa0(shape)
    scale = k0 * k0 / ((ya[1] - ya[0]) * (yb[1] - yb[0]))
    return float(scale * np.einsum("i,j,ij,ij->", u0, u0, det_a, det_b))


def _power_inner(N: float, m, shape: SpaceShape, rule: QuadratureRule) -> float:
    """<prod (1+x)^N, Phi_m> over the full cube under d sigma."""
    t, w = rule.nodes, rule.weights
    d = shape.q - shape.p
    u = w * (1.0 + t) ** N * (-t) ** d
    if shape.p == 1:
        (c,), _ = _band_columns(m, t, shape)
        return float(np.sum(u * c))
    (b1, b2), y = _band_columns(m, t, shape)
    det_b = np.outer(b1, b2) - np.outer(b2, b1)
    dt = -np.subtract.outer(t, t)  # dt[i, j] = t_j - t_i
    scale = _kappa0(shape) / (y[1] - y[0])
    return float(scale * np.einsum("i,j,ij,ij->", u, u, det_b, dt))


def sigma_coefficient_oracle(N: float, m, shape: SpaceShape, config: QuadConfig | None = None) -> float:
    """Band coefficient recovered by quadrature instead of Gamma products.

    Projects prod (1 + x_j)^N onto the band-m spherical function under
    d sigma on [-1, 0]^p and normalizes by the band's squared norm.
    The interval rule is graded toward both endpoints, which resolves
    the (1 + x)^N edge for non-integer N > -1 alongside the (-x)^(q-p)
    weight at the origin.
    """
    if shape.p > 2:
        raise ValueError("the quadrature oracle is implemented for p <= 2")
    if not N > -1.0:
        raise ValueError("the expansion requires N > -1")
    cfg = config if config is not None else QuadConfig()
    rule = interval_rule(-1.0, 0.0, cfg, graded=True)
    m = _band_tuple(m, shape.p)
    return _power_inner(N, m, shape, rule) / _band_inner(m, m, shape, rule)


# ---------------------------------------------------------------------------
# positivity of the compact kernel


def compact_gram_psd(N, points, shape: SpaceShape) -> PsdReport:
    """Eigenvalue verdict on the det(1 + z u*)^N Gram matrix.

    The compact kernel is a polynomial in the matrix entries, defined
    and positive definite for arbitrary p x q complex matrices — the
    points are not restricted to the ball (BallPoint instances are
    unwrapped, raw arrays accepted as-is).  The verdict convention is
    the shared eigenvalue-floor test of the ball kernels.
    """
    if N != int(N) or N < 0:
        raise ValueError("the compact kernel exponent must be a nonnegative integer")
    n_pow = int(N)
    mats = []
    for z in points:
        zz = np.asarray(getattr(z, "z", z), dtype=complex)
        if zz.shape != (shape.p, shape.q):
            raise ValueError(f"points must be {shape.p} x {shape.q} matrices")
        mats.append(zz)
    n = len(mats)
    eye = np.eye(shape.p, dtype=complex)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            val = np.linalg.det(eye + mats[i] @ mats[j].conj().T) ** n_pow
            g[i, j] = val
            g[j, i] = np.conj(val)
    eigs = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    min_eig = float(eigs[0])
    max_eig = float(np.max(np.abs(eigs)))
    verdict = "psd" if min_eig >= -PSD_RELATIVE_FLOOR * max(max_eig, 1e-300) else "indefinite"
    return PsdReport(verdict, min_eig, max_eig, n)
