"""Spectral measure of the distinguished power-weight matrix element.

For a large deformation parameter the matrix element
``prod_k (1+x_k)^(-alpha)`` expands against the radial spherical
functions with a purely continuous density on the imaginary spectral
axes.  As ``alpha`` decreases past ``h = (q+p-1)/2`` the gamma factors
of that density develop poles that cross the integration axis; pushing
the contour through each crossing converts it into a point mass.  This
module evaluates the continuous density, the closed-form coefficients
of the point masses, and assembles the resulting measure as a finite
list of "planes" (some spectral coordinates frozen at real points, the
rest still integrated over the imaginary axis).  ``reconstruct``
integrates the spherical function against the assembled measure and
returns the ratio to the measure's total mass, so the value at ``x = 0``
is exactly 1.

Conventions
-----------
* Continuous coordinates are parametrized as ``s = i*sigma`` with
  ``sigma >= 0``; all densities are reported with respect to Lebesgue
  measure ``d sigma`` on the positive cone, with the fold over sign
  choices and coordinate order already included in the coefficients.
* An atom plane freezes ``len(kvec)`` coordinates at the real points
  ``s = h - alpha - k`` for a strictly decreasing tuple of admissible
  nonnegative integers ``k`` (admissible means ``k < h - alpha``).
* Every constant is derived from the inverse-transform normalization;
  nothing is fitted.  At integer ``alpha`` the naive coefficient
  formulas degenerate to 0*inf, and the exact limits are taken by
  cancelling the offending linear factors symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .ball import SpaceShape
from .hyperfun import gamma, gamma_abs2, pochhammer, rgamma
from .quad import QuadConfig, axis_rule
from .spherical import (
    SpectralPoint,
    _kappa0,
    _radial_array,
    _spectral_array,
    bk_column_matrix,
    bk_kernel,
    spherical_calibration_constant,
    spherical_fn,
    vandermonde,
)

_TWO_PI = 2.0 * np.pi

__all__ = [
    "AtomPlane",
    "PlancherelMeasure",
    "assemble_measure",
    "berezin_density",
    "reconstruct",
    "residue_coeff",
]


def _near_nonpos_int(v: float, tol: float = 1e-9) -> int | None:
    """Return n >= 0 when v is numerically the nonpositive integer -n."""
    if v > tol:
        return None
    n = round(v)
    if abs(v - n) < tol:
        return int(-n)
    return None


def _axis_weight(sigma: np.ndarray, alpha: float, shape: SpaceShape) -> np.ndarray:
    """One-coordinate continuous weight at s = i*sigma.

    The squared modulus of Gamma(alpha - h + i sigma) times the
    Gindikin-Karpelevich factor; the building block every plane's
    continuous coordinates share.
    """
    sigma = np.asarray(sigma, dtype=float)
    gk = gamma_abs2(shape.r + 1j * sigma) ** 2 * np.abs(rgamma(2j * sigma)) ** 2
    return gamma_abs2(alpha - shape.h + 1j * sigma) * gk


def berezin_density(alpha: float, s, shape: SpaceShape):
    """Continuous spectral density at imaginary s, valid for alpha > h.

    The product of the deformation gamma factors and the
    Gindikin-Karpelevich density, assembled inline so that tests can
    compare it against the transform-side factorization.  Normalized as
    a bare density (no inversion constants); nonnegative on imaginary
    tuples for real alpha.
    """
    alpha = float(alpha)
    if alpha <= shape.h:
        raise ValueError(
            f"continuous-density regime requires alpha > h = {shape.h}; got {alpha}"
        )
    arr = _spectral_array(s, shape.p)
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr.real)) > 1e-12 * scale:
        raise ValueError("density is defined on purely imaginary spectral tuples")
    sig = arr.imag
    pref = np.prod([float(rgamma(alpha - j)) ** 2 for j in range(shape.p)])
    w = np.prod(_axis_weight(sig, alpha, shape), axis=-1)
    vdm2 = vandermonde(sig**2) ** 2
    return pref * w * vdm2


def residue_coeff(k: int, alpha: float, shape: SpaceShape) -> float:
    """Coefficient of the point mass the contour picks up at s = h-alpha-k.

    Equal to the residue of the one-coordinate spectral weight at that
    point (the tests verify this against a small-circle contour
    integral).  The raw gamma-ratio form contains a removable
    ``Gamma(2a+k)/Gamma(2a+2k)`` pair; it is evaluated here as a rising
    factorial so the only genuine poles are the ones reported.
    """
    if k < 0 or k != int(k):
        raise ValueError("atom index k must be a nonnegative integer")
    k = int(k)
    alpha = float(alpha)
    p, q, h = shape.p, shape.q, shape.h
    a1 = alpha - p + 1 + k
    n = _near_nonpos_int(a1)
    if n is not None:
        raise ValueError(
            f"atom coefficient pole: alpha = {p - 1 - k - n} lies on the pole"
            f" ladder alpha = {p - 1 - k}, {p - 2 - k}, ..."
        )
    a2 = q - alpha - k
    if _near_nonpos_int(a2) is not None:
        raise ValueError(f"atom coefficient pole at alpha = {alpha} (second factor)")
    poch = float(pochhammer(2.0 * alpha - 2.0 * h + k, k))
    if poch == 0.0:
        raise ValueError(f"atom coefficient pole at alpha = {alpha} (half-integer ladder)")
    return (
        (-1.0) ** k
        * float(gamma(a1)) ** 2
        * float(gamma(a2)) ** 2
        * float(rgamma(2.0 * h - 2.0 * alpha - 2.0 * k))
        / (math.factorial(k) * poch)
    )


def _atom_factor(k: int, alpha: float, shape: SpaceShape) -> float:
    """The part of the atom coefficient with no poles at small integer alpha.

    ``residue_coeff`` factors as ``Gamma^2(alpha-p+1+k)`` times this; the
    squared gamma is handled jointly with the measure's normalizing
    ``1/Gamma^2(alpha-j)`` factors so their zeros and poles cancel
    exactly.
    """
    p, q, h = shape.p, shape.q, shape.h
    a2 = q - alpha - k
    if _near_nonpos_int(a2) is not None:
        raise ValueError(f"atom weight pole at alpha = {alpha}")
    poch = float(pochhammer(2.0 * alpha - 2.0 * h + k, k))
    if poch == 0.0:
        raise ValueError(f"atom weight pole at alpha = {alpha}")
    return (
        (-1.0) ** k
        * float(gamma(a2)) ** 2
        * float(rgamma(2.0 * h - 2.0 * alpha - 2.0 * k))
        / (math.factorial(k) * poch)
    )


def _gamma_square_ratio(kvec: Sequence[int], alpha: float, shape: SpaceShape) -> float:
    """lim of prod_j Gamma^2(alpha-p+1+k_j) / prod_{j<p} Gamma^2(alpha-j).

    All gamma arguments are integer offsets of alpha, so the ratio is an
    entire-function-times-rational expression: a power of the reciprocal
    gamma at the lowest offset times explicit linear factors.  Cancelling
    the factor multisets exactly gives the correct finite limit at
    integer alpha, where individual factors vanish or blow up.
    """
    p = shape.p
    m = len(kvec)
    num = [int(kj) + 1 - p for kj in kvec]
    den = [-j for j in range(p)]
    lo = min(num + den)
    hi = max(num + den)
    count = np.zeros(hi - lo, dtype=int)
    for nn in num:
        count[: nn - lo] += 2
    for nn in den:
        count[: nn - lo] -= 2
    expo = 2 * (p - m)
    z0 = alpha + lo
    n0 = _near_nonpos_int(z0)
    out = 1.0
    zero_order = 0
    if n0 is not None:
        # rgamma(z)^expo vanishes to order expo at z = -n0 with local slope
        # (-1)^n0 * n0!; fold that zero into the linear-factor bookkeeping.
        out *= ((-1.0) ** n0 * math.factorial(n0)) ** expo
        zero_order += expo
    else:
        out *= float(rgamma(z0)) ** expo
    for t, c in enumerate(count):
        c = int(c)
        if c == 0:
            continue
        if n0 is not None and t == n0:
            zero_order += c
            continue
        out *= (z0 + t) ** c
    if n0 is not None:
        if zero_order < 0:
            raise ValueError(f"assembled measure has a pole at alpha = {alpha}")
        if zero_order > 0:
            return 0.0
    return out


@dataclass(frozen=True)
class AtomPlane:
    """One stratum of the measure with some coordinates frozen.

    ``kvec`` is strictly decreasing; coordinate j of the plane sits at
    the real spectral point ``locations[j] = h - alpha - kvec[j]``.  The
    ``weight`` callable maps sigma-arrays of shape (..., residual) for
    the remaining imaginary coordinates to the plane's density with
    respect to Lebesgue measure on the residual positive cone (all
    constants and the squared-difference coupling to the frozen
    coordinates included).  ``coefficient`` is the constant prefactor of
    that density.
    """

    kvec: tuple[int, ...]
    locations: tuple[float, ...]
    coefficient: float
    weight: Callable[[np.ndarray], np.ndarray]

    @property
    def order(self) -> int:
        return len(self.kvec)


@dataclass(frozen=True)
class PlancherelMeasure:
    """Assembled spectral measure: continuous stratum plus atom planes.

    ``continuous_density`` maps sigma-arrays of shape (..., p), the
    imaginary parts of the spectral point, to the fully normalized
    density of the stratum with no frozen coordinates;
    ``continuous_coefficient`` is its constant prefactor (zero when the
    continuous spectrum is absent, e.g. at small integer alpha).
    Integrating the spherical function against the whole measure
    reproduces ``prod (1+x_k)^(-alpha)``.
    """

    alpha: float
    shape: SpaceShape
    continuous_coefficient: float
    continuous_density: Callable[[np.ndarray], np.ndarray]
    atoms: tuple[AtomPlane, ...]


def _admissible_atoms(alpha: float, shape: SpaceShape) -> list[int]:
    out = []
    k = 0
    while k < shape.h - alpha - 1e-12:
        out.append(k)
        k += 1
    return out


def assemble_measure(alpha: float, shape: SpaceShape) -> PlancherelMeasure:
    """Build the full spectral measure of the power-weight element.

    Enumerates every stratum: the continuous one, and one plane for each
    strictly decreasing tuple of admissible atom indices (planes whose
    limit coefficient vanishes, as happens at small integer alpha, are
    dropped).  For alpha > h the atom list is empty.
    """
    alpha = float(alpha)
    p = shape.p
    kappa = spherical_calibration_constant(shape)

    c_cont = _gamma_square_ratio((), alpha, shape) / (
        math.factorial(p) * _TWO_PI**p * kappa
    )

    def continuous_density(sig: np.ndarray, _c=c_cont) -> np.ndarray:
        sig = np.asarray(sig, dtype=float)
        w = np.prod(_axis_weight(sig, alpha, shape), axis=-1)
        return _c * w * vandermonde(sig**2) ** 2

    planes: list[AtomPlane] = []
    ks = _admissible_atoms(alpha, shape)
    for m in range(1, min(p, len(ks)) + 1):
        for combo in combinations(ks, m):
            kvec = tuple(sorted(combo, reverse=True))
            ratio = _gamma_square_ratio(kvec, alpha, shape)
            if ratio == 0.0:
                continue
            coef = ratio
            for kj in kvec:
                coef *= _atom_factor(kj, alpha, shape)
            coef /= math.factorial(p - m) * _TWO_PI ** (p - m) * kappa
            if coef == 0.0:
                continue
            locations = tuple(shape.h - alpha - kj for kj in kvec)
            y_atoms = np.array([a * a for a in locations])

            def weight(sig, _c=coef, _ya=y_atoms):
                sig = np.asarray(sig, dtype=float)
                w = np.prod(_axis_weight(sig, alpha, shape), axis=-1) if sig.shape[-1] else 1.0
                y_all = np.concatenate(
                    [np.broadcast_to(_ya, sig.shape[:-1] + _ya.shape), -(sig**2)], axis=-1
                )
                return _c * w * vandermonde(y_all) ** 2

            planes.append(AtomPlane(kvec, locations, coef, weight))

    return PlancherelMeasure(alpha, shape, c_cont, continuous_density, tuple(planes))


def _plane_value_mass(
    plane: AtomPlane,
    x: np.ndarray,
    shape: SpaceShape,
    rule,
    alpha: float,
    want_value: bool,
) -> tuple[float, float]:
    """Integral of the spherical function against one plane, plus its mass."""
    p = shape.p
    m = plane.order
    locs = np.asarray(plane.locations)
    y_at = locs**2
    if m == p:
        vdm2 = float(vandermonde(y_at) ** 2) if p > 1 else 1.0
        mass = plane.coefficient * vdm2
        if not want_value:
            return 0.0, mass
        phi = spherical_fn(SpectralPoint(tuple(locs)), x, shape).real
        return mass * phi, mass
    # exactly one residual continuous coordinate at desk scale (p <= 2)
    sig = rule.nodes
    g = _axis_weight(sig, alpha, shape) * rule.weights
    vdm2 = (y_at[0] + sig**2) ** 2
    mass = plane.coefficient * float(np.sum(g * vdm2))
    if not want_value:
        return 0.0, mass
    if p == 1:
        raise AssertionError("unreachable: p = 1 planes are fully atomic")
    # fused form: Phi * (y_a - y_s)^2 = kappa0 * det{phi} * (y_s - y_a) / V(x)
    phi_a = np.array([float(np.real(bk_kernel(locs[0], xv, shape))) for xv in x])
    kcol = bk_column_matrix(sig, x, shape)
    det = phi_a[0] * kcol[:, 1] - phi_a[1] * kcol[:, 0]
    yd = -(sig**2) - y_at[0]
    tot = float(np.sum(g * det * yd))
    value = plane.coefficient * _kappa0(shape) * tot / float(x[1] - x[0])
    return value, mass


def reconstruct(
    alpha: float,
    x,
    shape: SpaceShape,
    config: QuadConfig | None = None,
) -> float:
    """Integrate the spherical function against the assembled measure.

    Returns the integral divided by the measure's total mass (the same
    sum with the spherical function replaced by its value 1 at the
    origin), so ``x = 0`` maps to exactly 1 and quadrature bias common
    to both cancels.  For the measure to be correctly assembled the
    result must equal ``prod (1+x_k)^(-alpha)``.  Supports p <= 2; the
    two-coordinate path fuses the determinant form of the spherical
    function with the squared-difference coupling, which requires
    distinct coordinates (the origin is special-cased).
    """
    alpha = float(alpha)
    p = shape.p
    if p > 2:
        raise ValueError("measure verification is implemented for p <= 2")
    x = _radial_array(x, p)
    config = config or QuadConfig()
    measure = assemble_measure(alpha, shape)
    rule = axis_rule(config)
    sig = rule.nodes

    at_origin = bool(np.all(x == 0.0))
    if p == 2 and not at_origin and x[0] == x[1]:
        raise ValueError("tied nonzero coordinates are not supported at p = 2")

    value = 0.0
    mass = 0.0

    g = _axis_weight(sig, alpha, shape) * rule.weights
    if measure.continuous_coefficient != 0.0:
        if p == 1:
            cont_mass = measure.continuous_coefficient * float(np.sum(g))
            mass += cont_mass
            if not at_origin:
                phi = np.real(bk_kernel(1j * sig, x[0], shape))
                value += measure.continuous_coefficient * float(np.sum(g * phi))
            else:
                value += cont_mass
        else:
            svdm = sig[:, None] ** 2 - sig[None, :] ** 2
            mass += measure.continuous_coefficient * float(
                np.einsum("ab,a,b->", svdm**2, g, g)
            )
            if not at_origin:
                kcol = bk_column_matrix(sig, x, shape)
                det = np.outer(kcol[:, 0], kcol[:, 1]) - np.outer(kcol[:, 1], kcol[:, 0])
                tot = np.einsum("ab,ab,a,b->", det, svdm, g, g)
                value += (
                    measure.continuous_coefficient
                    * _kappa0(shape)
                    * float(tot)
                    / float(x[1] - x[0])
                )
            else:
                value += measure.continuous_coefficient * float(
                    np.einsum("ab,a,b->", svdm**2, g, g)
                )

    for plane in measure.atoms:
        pv, pm = _plane_value_mass(plane, x, shape, rule, alpha, not at_origin)
        mass += pm
        value += pm if at_origin else pv

    if mass == 0.0:
        raise ValueError("assembled measure has zero mass")
    return value / mass
