"""Rank-p spherical functions and the radial spherical transform.

The spherical function of the matrix ball is a ratio

    Phi_s(x) = kappa0 * det{ phi_{s_j}(x_k) } / (V(x) * V~(s^2)),

where phi_s(x) = 2F1(r+s, r-s; 2r; -x) is the rank-one kernel, V is the
Vandermonde in the radial coordinates, V~ the Vandermonde in the squared
spectral coordinates, and kappa0 the jet constant that makes
Phi_s(0) = 1.  Every quadrature route in this module multiplies the two
determinants back together before touching a node, so nothing ever
divides by a vanishing Vandermonde on a tensor grid.

Conventions (fixed once, used by the Plancherel layer as well):

* V(x) = prod_{k<l} (x_l - x_k) with ascending index order, and
  V~(y) = prod_{k<l} (y_l - y_k) for y_j = s_j^2.
* the transform is J f(s) = (1/p!) * integral over R_+^p of
  f * Phi_s * w, with radial weight w(x) = prod x^(q-p) * V(x)^2;
* the measured transform of prod (1+x_k)^(-alpha) equals
  spherical_calibration_constant(shape) * power_image(s, alpha, shape);
  the same single constant calibrates every closed-form image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ball import RadialPoint, SpaceShape
from .hyperfun import HahnParams, gamma, gamma_abs2, gauss_2f1, hahn_poly, pochhammer, rgamma
from .quad import (
    QuadConfig,
    ValueWithError,
    axis_rule,
    halfline_rule,
    integrate_cone,
)
from .symfun import as_parts, schur

__all__ = [
    "SpectralPoint",
    "CanonicalBasisElement",
    "ProductForm",
    "ThetaForm",
    "radial_weight",
    "gk_factor",
    "gk_density",
    "bk_kernel",
    "spherical_fn",
    "spherical_transform",
    "inverse_spherical_transform",
    "spherical_calibration_constant",
    "calibrate_spherical",
    "power_image",
    "canonical_basis",
    "canonical_norm",
    "canonical_image",
    "bk_column_matrix",
    "andreief_check",
    "vandermonde",
]

TWO_PI = 2.0 * np.pi


def _canonical_rep(values: Sequence[complex]) -> tuple[complex, ...]:
    """Signed-permutation representative: flip each coordinate into the
    upper half plane (right half line when real) and sort by modulus of
    the imaginary then real part."""
    out = []
    for v in values:
        v = complex(v)
        if v.imag < 0.0 or (v.imag == 0.0 and v.real < 0.0):
            v = -v
        out.append(v)
    out.sort(key=lambda v: (abs(v.imag), abs(v.real)))
    return tuple(out)


@dataclass(frozen=True)
class SpectralPoint:
    """A p-tuple of spectral coordinates with its D_p-canonical form.

    The raw values are kept exactly as given; ``canonical`` stores the
    representative under sign flips and permutations, so two points are
    equivalent iff their canonical fields agree.
    """

    s: tuple
    canonical: tuple = field(init=False)

    def __post_init__(self):
        raw = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.s, dtype=complex)))
        if not raw:
            raise ValueError("spectral point needs at least one coordinate")
        object.__setattr__(self, "s", raw)
        object.__setattr__(self, "canonical", _canonical_rep(raw))

    @classmethod
    def from_sigma(cls, sigma) -> "SpectralPoint":
        """Build the purely imaginary point s = i*sigma from real sigma."""
        sig = np.atleast_1d(np.asarray(sigma, dtype=float))
        return cls(tuple(1j * sig))

    @property
    def p(self) -> int:
        return len(self.s)

    def array(self) -> np.ndarray:
        return np.asarray(self.s, dtype=complex)


@dataclass(frozen=True)
class CanonicalBasisElement:
    """Label (mu, alpha, shape) of a canonical K-invariant basis vector.

    When alpha is one of the integers 0..p-1 only partitions supported
    on the first alpha rows label nonzero vectors, so longer partitions
    are rejected up front.
    """

    mu: tuple
    alpha: float
    shape: SpaceShape

    def __post_init__(self):
        parts = as_parts(self.mu)
        p = self.shape.p
        if len(parts) > p:
            raise ValueError(f"partition has more than p={p} parts")
        k = round(self.alpha)
        if abs(self.alpha - k) < 1e-12 and 0 <= k <= p - 1 and len(parts) > k:
            raise ValueError(
                f"alpha={self.alpha:g} admits only partitions with at most {k} parts"
            )
        object.__setattr__(self, "mu", parts)

    @property
    def padded(self) -> tuple[int, ...]:
        return self.mu + (0,) * (self.shape.p - len(self.mu))

    @property
    def exponents(self) -> tuple[int, ...]:
        """Strictly decreasing exponents mu_j + p - j, j = 1..p."""
        p = self.shape.p
        return tuple(m + p - j for j, m in enumerate(self.padded, start=1))


# ---------------------------------------------------------------------------
# coercion helpers


def _spectral_array(s, p: int) -> np.ndarray:
    if isinstance(s, SpectralPoint):
        arr = s.array()
    else:
        arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if arr.shape != (p,):
        raise ValueError(f"spectral point must have {p} coordinates")
    return arr


def _radial_array(x, p: int, lo: float = 0.0) -> np.ndarray:
    if isinstance(x, RadialPoint):
        arr = np.asarray(x.x, dtype=float)
    else:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.shape != (p,):
        raise ValueError(f"radial point must have {p} coordinates")
    if np.any(arr < lo):
        raise ValueError(f"radial coordinates must be >= {lo:g}")
    return np.sort(arr)


def vandermonde(v: np.ndarray) -> np.ndarray:
    """prod_{k<l} (v[..., l] - v[..., k]) along the last axis."""
    v = np.asarray(v)
    p = v.shape[-1]
    out = np.ones(v.shape[:-1], dtype=v.dtype)
    for k in range(p):
        for l in range(k + 1, p):
            out = out * (v[..., l] - v[..., k])
    return out


# ---------------------------------------------------------------------------
# weights and densities


def radial_weight(x, shape: SpaceShape):
    """w(x) = prod x_j^(q-p) * prod_{k<l} (x_k - x_l)^2."""
    arr = x.x if isinstance(x, RadialPoint) else np.asarray(x, dtype=float)
    arr = np.atleast_1d(arr)
    powers = np.prod(arr ** (shape.q - shape.p), axis=-1)
    return powers * vandermonde(arr) ** 2


def gk_factor(sigma, shape: SpaceShape):
    """One-coordinate spectral density |Gamma(r+i sigma)|^4 / |Gamma(2i sigma)|^2.

    Vanishes quadratically at sigma = 0 (the reciprocal gamma is exact
    there), which is what makes the tensor-grid integrals finite without
    special-casing the origin.
    """
    sig = np.asarray(sigma, dtype=float)
    return gamma_abs2(shape.r + 1j * sig) ** 2 * np.abs(rgamma(2j * sig)) ** 2


def gk_density(s, shape: SpaceShape) -> float:
    """Full spectral density on the imaginary axis.

    ``s`` must be purely imaginary; the value is the product of the
    one-coordinate factors and the squared Vandermonde in s^2.
    """
    arr = _spectral_array(s, shape.p)
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr.real)) > 1e-12 * scale:
        raise ValueError("spectral density is defined on the imaginary axis")
    sig = arr.imag
    dens = float(np.prod(gk_factor(sig, shape)))
    return dens * float(vandermonde(sig**2) ** 2)


# ---------------------------------------------------------------------------
# the rank-one kernel and the determinant-form spherical function


def bk_kernel(s, x, shape: SpaceShape, deriv: int = 0):
    """phi_s(x) = 2F1(r+s, r-s; 2r; -x), or its deriv-th x-derivative.

    The derivative uses the contiguous shift: each d/dx multiplies by
    -(r+t+s)(r+t-s)/(2r+t) and bumps all three parameters.
    """
    r = shape.r
    if deriv == 0:
        return gauss_2f1(r + s, r - s, 2.0 * r, x)
    pref = (-1.0) ** deriv
    for t in range(deriv):
        pref = pref * ((r + t) ** 2 - s * s) / (2.0 * r + t)
    if np.all(pref == 0.0):
        # the column is a polynomial of degree < deriv (terminating s):
        # the derivative vanishes identically, and the shifted parameters
        # would no longer terminate, so skip the hypergeometric call
        return np.zeros(np.broadcast(np.asarray(pref), np.asarray(x)).shape)[()]
    return pref * gauss_2f1(r + s + deriv, r - s + deriv, 2.0 * r + deriv, x)


def _kappa0(shape: SpaceShape) -> float:
    """Jet constant prod_{m=1}^p (2r)_{m-1} (m-1)! from the x -> 0 limit."""
    r2 = 2.0 * shape.r
    out = 1.0
    for m in range(shape.p):
        out *= float(pochhammer(r2, m)) * math.factorial(m)
    return out


def _snap_clusters(x: np.ndarray, eps: float) -> np.ndarray:
    """Replace groups of ascending nodes with gaps <= eps by their mean.

    Snapping to the mean keeps the first moment of each cluster, so the
    value error is O(spread^2) — below the divided-difference noise at
    the crossover gap.
    """
    z = x.copy()
    start = 0
    for i in range(1, len(z) + 1):
        if i == len(z) or z[i] - z[i - 1] > eps:
            if i - start > 1:
                z[start:i] = np.mean(z[start:i])
            start = i
    return z


def _hermite_column(s_j: complex, z: np.ndarray, shape: SpaceShape) -> np.ndarray:
    """Divided differences phi_{s_j}[z_1..z_k], k = 1..p, with repeated
    (pre-snapped, sorted) nodes handled through exact derivatives."""
    p = len(z)
    c = np.array([complex(bk_kernel(s_j, z_i, shape)) for z_i in z])
    for lev in range(1, p):
        for i in range(p - 1, lev - 1, -1):
            dz = z[i] - z[i - lev]
            if dz == 0.0:
                c[i] = complex(bk_kernel(s_j, z[i], shape, deriv=lev)) / math.factorial(lev)
            else:
                c[i] = (c[i] - c[i - 1]) / dz
    return c


def _y_dd_plain(T: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise divided differences over the squared spectral nodes."""
    c = T.astype(complex).copy()
    p = c.shape[0]
    for lev in range(1, p):
        for i in range(p - 1, lev - 1, -1):
            c[i, :] = (c[i, :] - c[i - 1, :]) / (y[i] - y[i - lev])
    return c


def _y_dd_contour(y: np.ndarray, z: np.ndarray, shape: SpaceShape, n: int = 64) -> np.ndarray:
    """Row divided differences via the Cauchy formula.

    f[y_1..y_j] = (1/2 pi i) * contour integral of f(w)/prod_{i<=j}(w - y_i),
    which is exact for coinciding y's.  The kernel is an entire, even
    function of s, so any branch of sqrt(w) gives the same column values
    and the trapezoid rule converges geometrically.
    """
    p = len(y)
    center = complex(np.mean(y))
    spread = float(np.max(np.abs(y - center))) if p > 1 else 0.0
    radius = 2.0 * max(1.0, 2.0 * spread)
    theta = TWO_PI * np.arange(n) / n
    w = center + radius * np.exp(1j * theta)
    G = np.empty((n, p), dtype=complex)
    for t in range(n):
        G[t, :] = _hermite_column(np.sqrt(w[t]), z, shape)
    B = np.empty((p, p), dtype=complex)
    denom = np.ones(n, dtype=complex)
    ring = radius * np.exp(1j * theta)
    for j in range(p):
        denom = denom * (w - y[j])
        B[j, :] = np.mean(G * (ring / denom)[:, None], axis=0)
    return B


def spherical_fn(s, x, shape: SpaceShape, eps: float | None = None) -> complex:
    """Normalized spherical function Phi_s(x), with Phi_s(0) = 1.

    Coinciding radial coordinates (gap below ``eps``, default the
    QuadConfig confluence threshold) are handled by Hermite divided
    differences with exact kernel derivatives; coinciding squared
    spectral coordinates switch the row reduction to a contour form of
    the divided difference, which stays exact in the confluent limit.

    The admissible radial domain extends to x in [-1, 0) for the
    compact regime, where every kernel column terminates (r + s_j a
    nonpositive integer) and the hypergeometric series is a polynomial
    valid at negated arguments.
    """
    if eps is None:
        eps = QuadConfig().eps_confluent
    p = shape.p
    s_arr = _spectral_array(s, p)
    z = _snap_clusters(_radial_array(x, p, lo=-1.0), eps)
    if p == 1:
        return complex(bk_kernel(s_arr[0], z[0], shape))
    y = s_arr**2
    yscale = max(1.0, float(np.max(np.abs(y))))
    gaps = [abs(y[i] - y[j]) for i in range(p) for j in range(i + 1, p)]
    if min(gaps) <= eps * yscale:
        B = _y_dd_contour(y, z, shape)
    else:
        T = np.stack([_hermite_column(sj, z, shape) for sj in s_arr])
        B = _y_dd_plain(T, y)
    return complex(_kappa0(shape) * np.linalg.det(B))


def bk_column_matrix(sigma: np.ndarray, x: np.ndarray, shape: SpaceShape) -> np.ndarray:
    """Kernel matrix K[a, k] = phi_{i sigma_a}(x_k) on a real spectral grid.

    This is the shared building block of the inverse transform and the
    spectral reconstruction: tensor-grid determinants over sigma need
    only this (N, p) matrix, never a p-dimensional kernel array.
    """
    sigma = np.asarray(sigma, dtype=float)
    x = np.asarray(x, dtype=float)
    cols = [np.real(np.asarray(bk_kernel(1j * sigma, xk, shape))) for xk in x]
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# structured integrands for the transform routes


@dataclass(frozen=True)
class ProductForm:
    """Symmetric integrand f(x) = prod_k b(x_k).

    Carries enough structure for the determinant route: against one
    Vandermonde it splits into columns beta_m(x) = x^(m-1) b(x).
    """

    b: Callable[[np.ndarray], np.ndarray]

    def __call__(self, xs: np.ndarray):
        xs = np.asarray(xs, dtype=float)
        return np.prod(self.b(xs), axis=-1)

    def betas(self, p: int) -> list[Callable]:
        return [lambda xv, m=m: xv**m * self.b(xv) for m in range(p)]


@dataclass(frozen=True)
class ThetaForm:
    """Symmetric integrand f(x) = det{beta_j(x_k)} / V(x).

    V is the ascending Vandermonde prod_{k<l}(x_l - x_k).  Pointwise
    evaluation is 0/0 on coincidences; the transform routes fuse the
    Vandermonde away, and the direct route drops exactly-tied tensor
    nodes (their true contribution carries a factor V = 0).
    """

    betas_fns: tuple

    def __post_init__(self):
        object.__setattr__(self, "betas_fns", tuple(self.betas_fns))

    def __call__(self, xs: np.ndarray):
        xs = np.asarray(xs, dtype=float)
        p = xs.shape[-1]
        if p != len(self.betas_fns):
            raise ValueError("arity mismatch between point and beta columns")
        mat = np.stack(
            [np.stack([np.asarray(b(xs[..., k])) for k in range(p)], axis=-1) for b in self.betas_fns],
            axis=-2,
        )
        return np.linalg.det(mat.astype(complex)) / vandermonde(xs)

    def betas(self, p: int) -> list[Callable]:
        if p != len(self.betas_fns):
            raise ValueError("arity mismatch between shape and beta columns")
        return list(self.betas_fns)


# ---------------------------------------------------------------------------
# the transform: direct and determinant routes


def _check_distinct_y(y: np.ndarray) -> None:
    p = len(y)
    scale = max(1.0, float(np.max(np.abs(y))))
    for i in range(p):
        for j in range(i + 1, p):
            if abs(y[i] - y[j]) <= 1e-12 * scale:
                raise ValueError(
                    "transform routes divide by the spectral Vandermonde; "
                    "separate coinciding s_k^2 values slightly"
                )


def _m0(y: np.ndarray, shape: SpaceShape) -> complex:
    """Confluent x -> 0 limit of det{phi}/V(x), equal to V~(s^2)/kappa0."""
    return complex(vandermonde(y) / _kappa0(shape))


def _direct_level(f, s_arr, shape: SpaceShape, rule) -> complex:
    xg = rule.nodes
    mu1 = rule.weights * xg ** (shape.q - shape.p)
    cols = [np.asarray(gauss_2f1(shape.r + sj, shape.r - sj, 2.0 * shape.r, xg)) for sj in s_arr]
    if shape.p == 1:
        vals = np.asarray(f(xg[:, None]))
        return complex(np.sum(vals * cols[0] * mu1))
    xa = np.broadcast_to(xg[:, None], (len(xg), len(xg)))
    xb = np.broadcast_to(xg[None, :], (len(xg), len(xg)))
    with np.errstate(divide="ignore", invalid="ignore"):
        fv = np.asarray(f(np.stack([xa, xb], axis=-1)))
        big_v = xb - xa
        w_mat = np.where(big_v == 0.0, 0.0, fv * big_v)
    u1 = mu1 * cols[0]
    u2 = mu1 * cols[1]
    tot = u1 @ w_mat @ u2 - u2 @ w_mat @ u1
    return complex(tot / 2.0)


def _det_level(betas, s_arr, shape: SpaceShape, rule) -> complex:
    xg = rule.nodes
    mu1 = rule.weights * xg ** (shape.q - shape.p)
    kern = np.stack(
        [np.asarray(gauss_2f1(shape.r + sj, shape.r - sj, 2.0 * shape.r, xg)) for sj in s_arr]
    )
    beta_vals = np.stack([np.asarray(b(xg), dtype=complex) for b in betas])
    entries = (kern * mu1) @ beta_vals.T
    return complex(np.linalg.det(entries))


def spherical_transform(
    f,
    s,
    shape: SpaceShape,
    config: QuadConfig | None = None,
    route: str = "direct",
) -> ValueWithError:
    """Transform value J f(s) = (1/p!) * int f * Phi_s * w over R_+^p.

    route="direct" evaluates the fused integrand pointwise on a tensor
    grid (p <= 2); route="determinant" reduces to a p x p determinant of
    one-dimensional integrals, which requires ``f`` to be a ProductForm
    or ThetaForm.  The two routes share no algebra beyond the kernel, so
    their agreement is a genuine check of the determinant reduction.
    """
    config = config or QuadConfig()
    p = shape.p
    s_arr = _spectral_array(s, p)
    y = s_arr**2
    _check_distinct_y(y)
    m0 = _m0(y, shape)

    if route == "direct":
        if p > 2:
            raise ValueError("direct route supports p <= 2; use route='determinant'")
        if not callable(f):
            raise ValueError("direct route needs a callable integrand")
        coarse = _direct_level(f, s_arr, shape, halfline_rule(config))
        fine = _direct_level(f, s_arr, shape, halfline_rule(config.refined()))
    elif route == "determinant":
        if isinstance(f, (ProductForm, ThetaForm)):
            betas = f.betas(p)
        else:
            raise ValueError(
                "determinant route needs a ProductForm or ThetaForm integrand"
            )
        coarse = _det_level(betas, s_arr, shape, halfline_rule(config))
        fine = _det_level(betas, s_arr, shape, halfline_rule(config.refined()))
    else:
        raise ValueError(f"unknown route {route!r}")

    value = fine / m0
    return ValueWithError(value, abs(fine - coarse) / abs(m0))


# ---------------------------------------------------------------------------
# closed-form images


def power_image(s, alpha: float, shape: SpaceShape):
    """Gamma-product image of prod (1+x_k)^(-alpha), up to the shared constant.

    prod_k Gamma(alpha-h+s_k) Gamma(alpha-h-s_k) / prod_{j=0}^{p-1} Gamma^2(alpha-j).
    Accepts a SpectralPoint, a p-vector, or a (..., p) block of spectral
    values; the measured transform equals
    ``spherical_calibration_constant(shape)`` times this.
    """
    if isinstance(s, SpectralPoint):
        arr = s.array()
    else:
        arr = np.asarray(s, dtype=complex)
    a = alpha - shape.h
    num = np.prod(gamma(a + arr) * gamma(a - arr), axis=-1)
    den = np.prod([float(gamma(alpha - j)) ** 2 for j in range(shape.p)])
    return num / den


def spherical_calibration_constant(shape: SpaceShape) -> float:
    """Predicted transform constant Gamma(2r)^p * prod (2r)_{m-1} (m-1)!.

    Derived by reducing the power integrand through the determinant
    route: each column is a dual-Hahn image with an exact constant, and
    the leftover jet factor is kappa0.  ``calibrate_spherical`` measures
    the same number by quadrature.
    """
    return float(gamma(2.0 * shape.r)) ** shape.p * _kappa0(shape)


def calibrate_spherical(
    shape: SpaceShape, alpha: float, config: QuadConfig | None = None
) -> tuple[float, float]:
    """Measure the transform constant from the power function at two
    spectral probe points; returns (constant, relative consistency)."""
    config = config or QuadConfig()
    form = ProductForm(lambda xv: (1.0 + xv) ** (-alpha))
    probes = [np.array([0.7, 1.9, 3.1][: shape.p]), np.array([1.3, 2.6, 0.4][: shape.p])]
    route = "direct" if shape.p <= 2 else "determinant"
    vals = []
    for sig in probes:
        sp = SpectralPoint.from_sigma(sig)
        measured = spherical_transform(form, sp, shape, config, route=route).value
        vals.append((measured / power_image(sp, alpha, shape)).real)
    consistency = abs(vals[0] / vals[1] - 1.0)
    return float(vals[0]), float(consistency)


# ---------------------------------------------------------------------------
# canonical basis


def canonical_basis(elem: CanonicalBasisElement, x):
    """Value of the basis vector: schur_mu(X) * prod (1+x_k)^(-alpha),
    with X_k = x_k/(1+x_k)."""
    arr = x.x if isinstance(x, RadialPoint) else np.asarray(x, dtype=float)
    arr = np.atleast_1d(arr)
    big_x = arr / (1.0 + arr)
    return schur(elem.mu, big_x) * np.prod((1.0 + arr) ** (-elem.alpha), axis=-1)


def canonical_norm(elem: CanonicalBasisElement) -> float:
    """Squared norm of the basis vector in the deformed invariant pairing.

    [prod_{j=1}^p Gamma^2(alpha-j+1) / prod_{j=0}^{q-1} j!]
      * prod_{j=1}^p (mu_j+p-j)! (mu_j+q-j)! / Gamma^2(alpha+mu_j-j+1).
    """
    p, q, alpha = elem.shape.p, elem.shape.q, elem.alpha
    for j, m in enumerate(elem.padded, start=1):
        for arg in (alpha - j + 1.0, alpha + m - j + 1.0):
            if arg <= 0.0 and abs(arg - round(arg)) < 1e-12:
                raise ValueError(f"gamma pole at argument {arg:g}; norm undefined here")
    head = 1.0
    for j in range(1, p + 1):
        head *= float(gamma(alpha - j + 1.0)) ** 2
    head /= np.prod([math.factorial(j) for j in range(q)])
    tail = 1.0
    for j, m in enumerate(elem.padded, start=1):
        tail *= (
            math.factorial(m + p - j)
            * math.factorial(m + q - j)
            / float(gamma(alpha + m - j + 1.0)) ** 2
        )
    return float(head * tail)


def canonical_image(elem: CanonicalBasisElement, s):
    """Closed-form transform image of the basis vector (shared constant).

    prod_k Gamma(a+s_k)Gamma(a-s_k) / prod_j Gamma^2(alpha+mu_j-j+1)
      * det{ S_{mu_l+p-l}(s_k^2) } / prod_{k<l} (s_k^2 - s_l^2),

    with a = alpha - h and S_n the monic dual Hahn polynomials of
    parameters (a, r, r).  At mu = 0 this reduces to ``power_image``.
    The measured transform equals spherical_calibration_constant(shape)
    times this value.  Requires alpha > h and distinct s_k^2.
    """
    shape = elem.shape
    p = shape.p
    if isinstance(s, SpectralPoint):
        arr = s.array()
    else:
        arr = np.asarray(s, dtype=complex)
    if arr.shape[-1] != p:
        raise ValueError(f"spectral block must have {p} trailing coordinates")
    a = elem.alpha - shape.h
    params = HahnParams(a, shape.r, shape.r)
    y = arr**2
    exps = elem.exponents
    gam = np.prod(gamma(a + arr) * gamma(a - arr), axis=-1)
    den = 1.0
    for j, m in enumerate(elem.padded, start=1):
        den *= float(gamma(elem.alpha + m - j + 1.0)) ** 2
    if all(m == 0 for m in elem.mu):
        ratio = np.ones(arr.shape[:-1], dtype=complex) if arr.ndim > 1 else 1.0
    else:
        # rows k = spectral coordinate, columns l = decreasing degrees
        mat = np.stack([np.asarray(hahn_poly(n, y, params), dtype=complex) for n in exps], axis=-1)
        n_vdm = np.ones(arr.shape[:-1], dtype=complex)
        for k in range(p):
            for l in range(k + 1, p):
                n_vdm = n_vdm * (y[..., k] - y[..., l])
        ratio = np.linalg.det(mat) / n_vdm
    return gam * ratio / den


# ---------------------------------------------------------------------------
# inverse transform


def inverse_spherical_transform(
    F,
    x,
    shape: SpaceShape,
    config: QuadConfig | None = None,
) -> ValueWithError:
    """Reconstruct f(x) from its transform by spectral quadrature.

    f(x) = c * int over [0, s_max]^p of F(sigma) Phi_{i sigma}(x)
    * density, with the constant c = 1/(p! (2 pi)^p kappa^2) forced by
    the rank-one inversion applied column by column (kappa is the shared
    calibration constant).  The spectral Vandermonde of Phi cancels one
    power of the density's squared Vandermonde, so the fused integrand
    is finite on the whole tensor grid.  Supports p <= 2.
    """
    config = config or QuadConfig()
    p = shape.p
    if p > 2:
        raise ValueError("spectral tensor grids are limited to p <= 2")
    xv = _radial_array(x, p)
    if p == 2 and abs(xv[1] - xv[0]) <= 1e-12 * max(1.0, xv[1]):
        raise ValueError("inverse reconstruction needs distinct radial coordinates")
    kappa = spherical_calibration_constant(shape)
    c_inv = 1.0 / (math.factorial(p) * TWO_PI**p * kappa**2)

    def level(cfg: QuadConfig) -> float:
        rule = axis_rule(cfg)
        sig = rule.nodes
        g1 = rule.weights * gk_factor(sig, shape)
        kmat = bk_column_matrix(sig, xv, shape)
        if p == 1:
            fv = np.asarray(F(sig[:, None]))
            return float(np.real(np.sum(fv * kmat[:, 0] * g1)))
        sa = np.broadcast_to(sig[:, None], (len(sig), len(sig)))
        sb = np.broadcast_to(sig[None, :], (len(sig), len(sig)))
        fv = np.asarray(F(np.stack([sa, sb], axis=-1)))
        det = np.multiply.outer(kmat[:, 0], kmat[:, 1]) - np.multiply.outer(kmat[:, 1], kmat[:, 0])
        svdm = sig[:, None] ** 2 - sig[None, :] ** 2
        tot = np.einsum("ab,ab,ab,a,b->", fv, det, svdm, g1, g1)
        return float(np.real(_kappa0(shape) * tot / vandermonde(xv)))

    coarse = level(config)
    fine = level(config.refined())
    return ValueWithError(c_inv * fine, c_inv * abs(fine - coarse))


# ---------------------------------------------------------------------------
# the determinant-integral identity (oracle helper)


def andreief_check(
    fs: Sequence[Callable],
    gs: Sequence[Callable],
    weight: Callable[[np.ndarray], np.ndarray],
    config: QuadConfig | None = None,
) -> tuple[ValueWithError, complex]:
    """Both sides of the det-fusion identity for one measure.

    Left: int over R_+^p of det{f_k(x_l)} det{g_k(x_l)} prod w(x_i) dx,
    by direct p-dimensional quadrature.  Right: p! * det of the matrix
    of one-dimensional integrals int f_k g_m w dx.  Returns (left with a
    two-level error, right).
    """
    config = config or QuadConfig()
    p = len(fs)
    if len(gs) != p:
        raise ValueError("need equally many f and g columns")

    def integrand(nodes: np.ndarray) -> np.ndarray:
        fmat = np.stack([np.stack([np.asarray(f(nodes[:, k])) for k in range(p)], axis=-1) for f in fs], axis=-2)
        gmat = np.stack([np.stack([np.asarray(g(nodes[:, k])) for k in range(p)], axis=-1) for g in gs], axis=-2)
        wprod = np.prod(np.stack([np.asarray(weight(nodes[:, k])) for k in range(p)], axis=-1), axis=-1)
        return np.linalg.det(fmat) * np.linalg.det(gmat) * wprod

    cone = integrate_cone(integrand, p, config)
    left = ValueWithError(cone.value * math.factorial(p), cone.error * math.factorial(p))

    rule = halfline_rule(config.refined())
    fvals = [np.asarray(f(rule.nodes)) for f in fs]
    gvals = [np.asarray(g(rule.nodes)) for g in gs]
    wv = np.asarray(weight(rule.nodes)) * rule.weights
    entries = np.array([[np.sum(fv * gv * wv) for gv in gvals] for fv in fvals])
    right = complex(math.factorial(p) * np.linalg.det(entries))
    return left, right
