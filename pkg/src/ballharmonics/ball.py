"""The matrix ball, its isometry group, and positivity kernels.

Points are complex p x q matrices z with spectral norm < 1 (1 <= p <= q).
The isometry group preserves the indefinite form with signature matrix
J = diag(1_p, -1_q); an element g = [[a, b], [c, d]] (blocks a: p x p,
c: q x p) acts by the fractional-linear map

    z  |->  (a + z c)^{-1} (b + z d),

which corresponds to right matrix multiplication on graphs
(v, v z) |-> (v, v z) g.  All determinant powers det(...)^{-alpha} are
taken on the branch that is continuous along t z, t in [0, 1], starting
from value 1 at z = 0; concretely, each eigenvalue factor (1 - lambda_i)
lies in the right half-plane, so summing principal logs per eigenvalue
realizes that branch exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .hyperfun import gamma

__all__ = [
    "SpaceShape",
    "BallPoint",
    "GroupElement",
    "RadialPoint",
    "PsdReport",
    "random_group_element",
    "random_ball_point",
    "mobius",
    "mobius_denominator",
    "log_det_one_minus",
    "berezin_kernel",
    "modified_kernel",
    "compact_kernel",
    "radial_coords",
    "double_ratio",
    "gram_matrix",
    "gram_psd_test",
    "volume_gamma_product",
    "cone_measure_constant",
]

GROUP_RESIDUAL_TOL = 1e-10
PSD_RELATIVE_FLOOR = 1e-10


@dataclass(frozen=True)
class SpaceShape:
    """Matrix-ball shape (p, q) with its derived half-integer constants.

    r = (q - p + 1) / 2 and h = (q + p - 1) / 2 are the two shape
    parameters every spectral formula is written in; r - h = 1 - p and
    r + h = q.
    """

    p: int
    q: int

    def __post_init__(self):
        if not (1 <= self.p <= self.q <= 3):
            raise ValueError("desk-scale shapes require 1 <= p <= q <= 3")

    @property
    def r(self) -> float:
        return 0.5 * (self.q - self.p + 1)

    @property
    def h(self) -> float:
        return 0.5 * (self.q + self.p - 1)

    @property
    def dim(self) -> int:
        return self.p * self.q

    def signature(self) -> np.ndarray:
        return np.diag([1.0] * self.p + [-1.0] * self.q).astype(complex)


@dataclass(frozen=True)
class BallPoint:
    shape: SpaceShape
    z: np.ndarray = field(repr=False)

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.shape != (self.shape.p, self.shape.q):
            raise ValueError(f"point must be {self.shape.p} x {self.shape.q}")
        if np.linalg.norm(z, 2) >= 1.0:
            raise ValueError("point lies outside the open ball (spectral norm >= 1)")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class GroupElement:
    shape: SpaceShape
    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        n = self.shape.p + self.shape.q
        if g.shape != (n, n):
            raise ValueError(f"group element must be {n} x {n}")
        J = self.shape.signature()
        residual = np.linalg.norm(g @ J @ g.conj().T - J)
        if residual > GROUP_RESIDUAL_TOL:
            raise ValueError(f"matrix does not preserve the form (residual {residual:.2e})")
        object.__setattr__(self, "g", g)

    @property
    def blocks(self):
        p = self.shape.p
        a = self.g[:p, :p]
        b = self.g[:p, p:]
        c = self.g[p:, :p]
        d = self.g[p:, p:]
        return a, b, c, d


@dataclass(frozen=True)
class RadialPoint:
    """Ordered radial coordinates x_1 >= ... >= x_p >= 0."""

    shape: SpaceShape
    x: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (self.shape.p,):
            raise ValueError(f"radial point must have {self.shape.p} coordinates")
        if np.any(x < -1e-14) or np.any(np.diff(x) > 1e-12):
            raise ValueError("coordinates must be nonnegative and non-increasing")
        object.__setattr__(self, "x", np.maximum(x, 0.0))


def random_ball_point(shape: SpaceShape, rng: np.random.Generator, radius: float = 0.8) -> BallPoint:
    """Draw z with spectral norm < radius (rejection-free rescaling)."""
    raw = rng.standard_normal((shape.p, shape.q)) + 1j * rng.standard_normal((shape.p, shape.q))
    norm = np.linalg.norm(raw, 2)
    scale = radius * rng.uniform(0.1, 0.95) / max(norm, 1e-14)
    return BallPoint(shape, raw * scale)


def random_group_element(shape: SpaceShape, seed: int, scale: float = 0.6) -> GroupElement:
    """Exponential of a random Lie-algebra element.

    The algebra consists of block matrices [[A, B], [B*, D]] with A, D
    skew-Hermitian, so the exponential preserves the form to machine
    precision (validated by the GroupElement constructor).
    """
    rng = np.random.default_rng(seed)
    p, q = shape.p, shape.q

    def skew(n):
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return 0.5 * (m - m.conj().T)

    A = skew(p)
    D = skew(q)
    B = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    X = np.block([[A, B], [B.conj().T, D]]) * scale
    return GroupElement(shape, sla.expm(X))


def mobius_denominator(g: GroupElement, z: BallPoint) -> np.ndarray:
    a, _, c, _ = g.blocks
    return a + z.z @ c


def mobius(g: GroupElement, z: BallPoint) -> BallPoint:
    """Fractional-linear action of g on the ball point z."""
    a, b, c, d = g.blocks
    num = b + z.z @ d
    den = a + z.z @ c
    return BallPoint(z.shape, np.linalg.solve(den, num))


# ----------------------------------------------------------------------
# kernels
# ----------------------------------------------------------------------

def log_det_one_minus(m: np.ndarray) -> complex:
    """log det(1 - m) on the branch continuous along t m from t = 0.

    Every eigenvalue of m has modulus < 1 on the admissible domain, so
    each factor 1 - lambda_i stays in the right half-plane and the
    principal log per factor is the continuous branch.
    """
    lam = np.linalg.eigvals(np.asarray(m, dtype=complex))
    return complex(np.sum(np.log1p(-lam)))


def berezin_kernel(alpha: float, z: BallPoint, u: BallPoint) -> complex:
    """det(1 - z u*)^{-alpha} on the continuous branch."""
    m = z.z @ u.z.conj().T
    return complex(np.exp(-alpha * log_det_one_minus(m)))


def modified_kernel(alpha: float, z: BallPoint, u: BallPoint) -> float:
    """The isometry-invariant kernel

        det(1-zz*)^alpha det(1-uu*)^alpha / |det(1-zu*)|^{2 alpha},

    real-valued and positive on the ball."""
    lz = log_det_one_minus(z.z @ z.z.conj().T).real
    lu = log_det_one_minus(u.z @ u.z.conj().T).real
    lzu = log_det_one_minus(z.z @ u.z.conj().T).real
    return float(np.exp(alpha * (lz + lu - 2.0 * lzu)))


def compact_kernel(N: float, z: BallPoint, u: BallPoint) -> complex:
    """det(1 + z u*)^{N}, the compact-side analogue of the kernel."""
    m = z.z @ u.z.conj().T
    lam = np.linalg.eigvals(m)
    return complex(np.exp(N * np.sum(np.log1p(lam))))


def radial_coords(z: BallPoint) -> RadialPoint:
    """Radial coordinates x_j = lambda_j^2 / (1 - lambda_j^2) (descending)."""
    lam = np.linalg.svd(z.z, compute_uv=False)
    x = lam**2 / (1.0 - lam**2)
    return RadialPoint(z.shape, np.sort(x)[::-1])


def double_ratio(A1: np.ndarray, B1: np.ndarray, A2: np.ndarray, B2: np.ndarray) -> np.ndarray:
    """The four-slot cross-ratio matrix

        (1 - B2 A1)^{-1} (B1 - B2) (1 - A2 B1)^{-1} (A1 - A2).

    A-slots are p x q, B-slots q x p; the result is q x q.  Its spectrum
    is the basic two-point invariant of the geometry.
    """
    A1 = np.asarray(A1, dtype=complex)
    B1 = np.asarray(B1, dtype=complex)
    A2 = np.asarray(A2, dtype=complex)
    B2 = np.asarray(B2, dtype=complex)
    q = B1.shape[0]
    eye = np.eye(q, dtype=complex)
    eyep = np.eye(A1.shape[0], dtype=complex)
    t1 = np.linalg.solve(eye - B2 @ A1, B1 - B2)
    t2 = np.linalg.solve(eyep - A2 @ B1, A1 - A2)
    return t1 @ t2


# ----------------------------------------------------------------------
# positivity testing
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PsdReport:
    verdict: str  # "psd" | "indefinite"
    min_eig: float
    max_eig: float
    n_points: int

    @property
    def ratio(self) -> float:
        return self.min_eig / max(self.max_eig, 1e-300)


_KERNELS = {
    "berezin": lambda alpha, z, u: berezin_kernel(alpha, z, u),
    "modified": lambda alpha, z, u: complex(modified_kernel(alpha, z, u)),
    "compact": lambda alpha, z, u: compact_kernel(alpha, z, u),
}


def gram_matrix(alpha: float, points: list[BallPoint], kernel: str = "berezin") -> np.ndarray:
    try:
        k = _KERNELS[kernel]
    except KeyError:
        raise ValueError(f"unknown kernel tag {kernel!r}; use berezin | modified | compact")
    n = len(points)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            val = k(alpha, points[i], points[j])
            g[i, j] = val
            g[j, i] = np.conj(val)
    return g


def gram_psd_test(alpha: float, points: list[BallPoint], kernel: str = "berezin") -> PsdReport:
    """Eigenvalue verdict on the kernel Gram matrix of the given points.

    The verdict is "psd" when the smallest eigenvalue is above
    -PSD_RELATIVE_FLOOR times the largest magnitude eigenvalue (the
    numerical zero for a Hermitian matrix of this scale).
    """
    g = gram_matrix(alpha, points, kernel)
    eigs = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    min_eig = float(eigs[0])
    max_eig = float(np.max(np.abs(eigs)))
    verdict = "psd" if min_eig >= -PSD_RELATIVE_FLOOR * max(max_eig, 1e-300) else "indefinite"
    return PsdReport(verdict, min_eig, max_eig, len(points))


# ----------------------------------------------------------------------
# normalization constants of the radial reduction
# ----------------------------------------------------------------------

def volume_gamma_product(alpha: float, shape: SpaceShape) -> float:
    """pi^{pq} * prod_{k=1..p} Gamma(alpha - q - k + 1) / Gamma(alpha - k + 1).

    Equals the ball integral of det(1 - z z*)^{alpha - p - q}; at
    alpha = p + q it is the Euclidean volume of the ball.  Requires
    alpha > p + q - 1 for convergence.
    """
    value = np.pi ** (shape.p * shape.q)
    for k in range(1, shape.p + 1):
        value *= float(gamma(alpha - shape.q - k + 1)) / float(gamma(alpha - k + 1))
    return float(value)


def cone_measure_constant(shape: SpaceShape) -> float:
    """Constant C relating Lebesgue measure on the ball to radial coordinates:

        integral_ball F(x(z)) dz
            = (C / p!) * integral_{R_+^p} F(x) w(x) prod_k (1+x_k)^{-p-q} dx,

    with w the radial weight prod x_k^{q-p} prod_{k<l} (x_k - x_l)^2.
    Fixed by the Gaussian integral pi^{pq} against the squared-singular-
    value reduction (a Laguerre-type Selberg product).
    """
    p, q = shape.p, shape.q
    denom = 1.0
    for j in range(p):
        denom *= math.factorial(j + 1) * float(gamma(q - p + 1 + j))
    return float(np.pi ** (p * q) * math.factorial(p) / denom)
