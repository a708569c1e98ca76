"""Gamma-weighted spectral integrals and the unitary identification map.

The building block is a one-dimensional integral against the continuous
spectral weight: the even part of Gamma(a + is) integrated against the
two-parameter density |Gamma(b+is) Gamma(c+is) / Gamma(2is)|^2 and the
kernel 2F1(b+is, b-is; b+c; -x).  Only the even part of the first gamma
factor is visible to the forward transform, so the integrand carries the
symmetrization (Gamma(a+is) + Gamma(a-is))/2 from the start; the value
is then real, and the residual imaginary part of the complex quadrature
doubles as a pipeline health figure.

On the rank-p cone the same integrals assemble into a p x p determinant
(one column per shifted weight parameter), normalized by the gamma
product over the first p spectral shifts.  Two evaluation routes are
kept deliberately distinct:

* the pre-derivative route integrates the plain kernel against the
  column-shifted weights and takes the determinant directly;
* the derivative route starts from the shifted-kernel integral, then
  realizes the row differentiations by the Leibniz rule, with every
  kernel derivative taken under the integral sign through the exact
  parameter-shift identity (no numerical differentiation anywhere).

Both routes evaluate the same function, so their gap measures nothing
but quadrature error; agreement is a registered verification check.

The final piece is the matrix argument of the identification kernel:
the p x p cross-ratio Q(z, u) built from two ball points, whose
eigenvalue multiset is invariant under simultaneous fractional-linear
motions and reduces to the radial coordinates when one argument is the
origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ball import BallPoint, SpaceShape
from .hyperfun import gamma, gamma_abs2, gauss_2f1, rgamma
from .quad import IntegrationError, QuadConfig, axis_rule
from .spherical import _radial_array, bk_column_matrix

__all__ = [
    "LambdaParams",
    "LambdaReport",
    "lambda_1d",
    "lambda_1d_report",
    "lambda_1d_profile",
    "lambda_space",
    "lambda_space_route_gap",
    "intertwiner_argument",
]

TWO_PI = 2.0 * math.pi

# the even gamma factor decays like exp(-pi s / 2), so the mass beyond
# the last node is (envelope value) * (2 / pi); the certificate compares
# that to this fraction of the envelope's own mass on the grid
_TAIL_FRACTION = 1e-14
_IMAG_RESIDUAL = 1e-8

# exp(-pi s / 2) is half the decay rate of the squared-gamma densities
# the shared default cutoff is tuned for, so an unspecified config gets
# a longer spectral axis; explicit configs are honored verbatim
_DEFAULT_S_MAX = 45.0


def _lambda_config(config: QuadConfig | None) -> QuadConfig:
    if config is None:
        return QuadConfig(s_max=_DEFAULT_S_MAX)
    return config


@dataclass(frozen=True)
class LambdaParams:
    """Parameter triple (a, b, c) of the one-dimensional integral.

    All three must be strictly positive: b and c shape the spectral
    density and the kernel, a sets the gamma factor whose even part is
    integrated.
    """

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c) <= 0.0:
            raise ValueError("lambda parameters must be strictly positive")


class LambdaReport(NamedTuple):
    """Value of the 1-D integral with its two health figures."""

    value: float
    imag_residual: float
    tail_fraction: float


def _even_gamma(a: float, sig: np.ndarray) -> np.ndarray:
    """(Gamma(a+is) + Gamma(a-is)) / 2 on a real grid (complex dtype)."""
    return 0.5 * (gamma(a + 1j * sig) + gamma(a - 1j * sig))


def _pair_weight(sig: np.ndarray, b: float, c: float) -> np.ndarray:
    """|Gamma(b+is) Gamma(c+is) / Gamma(2is)|^2; vanishes at sig = 0."""
    return (
        gamma_abs2(b + 1j * sig)
        * gamma_abs2(c + 1j * sig)
        * np.abs(rgamma(2j * sig)) ** 2
    )


def _shifted_kernel(sig: np.ndarray, x, b: float, cpar: float, deriv: int = 0):
    """d^deriv/dx^deriv of 2F1(b+is, b-is; cpar; -x), broadcast over grids.

    Each derivative multiplies by -((b+t)^2 + sig^2)/(cpar+t) and bumps
    all three parameters, exactly as in the rank-one kernel.
    """
    s = 1j * np.asarray(sig, dtype=float)
    pref = 1.0
    for t in range(deriv):
        pref = pref * -((b + t) ** 2 - s * s) / (cpar + t)
    return pref * gauss_2f1(b + s + deriv, b - s + deriv, cpar + deriv, x)


def _certify_tail(params: LambdaParams, env_l1: float, s_end: float) -> float:
    """Tail mass of the spectral envelope past s_end, as a fraction.

    The envelope is the gamma part of the integrand with the kernel
    dropped: the kernel modulus peaks at its origin value 1 on the whole
    tempered axis, so envelope masses bound integrand masses, and the
    certificate stays meaningful at cutoffs where the kernel evaluation
    itself is down in float cancellation noise.  Raises when the
    fraction exceeds the threshold, the signal that the configured
    spectral cutoff is too short for these parameters.
    """
    end_density = abs(
        _even_gamma(params.a, np.asarray([s_end]))[0]
        * _pair_weight(np.asarray([s_end]), params.b, params.c)[0]
    ) / float(gamma(params.b + params.c))
    tail = end_density * (2.0 / math.pi)
    fraction = tail / max(env_l1, 1e-300)
    if fraction > _TAIL_FRACTION:
        raise IntegrationError(
            f"tail certificate failed at s_max = {s_end:g}: the endpoint "
            f"mass is {fraction:.2e} of the envelope estimate "
            f"(threshold {_TAIL_FRACTION:.0e}); raise s_max in the config"
        )
    return float(fraction)


def lambda_1d_report(
    params: LambdaParams, x: float, config: QuadConfig | None = None
) -> LambdaReport:
    """One-dimensional integral with health figures attached.

    Evaluates in complex arithmetic throughout; the imaginary residual
    of the total (which evenness forces to zero) and the certified tail
    fraction at the spectral cutoff come back alongside the value.
    """
    if x < 0.0:
        raise ValueError("the radial argument must be nonnegative")
    config = _lambda_config(config)
    rule = axis_rule(config)
    sig = rule.nodes
    env = (
        _even_gamma(params.a, sig) * _pair_weight(sig, params.b, params.c)
    ) / gamma(params.b + params.c)
    vals = env * _shifted_kernel(sig, x, params.b, params.b + params.c)
    total = complex(np.sum(rule.weights * vals))
    env_l1 = float(np.sum(rule.weights * np.abs(env)))
    fraction = _certify_tail(params, env_l1, config.s_max)
    residual = abs(total.imag) / max(1.0, abs(total.real))
    if residual > _IMAG_RESIDUAL:
        raise IntegrationError(
            f"imaginary residual {residual:.2e} exceeds {_IMAG_RESIDUAL:.0e}; "
            "the complex pipeline lost evenness"
        )
    return LambdaReport(float(total.real), residual, fraction)


def lambda_1d(params: LambdaParams, x: float, config: QuadConfig | None = None) -> float:
    """Even part of Gamma(a+is) against the (b, c) spectral density.

    (1/Gamma(b+c)) * int_0^{s_max} of the symmetrized gamma factor times
    |Gamma(b+is) Gamma(c+is) / Gamma(2is)|^2 * 2F1(b+is, b-is; b+c; -x).
    Raises when the tail certificate at the cutoff fails.
    """
    return lambda_1d_report(params, x, config).value


def lambda_1d_profile(
    params: LambdaParams, xs, config: QuadConfig | None = None
) -> np.ndarray:
    """Vectorized evaluation on an array of radial arguments.

    Shares one spectral grid across the whole profile, so the cost is a
    single (grid x points) kernel evaluation; the tail certificate is
    point-independent (envelope masses), so it is checked once.
    """
    config = _lambda_config(config)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size and float(np.min(xs)) < 0.0:
        raise ValueError("the radial argument must be nonnegative")
    rule = axis_rule(config)
    sig = rule.nodes
    env = (
        _even_gamma(params.a, sig) * _pair_weight(sig, params.b, params.c)
    ) / gamma(params.b + params.c)
    kern = _shifted_kernel(sig[:, None], xs[None, :], params.b, params.b + params.c)
    totals = (rule.weights * env) @ kern
    _certify_tail(params, float(np.sum(rule.weights * np.abs(env))), config.s_max)
    residual = float(np.max(np.abs(totals.imag))) / max(1.0, float(np.max(np.abs(totals.real))))
    if residual > _IMAG_RESIDUAL:
        raise IntegrationError(
            f"imaginary residual {residual:.2e} exceeds {_IMAG_RESIDUAL:.0e}; "
            "the complex pipeline lost evenness"
        )
    return np.real(totals)


# ---------------------------------------------------------------------------
# the rank-p determinant form


def _validate_space_args(alpha: float, shape: SpaceShape) -> None:
    if shape.p > 2:
        raise ValueError("the determinant form is implemented for p <= 2")
    if not alpha > shape.h:
        raise ValueError(f"alpha must exceed h = {shape.h:g}")


def _column_weights(alpha: float, shape: SpaceShape, sig: np.ndarray) -> list[np.ndarray]:
    """Per-column spectral envelopes: even gamma times the (r, r+j-1) pair."""
    r = shape.r
    geven = _even_gamma(alpha - shape.h, sig)
    return [geven * _pair_weight(sig, r, r + j) for j in range(shape.p)]


def _entries_pre(
    alpha: float, xs: np.ndarray, shape: SpaceShape, rule
) -> np.ndarray:
    """Pre-derivative entries: plain kernel, shifted weights, no Leibniz."""
    sig = rule.nodes
    phi = bk_column_matrix(sig, xs, shape)
    cols = _column_weights(alpha, shape, sig)
    norm = gamma(2.0 * shape.r)
    mat = np.empty((xs.size, shape.p), dtype=complex)
    for j, env in enumerate(cols):
        mat[:, j] = (rule.weights * env) @ phi / norm
    return mat


def _entries_derivative(
    alpha: float, xs: np.ndarray, shape: SpaceShape, rule
) -> np.ndarray:
    """Derivative-route entries via Leibniz on x^{2r+j-1} * column integral.

    The column with shift j uses the kernel at upper parameter 2r+j; its
    x-derivatives are parameter-shift exact, and the power-function
    factors recombine to nonnegative integer powers of x, so nothing is
    singular at the origin.
    """
    r = shape.r
    sig = rule.nodes
    cols = _column_weights(alpha, shape, sig)
    mat = np.empty((xs.size, shape.p), dtype=complex)
    for j, env in enumerate(cols):
        cpar = 2.0 * r + j
        base = rule.weights * env / gamma(cpar)
        entry = np.zeros(xs.size, dtype=complex)
        m = 2.0 * r + j - 1.0  # exponent of the power factor
        for i in range(j + 1):
            # i derivatives on the power factor, j - i on the integral
            falling = 1.0
            for t in range(i):
                falling *= m - t
            if falling == 0.0:
                continue
            kern = _shifted_kernel(sig[:, None], xs[None, :], r, cpar, deriv=j - i)
            entry += math.comb(j, i) * falling * xs ** (j - i) * (base @ kern)
        mat[:, j] = entry
    return mat


def _space_on_rule(
    alpha: float, xs: np.ndarray, shape: SpaceShape, rule, route: str
) -> float:
    if route == "pre-derivative":
        mat = _entries_pre(alpha, xs, shape, rule)
    elif route == "derivative":
        mat = _entries_derivative(alpha, xs, shape, rule)
    else:
        raise ValueError(f"unknown route {route!r}")
    pref = np.prod([gamma(alpha - j) for j in range(shape.p)])
    value = complex(np.linalg.det(mat) / pref)
    if abs(value.imag) > _IMAG_RESIDUAL * max(1.0, abs(value.real)):
        raise IntegrationError(
            f"imaginary residual {abs(value.imag):.2e} in the determinant form"
        )
    return value.real


def lambda_space(
    alpha: float,
    x,
    shape: SpaceShape,
    route: str = "pre-derivative",
    config: QuadConfig | None = None,
    route_tol: float = 1e-3,
) -> float:
    """Determinant form of the spectral integral on the rank-p cone.

    det over (point, column) of one-dimensional integrals, divided by
    prod_{j=0}^{p-1} Gamma(alpha - j).  At p = 1 this is the plain 1-D
    integral with parameters (alpha - h, r, r) over Gamma(alpha).

    route selects the evaluation pipeline ("pre-derivative" is the
    default; "derivative" validates the differentiated form); "both"
    runs the two pipelines and raises when their relative gap exceeds
    ``route_tol``, returning the pre-derivative value.
    """
    _validate_space_args(alpha, shape)
    config = _lambda_config(config)
    xs = _radial_array(x, shape.p)
    rule = axis_rule(config)
    if route in ("pre-derivative", "derivative"):
        return _space_on_rule(alpha, xs, shape, rule, route)
    if route != "both":
        raise ValueError(f"unknown route {route!r}")
    pre = _space_on_rule(alpha, xs, shape, rule, "pre-derivative")
    der = _space_on_rule(alpha, xs, shape, rule, "derivative")
    gap = abs(pre - der) / max(abs(pre), abs(der), 1e-300)
    if gap > route_tol:
        raise IntegrationError(
            f"route disagreement {gap:.2e} exceeds {route_tol:.0e} "
            f"at alpha = {alpha:g}, x = {tuple(xs)}"
        )
    return pre


def lambda_space_route_gap(
    alpha: float, x, shape: SpaceShape, config: QuadConfig | None = None
) -> tuple[float, float, float]:
    """(pre-derivative value, derivative value, relative gap).

    The two routes compute the same number through different integrands,
    so the gap is a pure quadrature-error probe: refining the config
    must shrink it.
    """
    _validate_space_args(alpha, shape)
    config = _lambda_config(config)
    xs = _radial_array(x, shape.p)
    rule = axis_rule(config)
    pre = _space_on_rule(alpha, xs, shape, rule, "pre-derivative")
    der = _space_on_rule(alpha, xs, shape, rule, "derivative")
    gap = abs(pre - der) / max(abs(pre), abs(der), 1e-300)
    return pre, der, gap


# ---------------------------------------------------------------------------
# the matrix argument of the identification kernel


def intertwiner_argument(z: BallPoint, u: BallPoint) -> np.ndarray:
    """Cross-ratio matrix Q(z, u) of two points of the same ball.

    (1 - z z*)^{-1} (z - u) (1 - u* u)^{-1} (z* - u*): a p x p matrix
    whose eigenvalues are real, nonnegative, vanish iff z = u, and give
    the radial coordinates of z when u = 0.  The eigenvalue multiset is
    the invariant of the pair (z, u) under simultaneous fractional-
    linear motions.
    """
    if z.shape != u.shape:
        raise ValueError("both points must live on the same ball")
    p, q = z.shape.p, z.shape.q
    zm, um = z.z, u.z
    diff = zm - um
    left = np.linalg.solve(np.eye(p) - zm @ zm.conj().T, diff)
    right = np.linalg.solve(np.eye(q) - um.conj().T @ um, diff.conj().T)
    return left @ right
