"""Harmonic analysis on matrix balls, with a numerical verification harness.

Subpackage map:

* ``hyperfun``    gamma family, Gauss 2F1 at negated argument, dual Hahn
* ``quad``        graded Gauss-Legendre rules: half-line, spectral axis, cone
* ``symfun``      partitions, Schur polynomials, truncated determinant jets
* ``ball``        the matrix ball, its isometries, and positivity kernels
* ``transforms``  the 2F1-kernel index transform, calibration, exotic variant
* ``spherical``   radial spherical functions and the spherical transform
* ``plancherel``  spectral densities, atom weights, measure reconstruction
* ``compactdual`` compact-side expansions and positivity
* ``bergman``     radial kernel sums and their determinantal closed forms
* ``lambdafn``    the Lambda integral and the two-route determinant space
* ``harness``     the identity registry; ``cli`` exposes it as a command
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    ball,
    bergman,
    compactdual,
    harness,
    hyperfun,
    lambdafn,
    plancherel,
    quad,
    spherical,
    symfun,
    transforms,
)

__all__ = [
    "__version__",
    "hyperfun",
    "quad",
    "symfun",
    "ball",
    "transforms",
    "spherical",
    "plancherel",
    "compactdual",
    "bergman",
    "lambdafn",
    "harness",
]
