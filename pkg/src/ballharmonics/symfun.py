"""Partitions, Schur polynomials, and truncated power-series jets.

The combinatorial layer behind the kernel expansions: Schur polynomials
are evaluated through a complete-homogeneous dynamic program (stable at
coincident eigenvalues, broadcastable over point arrays), and the jet
class expands det(1 - z a*)^{-k} as a polynomial in the matrix entries
of z so that differential operators can act on it coefficientwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .hyperfun import pochhammer

__all__ = [
    "Partition",
    "as_parts",
    "partitions_up_to",
    "schur",
    "weyl_dim",
    "hua_coeff",
    "PolyJet",
    "det_inv_jet",
    "apply_minor",
    "var_index",
]


# ----------------------------------------------------------------------
# partitions
# ----------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Partition:
    """A partition as a non-increasing tuple of positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p <= 0 or p != int(p) for p in self.parts):
            raise ValueError("parts must be positive integers")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise ValueError("parts must be non-increasing")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self.parts) > n:
            raise ValueError(f"partition has more than {n} parts")
        return self.parts + (0,) * (n - len(self.parts))

    def __len__(self) -> int:
        return len(self.parts)


def as_parts(mu) -> tuple[int, ...]:
    """Normalize a Partition / iterable of ints to a trailing-zero-free tuple."""
    if isinstance(mu, Partition):
        return mu.parts
    parts = tuple(int(m) for m in mu)
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def partitions_up_to(max_len: int, max_weight: int) -> list[Partition]:
    """All partitions with at most max_len parts and weight <= max_weight.

    Ordered by weight, then reverse-lexicographically within a weight
    ((2) precedes (1,1)).
    """
    out: list[Partition] = []

    def rec(prefix: list[int], remaining: int, cap: int):
        out.append(Partition(tuple(prefix)))
        if len(prefix) == max_len:
            return
        for part in range(min(cap, remaining), 0, -1):
            prefix.append(part)
            rec(prefix, remaining - part, part)
            prefix.pop()

    by_weight: dict[int, list[Partition]] = {w: [] for w in range(max_weight + 1)}
    rec([], max_weight, max_weight)
    for mu in out:
        by_weight[mu.weight].append(mu)
    ordered: list[Partition] = []
    for w in range(max_weight + 1):
        ordered.extend(sorted(by_weight[w], key=lambda m: m.padded(max_len), reverse=True))
    return ordered


# ----------------------------------------------------------------------
# Schur polynomials and dimension/coefficient formulas
# ----------------------------------------------------------------------

def _complete_homogeneous(y: np.ndarray, kmax: int) -> list[np.ndarray]:
    """h_0..h_kmax of the variables along the last axis of y.

    Uses the recursion over variables
        h_k(y_1..y_m) = h_k(y_1..y_{m-1}) + y_m h_{k-1}(y_1..y_m),
    which is subtraction-free and hence stable at coincidences.
    """
    y = np.asarray(y)
    lead = y.shape[:-1]
    n = y.shape[-1]
    dtype = complex if np.iscomplexobj(y) else float
    h = [np.ones(lead, dtype=dtype)] + [np.zeros(lead, dtype=dtype) for _ in range(kmax)]
    for m in range(n):
        ym = y[..., m]
        for k in range(1, kmax + 1):
            h[k] = h[k] + ym * h[k - 1]
    return h


def schur(mu, y):
    """Schur polynomial s_mu evaluated on the last axis of y.

    Jacobi-Trudi determinant in complete homogeneous polynomials; zero
    when mu has more parts than there are variables.
    """
    parts = as_parts(mu)
    y = np.asarray(y)
    n = y.shape[-1]
    lead = y.shape[:-1]
    dtype = complex if np.iscomplexobj(y) else float
    if not parts:
        return np.ones(lead, dtype=dtype) if lead else np.asarray(1.0, dtype=dtype)[()]
    ell = len(parts)
    if ell > n:
        return np.zeros(lead, dtype=dtype) if lead else np.asarray(0.0, dtype=dtype)[()]
    kmax = parts[0] + ell - 1
    h = _complete_homogeneous(y, kmax)

    def entry(i: int, j: int):
        k = parts[i] - (i + 1) + (j + 1)
        if k < 0:
            return np.zeros(lead, dtype=dtype)
        return h[k]

    total = np.zeros(lead, dtype=dtype)
    for perm in permutations(range(ell)):
        sign = _perm_sign(perm)
        term = np.ones(lead, dtype=dtype)
        for i in range(ell):
            term = term * entry(i, perm[i])
        total = total + sign * term
    if total.ndim == 0:
        return total[()]
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def weyl_dim(mu, n: int) -> int:
    """Dimension of the polynomial representation of U(n) labelled by mu."""
    parts = Partition(as_parts(mu)).padded(n)
    num = 1
    den = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= parts[i] - parts[j] + j - i
            den *= j - i
    return num // den


def hua_coeff(mu, alpha, p: int):
    """Coefficient of s_mu in the expansion of det(1 - w)^{-alpha}.

    Written with rising factorials so that integer alpha in {0..p-1}
    gives exact zeros beyond the truncated block rather than 0/0.
    """
    parts = Partition(as_parts(mu)).padded(p)
    coeff = complex(weyl_dim(mu, p))
    for j in range(1, p + 1):
        m = parts[j - 1]
        coeff *= pochhammer(alpha - j + 1, m) * math.factorial(p - j) / math.factorial(m + p - j)
    if abs(coeff.imag) == 0.0:
        return coeff.real
    return coeff


# ----------------------------------------------------------------------
# truncated jets
# ----------------------------------------------------------------------

def var_index(i: int, j: int, q: int) -> int:
    """Flat index of matrix entry (i, j) in the row-major variable order."""
    return i * q + j


class PolyJet:
    """Polynomial jet: a truncated multivariate power series.

    Coefficients live in a dict keyed by exponent tuples; all operations
    truncate to total degree <= order.  Supports degree up to 8 in p*q
    variables at the desk scales used here.
    """

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs: dict[tuple[int, ...], complex] | None = None):
        if order < 0 or order > 8:
            raise ValueError("jet order must lie in 0..8")
        self.nvars = nvars
        self.order = order
        self.coeffs = dict(coeffs or {})

    @classmethod
    def constant(cls, value: complex, nvars: int, order: int) -> "PolyJet":
        jet = cls(nvars, order)
        if value != 0:
            jet.coeffs[(0,) * nvars] = complex(value)
        return jet

    @classmethod
    def variable(cls, idx: int, nvars: int, order: int) -> "PolyJet":
        jet = cls(nvars, order)
        if order >= 1:
            key = [0] * nvars
            key[idx] = 1
            jet.coeffs[tuple(key)] = 1.0 + 0j
        return jet

    def copy(self) -> "PolyJet":
        return PolyJet(self.nvars, self.order, self.coeffs)

    def _check(self, other: "PolyJet"):
        if self.nvars != other.nvars or self.order != other.order:
            raise ValueError("jet shape mismatch")

    def __add__(self, other):
        if not isinstance(other, PolyJet):
            out = self.copy()
            key = (0,) * self.nvars
            out.coeffs[key] = out.coeffs.get(key, 0.0) + complex(other)
            return out
        self._check(other)
        out = self.copy()
        for k, v in other.coeffs.items():
            out.coeffs[k] = out.coeffs.get(k, 0.0) + v
        return out

    __radd__ = __add__

    def __neg__(self):
        return PolyJet(self.nvars, self.order, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolyJet) else -complex(other))

    def scale(self, c: complex) -> "PolyJet":
        c = complex(c)
        if c == 0:
            return PolyJet(self.nvars, self.order)
        return PolyJet(self.nvars, self.order, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, PolyJet):
            return self.scale(complex(other))
        self._check(other)
        out: dict[tuple[int, ...], complex] = {}
        order = self.order
        for ka, va in self.coeffs.items():
            da = sum(ka)
            for kb, vb in other.coeffs.items():
                if da + sum(kb) > order:
                    continue
                key = tuple(a + b for a, b in zip(ka, kb))
                out[key] = out.get(key, 0.0) + va * vb
        return PolyJet(self.nvars, order, out)

    __rmul__ = __mul__

    def valuation(self) -> int:
        if not self.coeffs:
            return self.order + 1
        return min(sum(k) for k in self.coeffs)

    def exp(self) -> "PolyJet":
        """exp of a jet with zero constant term (Horner form of the series)."""
        key0 = (0,) * self.nvars
        if abs(self.coeffs.get(key0, 0.0)) > 0:
            raise ValueError("exp requires zero constant term")
        result = PolyJet.constant(1.0, self.nvars, self.order)
        for m in range(self.order, 0, -1):
            result = result * self.scale(1.0 / m) + 1.0
        return result

    def derivative(self, idx: int) -> "PolyJet":
        out: dict[tuple[int, ...], complex] = {}
        for k, v in self.coeffs.items():
            if k[idx] == 0:
                continue
            key = list(k)
            key[idx] -= 1
            out[tuple(key)] = v * k[idx]
        return PolyJet(self.nvars, self.order, out)

    def coefficient(self, key: tuple[int, ...]) -> complex:
        return self.coeffs.get(tuple(key), 0.0 + 0j)

    def max_abs_coeff(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(v) for v in self.coeffs.values())

    def __repr__(self):
        return f"PolyJet(nvars={self.nvars}, order={self.order}, terms={len(self.coeffs)})"


def det_inv_jet(a: np.ndarray, k: float, order: int) -> PolyJet:
    """Jet of det(1 - z a*)^{-k} in the p*q entries of z (row-major).

    Built as exp(k * sum_m tr((z a*)^m) / m), truncated at total degree
    ``order``; the exponent k may be any real number.
    """
    a = np.asarray(a, dtype=complex)
    p, q = a.shape
    nvars = p * q
    # (z a*)_{il} = sum_j z_{ij} conj(a_{lj}): a p x p matrix of linear jets
    lin = [[PolyJet(nvars, order) for _ in range(p)] for _ in range(p)]
    for i in range(p):
        for l in range(p):
            entry = PolyJet(nvars, order)
            for j in range(q):
                coef = np.conj(a[l, j])
                if coef != 0:
                    entry = entry + PolyJet.variable(var_index(i, j, q), nvars, order).scale(coef)
            lin[i][l] = entry

    def mat_mul(A, B):
        return [
            [sum((A[i][m] * B[m][l] for m in range(p)), PolyJet(nvars, order)) for l in range(p)]
            for i in range(p)
        ]

    S = PolyJet(nvars, order)
    power = lin
    for m in range(1, order + 1):
        tr = sum((power[i][i] for i in range(p)), PolyJet(nvars, order))
        S = S + tr.scale(k / m)
        if m < order:
            power = mat_mul(power, lin)
    return S.exp()


def apply_minor(jet: PolyJet, rows, cols, q: int) -> PolyJet:
    """Apply the determinant of the partial-derivative submatrix.

    rows/cols pick an m x m minor of the p x q matrix of derivatives
    d/dz_{ij}; the operator sum_{pi} sgn(pi) prod_i d/dz_{rows[i], cols[pi(i)]}
    acts on the jet.
    """
    rows = list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise ValueError("minor must be square")
    m = len(rows)
    out = PolyJet(jet.nvars, jet.order)
    for perm in permutations(range(m)):
        sign = _perm_sign(perm)
        term = jet
        for i in range(m):
            term = term.derivative(var_index(rows[i], cols[perm[i]], q))
        out = out + term.scale(sign)
    return out
