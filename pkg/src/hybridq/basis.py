"""Spin-orbital basis and exact one-dimensional matrix elements.

The spatial basis is a product of harmonic-oscillator-like functions:

* along y': ``phi_k(y') = N_k H_k(mu y') exp(-mu^2 y'^2 / 2)``, k = 0..L-1,
  an orthonormal oscillator ladder centered at the origin;
* along z': even/odd combinations of single-well functions centered at the
  two potential minima z' = +1 and z' = -1,

  ``psi_n^p(z') = C_n^p (psi_n^{+}(z') + p * psi_n^{-}(z'))``,  p = +1/-1,

  where ``psi_n^{+-}(z') = N_n H_n(eta (z' -+ 1)) exp(-eta^2 (z' -+ 1)^2 / 2)``
  are unit-normalized shifted oscillator functions, n = 0..N-1.

Each spatial function carries one of the two eigenstates of sigma_z, for a
total dimension M = 4*L*N.

All 1D integrals are evaluated in closed form.  Operators (powers of the
coordinate, derivatives, the quartic well shape) are band matrices in the
ladder-operator representation of the ket's own oscillator basis; displaced
bra/ket pairs are coupled through the displaced-oscillator overlap table,
which obeys a stable two-term recurrence.  No quadrature is used anywhere in
this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateBasisError

# Supported 1D operator kinds.  The z kinds act on the double-well direction,
# the y kinds on the transverse oscillator direction.
Z_KINDS = ("1", "z", "z2", "z4", "dz", "dz2", "quartic", "zquartic")
Y_KINDS = ("1", "y2", "dy", "dy2")

# Band growth of the widest z operator is 5 (z*(z^2-1)^2); intermediate matrix
# products need a little extra headroom so truncation never touches kept rows.
_PAD = 8


@dataclass(frozen=True)
class BasisSpec:
    """Nonlinear parameters and counts of the 4*L*N variational basis."""

    eta: float   # Gaussian width parameter of the z-functions (scaled units)
    mu: float    # Gaussian width parameter of the y-functions (scaled units)
    L: int       # number of y-functions phi_k
    N: int       # number of z-functions per parity psi_n^p

    def __post_init__(self) -> None:
        if self.eta <= 0 or self.mu <= 0:
            raise ValueError("eta and mu must be positive")
        if self.L < 1 or self.N < 1:
            raise ValueError("L and N must be at least 1")

    @property
    def size(self) -> int:
        """Total basis dimension M = 4*L*N."""
        return 4 * self.L * self.N


@dataclass(frozen=True)
class BasisIndex:
    """One basis function: y index k, z index n, well parity p, spin s.

    ``p`` and ``s`` take the values +1/-1; ``s`` labels the sigma_z
    eigenstate.  The flattened ordering is lexicographic in (s, p, k, n)
    with +1 preceding -1 for both labels.
    """

    k: int
    n: int
    p: int
    s: int

    def __post_init__(self) -> None:
        if self.p not in (+1, -1) or self.s not in (+1, -1):
            raise ValueError("p and s must be +1 or -1")
        if self.k < 0 or self.n < 0:
            raise ValueError("k and n must be non-negative")

    def flatten(self, spec: BasisSpec) -> int:
        if self.k >= spec.L or self.n >= spec.N:
            raise ValueError("index outside the basis")
        s_idx = 0 if self.s == +1 else 1
        p_idx = 0 if self.p == +1 else 1
        return ((s_idx * 2 + p_idx) * spec.L + self.k) * spec.N + self.n

    @classmethod
    def from_flat(cls, i: int, spec: BasisSpec) -> "BasisIndex":
        if not 0 <= i < spec.size:
            raise ValueError("flat index outside the basis")
        n = i % spec.N
        i //= spec.N
        k = i % spec.L
        i //= spec.L
        p = +1 if i % 2 == 0 else -1
        s = +1 if i // 2 == 0 else -1
        return cls(k=k, n=n, p=p, s=s)


def basis_indices(spec: BasisSpec):
    """All basis labels in flattened order."""
    for s in (+1, -1):
        for p in (+1, -1):
            for k in range(spec.L):
                for n in range(spec.N):
                    yield BasisIndex(k=k, n=n, p=p, s=s)


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    Accepts scalars or numpy arrays.
    """
    if n < 0:
        raise ValueError("Hermite order must be non-negative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for j in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * j * h_prev, h
    return h if h.ndim else float(h)


# ----------------------------------------------------------------------
# Ladder-operator machinery in the dimensionless oscillator basis u_n(w),
# u_n orthonormal, w the oscillator's own coordinate.
# ----------------------------------------------------------------------

def _ladder_position(size: int) -> np.ndarray:
    """Matrix of multiplication by w: w u_m = sqrt((m+1)/2) u_{m+1} + sqrt(m/2) u_{m-1}."""
    d = np.sqrt(0.5 * np.arange(1, size))
    return np.diag(d, 1) + np.diag(d, -1)


def _ladder_derivative(size: int) -> np.ndarray:
    """Matrix of d/dw: u_m' = sqrt(m/2) u_{m-1} - sqrt((m+1)/2) u_{m+1}."""
    d = np.sqrt(0.5 * np.arange(1, size))
    return np.diag(d, 1) - np.diag(d, -1)


@lru_cache(maxsize=64)
def _displaced_overlap_cached(delta: float, size: int) -> np.ndarray:
    """Displaced-oscillator overlap table, exact up to one final rounding.

    Writing X[n, m] = exp(-delta^2/4) Q[n, m] / sqrt(2^(n+m) n! m!), the
    ladder recurrences reduce to the division-free form

        Q[0, m] = delta^m,   Q[n+1, m] = 2m Q[n, m-1] - delta Q[n, m],

    which is evaluated in exact rational arithmetic (delta is a dyadic
    rational as a float).  The naive float recurrence cancels catastrophically
    for well-separated centers; this version has no rounding until each entry
    is converted once at the end.
    """
    X = np.zeros((size, size))
    arg = -0.25 * delta * delta
    if arg < -350.0:
        # every kept entry is below ~1e-100; the wells are fully decoupled
        X.setflags(write=False)
        return X
    d = Fraction(delta)
    q_rows = [[Fraction(1)] + [Fraction(0)] * (size - 1)]
    for m in range(size - 1):
        q_rows[0][m + 1] = d * q_rows[0][m]
    for n in range(size - 1):
        prev = q_rows[n]
        row = [-d * prev[0]] + [
            2 * m * prev[m - 1] - d * prev[m] for m in range(1, size)
        ]
        q_rows.append(row)

    pref = math.exp(arg)
    fact = [1]
    for j in range(1, size):
        fact.append(fact[-1] * j)
    for n in range(size):
        for m in range(size):
            q = q_rows[n][m]
            if q == 0:
                continue
            norm_sq = (1 << (n + m)) * fact[n] * fact[m]
            # sqrt as a dyadic rational with 53 extra bits: correctly rounded
            root = Fraction(math.isqrt(norm_sq << 106), 1 << 53)
            X[n, m] = float(q / root) * pref
    X.setflags(write=False)
    return X


def displaced_overlap_table(delta: float, size: int) -> np.ndarray:
    """Overlaps X[n, m] = <u_n(w), u_m(w + delta)> of displaced oscillators.

    Derived from X[0, 0] = exp(-delta^2/4) by the two-term recurrences

        X[0, m+1] = delta X[0, m] / sqrt(2(m+1))
        X[n+1, m] = (sqrt(2m) X[n, m-1] - delta X[n, m]) / sqrt(2(n+1))

    (ladder algebra plus integration by parts).  All entries stay in [-1, 1].
    Returns a fresh writable array.
    """
    return _displaced_overlap_cached(delta, size).copy()


def _z_operator(kind: str, eta: float, center: float, size: int) -> np.ndarray:
    """Band matrix of a z-direction operator in the oscillator basis at ``center``."""
    eye = np.eye(size)
    if kind == "1":
        return eye
    z = center * eye + _ladder_position(size) / eta
    if kind == "z":
        return z
    if kind == "z2":
        return z @ z
    if kind == "z4":
        z2 = z @ z
        return z2 @ z2
    if kind == "dz":
        return eta * _ladder_derivative(size)
    if kind == "dz2":
        d = eta * _ladder_derivative(size)
        return d @ d
    if kind == "quartic":
        q = z @ z - eye
        return q @ q
    if kind == "zquartic":
        q = z @ z - eye
        return z @ q @ q
    raise ValueError(f"unsupported z operator kind: {kind!r}")


def _y_operator(kind: str, mu: float, size: int) -> np.ndarray:
    """Band matrix of a y-direction operator in the phi_k oscillator basis."""
    if kind == "1":
        return np.eye(size)
    if kind == "y2":
        w = _ladder_position(size) / mu
        return w @ w
    if kind == "dy":
        return mu * _ladder_derivative(size)
    if kind == "dy2":
        d = mu * _ladder_derivative(size)
        return d @ d
    raise ValueError(f"unsupported y operator kind: {kind!r}")


def _single_well_elements(kind: str, eta: float, c_bra: float, c_ket: float,
                          count: int) -> np.ndarray:
    """<psi_n at c_bra | kind | psi_m at c_ket> for all n, m < count.

    Exact: the operator is banded in the ket's oscillator basis and the
    displaced overlap table couples it to the bra's.  The padded working size
    guarantees intermediate products never lose band entries of kept columns.
    Cross-center products cancel strongly, so they are accumulated in
    extended precision before rounding to float64.
    """
    size = count + _PAD
    op = _z_operator(kind, eta, c_ket, size)
    if c_bra == c_ket:
        return op[:count, :count].copy()
    table = _displaced_overlap_cached(eta * (c_bra - c_ket), size)
    prod = table.astype(np.longdouble) @ op.astype(np.longdouble)
    return prod[:count, :count].astype(float)


def cross_overlap(n: int, m: int, spec: BasisSpec) -> float:
    """Overlap of unit-normalized single-well functions in opposite wells.

    <psi_n at +1 | psi_m at -1>; for n = m = 0 this is exp(-eta^2).
    """
    if n < 0 or m < 0 or n >= spec.N or m >= spec.N:
        raise ValueError("index outside the basis")
    table = _displaced_overlap_cached(2.0 * spec.eta, spec.N + _PAD)
    return float(table[n, m])


def normalization(n: int, p: int, spec: BasisSpec) -> float:
    """C_n^p = [2 (1 + p <psi_n^+|psi_n^->)]^(-1/2), so <psi_n^p|psi_n^p> = 1."""
    if p not in (+1, -1):
        raise ValueError("parity label must be +1 or -1")
    arg = 2.0 * (1.0 + p * cross_overlap(n, n, spec))
    if arg <= 0.0:
        raise DegenerateBasisError(
            f"well combination (n={n}, p={p:+d}) has no normalization; "
            "the two well functions are (numerically) identical"
        )
    return arg ** -0.5


@lru_cache(maxsize=128)
def z_element_table(kind: str, spec: BasisSpec) -> np.ndarray:
    """Full 2N x 2N table of <psi_n^p| kind |psi_m^q> over the z' basis.

    Row/column ordering is p-major: index = (0 if p = +1 else 1)*N + n.
    Symmetric kinds are mirrored from the upper triangle so the table is
    exactly symmetric; 'dz' is mirrored antisymmetric.  The returned array
    is read-only (cached).
    """
    if kind not in Z_KINDS:
        raise ValueError(f"unsupported z operator kind: {kind!r}")
    N = spec.N
    ee = _single_well_elements(kind, spec.eta, +1.0, +1.0, N)
    eo = _single_well_elements(kind, spec.eta, +1.0, -1.0, N)
    oe = _single_well_elements(kind, spec.eta, -1.0, +1.0, N)
    oo = _single_well_elements(kind, spec.eta, -1.0, -1.0, N)

    c = np.empty((2, N))
    for i, p in enumerate((+1, -1)):
        c[i] = [normalization(n, p, spec) for n in range(N)]

    table = np.empty((2 * N, 2 * N))
    for i, p in enumerate((+1, -1)):
        for j, q in enumerate((+1, -1)):
            block = ee + q * eo + p * oe + (p * q) * oo
            table[i * N:(i + 1) * N, j * N:(j + 1) * N] = \
                np.outer(c[i], c[j]) * block

    if kind == "dz":
        table = np.triu(table, 1) - np.triu(table, 1).T
    else:
        table = np.triu(table) + np.triu(table, 1).T
    table.setflags(write=False)
    return table


@lru_cache(maxsize=128)
def y_element_table(kind: str, spec: BasisSpec) -> np.ndarray:
    """L x L table of <phi_k| kind |phi_l>; exactly (anti)symmetric, read-only."""
    if kind not in Y_KINDS:
        raise ValueError(f"unsupported y operator kind: {kind!r}")
    size = spec.L + _PAD
    table = _y_operator(kind, spec.mu, size)[:spec.L, :spec.L]
    if kind == "dy":
        table = np.triu(table, 1) - np.triu(table, 1).T
    else:
        table = np.triu(table) + np.triu(table, 1).T
    table.setflags(write=False)
    return table


def op_element_z(kind: str, bra: tuple[int, int], ket: tuple[int, int],
                 spec: BasisSpec) -> float:
    """Exact 1D integral <psi_n^p| kind |psi_m^q> over z'.

    ``bra`` and ``ket`` are (n, p) pairs with p = +1/-1.
    """
    n, p = bra
    m, q = ket
    if not (0 <= n < spec.N and 0 <= m < spec.N):
        raise ValueError("index outside the basis")
    if p not in (+1, -1) or q not in (+1, -1):
        raise ValueError("parity label must be +1 or -1")
    table = z_element_table(kind, spec)
    i = (0 if p == +1 else 1) * spec.N + n
    j = (0 if q == +1 else 1) * spec.N + m
    return float(table[i, j])


def op_element_y(kind: str, bra: int, ket: int, spec: BasisSpec) -> float:
    """Exact oscillator matrix element <phi_k| kind |phi_l> over y'."""
    if not (0 <= bra < spec.L and 0 <= ket < spec.L):
        raise ValueError("index outside the basis")
    return float(y_element_table(kind, spec)[bra, ket])
