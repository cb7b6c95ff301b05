"""Independent numerical oracles used by the test suite.

Nothing here shares code with the implementation paths it checks:

* ``quad_element_z`` / ``quad_element_y``: 200-point Gauss-Hermite
  quadrature of the basis-function integrals, evaluating Hermite
  polynomials pointwise (no ladder algebra, no overlap recurrences).
  The weighted sums are accumulated in extended precision so the oracle
  itself stays accurate to ~1e-13 on the largest elements.
* ``fd_levels_1d``: dense finite-difference spectrum of the 1D quartic
  well on a uniform grid, Richardson-extrapolated.
* ``fd_levels_2d``: sparse finite-difference spectrum of the full scaled
  two-component (spin) Hamiltonian, Richardson-extrapolated.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from numpy.polynomial.hermite import hermgauss
from scipy.linalg import eigh_tridiagonal

_NODES, _WEIGHTS = hermgauss(200)
_NODES_LD = _NODES.astype(np.longdouble)
_WEIGHTS_LD = _WEIGHTS.astype(np.longdouble)


def _hermite_values(n: int, x: np.ndarray) -> np.ndarray:
    """H_n at the nodes by direct recurrence (longdouble)."""
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = 2.0 * x
    for j in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * j * h_prev, h
    return h


def _ket_polynomial(derivative: int, m: int, x: np.ndarray) -> np.ndarray:
    """Polynomial factor of d^j/dx^j [H_m(x) exp(-x^2/2)]."""
    h_m = _hermite_values(m, x)
    if derivative == 0:
        return h_m
    h_m1 = _hermite_values(m - 1, x) if m >= 1 else np.zeros_like(x)
    if derivative == 1:
        return 2.0 * m * h_m1 - x * h_m
    h_m2 = _hermite_values(m - 2, x) if m >= 2 else np.zeros_like(x)
    return (4.0 * m * (m - 1) * h_m2 - 4.0 * m * x * h_m1
            + (x * x - 1.0) * h_m)


_Z_POLY = {
    "1": lambda z: np.ones_like(z),
    "z": lambda z: z,
    "z2": lambda z: z * z,
    "z4": lambda z: z ** 4,
    "quartic": lambda z: (z * z - 1.0) ** 2,
    "zquartic": lambda z: z * (z * z - 1.0) ** 2,
}


def _log_norm(n: int, eta: float) -> float:
    return 0.5 * (math.log(eta) - 0.5 * math.log(math.pi)
                  - n * math.log(2.0) - math.lgamma(n + 1))


def _quad_single_center(kind: str, n: int, c_bra: float, m: int,
                        c_ket: float, eta: float) -> float:
    """<H_n Gaussian at c_bra | kind | H_m Gaussian at c_ket>, single wells."""
    half_shift = 0.5 * eta * (c_bra - c_ket)
    z = 0.5 * (c_bra + c_ket) + _NODES_LD / eta
    x_bra = _NODES_LD - half_shift
    x_ket = _NODES_LD + half_shift
    if kind in _Z_POLY:
        poly = (_hermite_values(n, x_bra) * _Z_POLY[kind](z)
                * _ket_polynomial(0, m, x_ket))
    elif kind == "dz":
        poly = _hermite_values(n, x_bra) * eta \
            * _ket_polynomial(1, m, x_ket)
    elif kind == "dz2":
        poly = _hermite_values(n, x_bra) * eta * eta \
            * _ket_polynomial(2, m, x_ket)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    prefactor = math.exp(_log_norm(n, eta) + _log_norm(m, eta)
                         - float(half_shift) ** 2) / eta
    return prefactor * float(_WEIGHTS_LD @ poly)


def quad_element_z(kind: str, n: int, p: int, m: int, q: int,
                   eta: float) -> float:
    """Quadrature value of <psi_n^p| kind |psi_m^q> over z'."""
    c_n = (2.0 * (1.0 + p * _quad_single_center("1", n, 1.0, n, -1.0,
                                                eta))) ** -0.5
    c_m = (2.0 * (1.0 + q * _quad_single_center("1", m, 1.0, m, -1.0,
                                                eta))) ** -0.5
    total = 0.0
    for c_bra, w_bra in ((1.0, 1.0), (-1.0, p)):
        for c_ket, w_ket in ((1.0, 1.0), (-1.0, q)):
            total += w_bra * w_ket * _quad_single_center(
                kind, n, c_bra, m, c_ket, eta)
    return c_n * c_m * total


def quad_element_y(kind: str, k: int, l: int, mu: float) -> float:
    """Quadrature value of <phi_k| kind |phi_l> over y'."""
    z_kind = {"1": "1", "y2": "z2", "dy": "dz", "dy2": "dz2"}[kind]
    return _quad_single_center(z_kind, k, 0.0, l, 0.0, mu)


# ----------------------------------------------------------------------
# finite-difference references
# ----------------------------------------------------------------------

def _potential_1d(zp: np.ndarray, r_a: float, ab_ratio: float,
                  gamma: float) -> np.ndarray:
    return ab_ratio / (8.0 * r_a) * (zp * zp - 1.0) ** 2 - gamma * zp


def _fd_levels_1d_once(r_a: float, ab_ratio: float, gamma: float,
                       n_points: int, span: float, k: int) -> np.ndarray:
    z = np.linspace(-span, span, n_points)
    h = z[1] - z[0]
    diag = r_a / h ** 2 + _potential_1d(z, r_a, ab_ratio, gamma)
    off = np.full(n_points - 1, -0.5 * r_a / h ** 2)
    vals = eigh_tridiagonal(diag, off, select="i",
                            select_range=(0, k - 1),
                            eigvals_only=True)
    return vals


def fd_levels_1d(r_a: float, ab_ratio: float, gamma: float, k: int = 4,
                 n_points: int = 4000, span: float = 3.0) -> np.ndarray:
    """Lowest ``k`` 1D levels (units hw0), Richardson-extrapolated.

    Uniform grid, 3-point Laplacian; the h^2 error term cancels between
    n and 2n points.
    """
    coarse = _fd_levels_1d_once(r_a, ab_ratio, gamma, n_points, span, k)
    fine = _fd_levels_1d_once(r_a, ab_ratio, gamma, 2 * n_points, span, k)
    return (4.0 * fine - coarse) / 3.0


def _fd_levels_2d_once(scaled, nz: int, ny: int, z_span: float,
                       y_span: float, k: int) -> np.ndarray:
    """Two-component finite-difference spectrum of the scaled Hamiltonian."""
    z = np.linspace(-z_span, z_span, nz)
    y = np.linspace(-y_span, y_span, ny)
    hz = z[1] - z[0]
    hy = y[1] - y[0]
    r_a, r_c, beta = scaled.r_a, scaled.r_c, scaled.beta

    def lap(n, h):
        main = np.full(n, -2.0 / h ** 2)
        off = np.full(n - 1, 1.0 / h ** 2)
        return scipy.sparse.diags([off, main, off], [-1, 0, 1])

    def d1(n, h):
        off = np.full(n - 1, 0.5 / h)
        return scipy.sparse.diags([-off, off], [-1, 1])

    eye_z = scipy.sparse.identity(nz)
    eye_y = scipy.sparse.identity(ny)
    v_z = _potential_1d(z, r_a, scaled.ab_ratio, scaled.gamma)
    if r_c > 0:
        v_z = v_z + (r_c * r_c * beta * beta / (2.0 * r_a)) * z ** 4
    diag_z = scipy.sparse.diags(v_z)
    z2 = scipy.sparse.diags(z * z)
    y2 = scipy.sparse.diags(y * y)

    h_orb = (-0.5 * r_a) * (scipy.sparse.kron(lap(nz, hz), eye_y)
                            + scipy.sparse.kron(eye_z, lap(ny, hy)))
    h_orb = h_orb + scipy.sparse.kron(diag_z, eye_y)
    if r_c > 0:
        h_orb = h_orb + (r_c * r_c / (8.0 * r_a)) \
            * scipy.sparse.kron(eye_z, y2)
        if beta > 0:
            h_orb = h_orb - 1j * r_c * beta \
                * scipy.sparse.kron(z2, d1(ny, hy))

    sz = scipy.sparse.diags([1.0, -1.0])
    sx = scipy.sparse.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    eye_s = scipy.sparse.identity(2)
    full = scipy.sparse.kron(eye_s, h_orb)
    full = full - (0.5 * r_c) * scipy.sparse.kron(
        sz, scipy.sparse.identity(nz * ny))
    if beta > 0:
        z_diag = scipy.sparse.kron(scipy.sparse.diags(z), eye_y)
        full = full - (r_c * beta) * scipy.sparse.kron(sx, z_diag)

    full = full.tocsc()
    vals = scipy.sparse.linalg.eigsh(full, k=k, sigma=0.0, which="LM",
                                     return_eigenvectors=False)
    return np.sort(vals)


def fd_levels_2d(scaled, k: int = 4, nz: int = 121, ny: int = 121,
                 z_span: float = 2.4, y_span: float = 8.0) -> np.ndarray:
    """Lowest ``k`` 2D two-component levels, Richardson-extrapolated."""
    coarse = _fd_levels_2d_once(scaled, nz, ny, z_span, y_span, k)
    fine = _fd_levels_2d_once(scaled, 2 * nz - 1, 2 * ny - 1, z_span,
                              y_span, k)
    return (4.0 * fine - coarse) / 3.0
