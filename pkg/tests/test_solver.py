"""Generalized eigensolver contract and stabilization machinery."""

import dataclasses

import numpy as np
import pytest
import scipy.linalg

import hybridq as hq
from hybridq import solver
from conftest import FIG4_PHYSICAL, FIG4_SPEC, small_spec

PHYS = FIG4_PHYSICAL


def _identity_problem(H: np.ndarray) -> hq.SpectralProblem:
    """Wrap a plain Hermitian matrix as a SpectralProblem with S = 1."""
    n = H.shape[0]
    ms = n // 2
    eye = np.eye(ms)
    return hq.SpectralProblem(H=H, S=np.eye(n), s_spatial=eye,
                              z_spatial=eye, spec=small_spec(L=1, N=ms // 2),
                              scaled=hq.scale(PHYS), s_min_eig=1.0,
                              s_condition=1.0)


def test_identity_overlap_reduces_to_standard_problem():
    rng = np.random.default_rng(0)
    H = rng.standard_normal((8, 8))
    H = H + H.T
    problem = _identity_problem(H)
    sol = hq.solve(problem, 8)
    np.testing.assert_allclose(sol.energies, np.linalg.eigvalsh(H),
                               rtol=1e-12, atol=1e-12)


def test_solver_contract_on_production_problem(fig4_problem, fig4_solution):
    sol = fig4_solution
    assert np.all(np.diff(sol.energies) >= 0)
    C = sol.coefficients
    gram = C.conj().T @ fig4_problem.S @ C
    assert np.max(np.abs(gram - np.eye(sol.n_states))) < 1e-10
    residual = fig4_problem.H @ C - fig4_problem.S @ C * sol.energies
    rel = np.linalg.norm(residual, axis=0) \
        / np.linalg.norm(fig4_problem.S @ C, axis=0)
    assert rel.max() < 1e-10 * np.abs(sol.energies).max()


def test_n_lowest_validation(fig4_problem):
    with pytest.raises(ValueError):
        hq.solve(fig4_problem, 0)
    with pytest.raises(ValueError):
        hq.solve(fig4_problem, fig4_problem.size + 1)


def test_variational_monotonicity():
    scaled = hq.scale(PHYS)
    small = hq.solve(hq.assemble(scaled, small_spec(L=5, N=5)), 10)
    bigger_l = hq.solve(hq.assemble(scaled, small_spec(L=7, N=5)), 10)
    bigger_both = hq.solve(hq.assemble(scaled, small_spec(L=7, N=7)), 10)
    tol = 1e-10 * np.abs(small.energies)
    assert np.all(bigger_l.energies <= small.energies + tol)
    assert np.all(bigger_both.energies <= bigger_l.energies + tol)


def test_eigenvalues_invariant_under_basis_permutation():
    spec = small_spec()
    problem = hq.assemble(hq.scale(PHYS), spec)
    rng = np.random.default_rng(5)
    perm = rng.permutation(problem.size)
    H = problem.H[np.ix_(perm, perm)]
    S = problem.S[np.ix_(perm, perm)]
    direct = hq.solve(problem, 12).energies
    permuted = scipy.linalg.eigh(H, S, eigvals_only=True)[:12]
    np.testing.assert_allclose(permuted, direct, rtol=1e-8)


def test_spin_decoupling_at_zero_gradient():
    no_gradient = dataclasses.replace(PHYS, bSLa=0.0)
    scaled = hq.scale(no_gradient)
    spec = small_spec()
    problem = hq.assemble(scaled, spec)
    full = hq.solve(problem, problem.size).energies

    ms = problem.size // 2
    up = scipy.linalg.eigh(problem.H[:ms, :ms], problem.s_spatial,
                           eigvals_only=True)
    down = scipy.linalg.eigh(problem.H[ms:, ms:], problem.s_spatial,
                             eigvals_only=True)
    # spectrum = union of two spin-shifted copies of the spinless spectrum
    np.testing.assert_allclose(np.sort(np.concatenate([up, down])), full,
                               rtol=1e-10, atol=1e-12)
    # the sigma_z = +1 copy sits exactly r_c below the sigma_z = -1 copy
    np.testing.assert_allclose(down - up, scaled.r_c, rtol=1e-9)


def test_tie_breaking_orders_by_position():
    # one exactly degenerate pair built by hand; <z'> decides the order:
    # basis states 1 (up, spatial 1, <z> = -0.7) and 2 (down, spatial 0,
    # <z> = +0.7) share the eigenvalue 2
    problem = hq.SpectralProblem(
        H=np.diag([1.0, 2.0, 2.0, 3.0]), S=np.eye(4),
        s_spatial=np.eye(2), z_spatial=np.diag([0.7, -0.7]),
        spec=small_spec(L=1, N=1), scaled=hq.scale(PHYS),
        s_min_eig=1.0, s_condition=1.0)
    sol = hq.solve(problem, 4)
    ms = 2
    z_means = []
    for j in (1, 2):
        c = sol.coefficients[:, j]
        up, dn = c[:ms], c[ms:]
        z_means.append((up.conj() @ problem.z_spatial @ up
                        + dn.conj() @ problem.z_spatial @ dn).real)
    assert z_means[0] == pytest.approx(-0.7, abs=1e-12)
    assert z_means[1] == pytest.approx(+0.7, abs=1e-12)


def test_cholesky_breakdown_raises_and_fallback_recovers():
    rng = np.random.default_rng(1)
    H = rng.standard_normal((6, 6))
    H = H + H.T
    S = np.eye(6)
    S[5, 5] = -1e-18  # indefinite: Cholesky must fail
    base = _identity_problem(np.zeros((6, 6)))
    problem = dataclasses.replace(base, H=H, S=S)
    with pytest.raises(hq.IllConditionedBasisError):
        hq.solve(problem, 3)
    sol = hq.solve(problem, 3, fallback=True)
    # the fallback solves in the regular 5-dimensional subspace
    reference = np.linalg.eigvalsh(H[:5, :5])
    np.testing.assert_allclose(sol.energies, reference[:3], rtol=1e-10)


def test_plateau_scan_constant_level():
    grid = np.linspace(0.4, 1.0, 7)
    values = np.full(7, 0.5)
    plateau = solver._widest_plateau(grid, values, 0, 1e-4)
    assert plateau is not None
    assert (plateau.lo, plateau.hi) == (0.4, 1.0)
    assert plateau.rel_variation == 0.0


def test_plateau_scan_monotone_level_has_no_plateau():
    grid = np.linspace(0.4, 1.0, 7)
    values = 0.5 * (1.0 + np.linspace(0, 0.1, 7))  # 10% total drift
    plateau = solver._widest_plateau(grid, values, 0, 1e-4)
    assert plateau is None


def test_stabilize_validation():
    scaled = hq.scale(PHYS)
    with pytest.raises(ValueError):
        hq.stabilize(scaled, small_spec(), "sigma", [0.5, 0.6], 4)
    with pytest.raises(ValueError):
        hq.stabilize(scaled, small_spec(), "mu", [], 4)
    with pytest.raises(ValueError):
        hq.stabilize(scaled, small_spec(), "mu", [0.6, 0.5], 4)


def test_stabilize_records_failures_not_fatal():
    scaled = hq.scale(PHYS)
    # eta = 0.05 produces a degenerate overlap at the first grid point
    table = hq.stabilize(scaled, small_spec(N=8), "eta",
                         [0.05, 3.0, 4.0], 4)
    assert len(table.failures) == 1
    assert table.failures[0][0] == 0
    assert np.all(np.isnan(table.energies[0]))
    assert not np.any(np.isnan(table.energies[1:]))


def test_stabilize_workers_agree_with_serial():
    scaled = hq.scale(PHYS)
    spec = small_spec(L=4, N=4)
    grid = [0.6, 0.7, 0.8]
    serial = hq.stabilize(scaled, spec, "mu", grid, 6, workers=1)
    parallel = hq.stabilize(scaled, spec, "mu", grid, 6, workers=2)
    np.testing.assert_array_equal(serial.energies, parallel.energies)
