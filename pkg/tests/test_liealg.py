import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qudit_unruh.fock import QuditState, occupation_array
from qudit_unruh.liealg import (
    E,
    Edag,
    GeneratorKind,
    GeneratorLabel,
    H,
    canonical_coefficients,
    chevalley_serre_residuals,
    covariance_residual,
    exp_lift_residual,
    fundamental_generator,
    lift_one_body,
    permutation_su,
    random_su,
    reconstruct_block,
    symmetric_generator,
    symmetric_power,
)
from qudit_unruh.unruh import output_block

from conftest import qudits


def all_labels(d):
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if i != j:
                for kind in GeneratorKind:
                    yield GeneratorLabel(kind, i, j)


def test_fundamental_examples():
    assert np.array_equal(fundamental_generator(2, H(1, 2)).matrix, np.diag([1, -1]))
    assert np.array_equal(fundamental_generator(2, E(1, 2)).matrix, [[0, 1], [0, 0]])
    assert np.array_equal(fundamental_generator(2, Edag(1, 2)).matrix, [[0, 0], [1, 0]])
    assert np.array_equal(fundamental_generator(3, H(1, 3)).matrix, np.diag([1, 0, -1]))


def test_label_validation():
    with pytest.raises(ValueError):
        GeneratorLabel(GeneratorKind.StepE, 2, 2)
    with pytest.raises(ValueError):
        fundamental_generator(2, E(1, 3))
    with pytest.raises(ValueError):
        symmetric_generator(3, 0, E(1, 2))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_single_photon_sector_is_fundamental(d):
    for lab in all_labels(d):
        assert np.array_equal(symmetric_generator(d, 1, lab).matrix, fundamental_generator(d, lab).matrix)


def test_spin_one_cartan():
    assert np.array_equal(symmetric_generator(2, 2, H(1, 2)).matrix, np.diag([2.0, 0.0, -2.0]))


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_cartan_diagonal_and_step_adjoint(d, k):
    for i, j in itertools.permutations(range(1, d + 1), 2):
        h = symmetric_generator(d, k, H(i, j)).matrix
        assert np.isrealobj(h) and np.array_equal(h, np.diag(np.diag(h)))
        assert np.array_equal(symmetric_generator(d, k, E(i, j)).matrix.T, symmetric_generator(d, k, Edag(i, j)).matrix)
        assert np.array_equal(symmetric_generator(d, k, E(j, i)).matrix, symmetric_generator(d, k, Edag(i, j)).matrix)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_chevalley_serre(d, k):
    res = chevalley_serre_residuals(d, k)
    assert max(res.values()) <= 1e-12, res
    for i in range(1, d):
        h = symmetric_generator(d, k, H(i, i + 1)).matrix
        e = symmetric_generator(d, k, E(i, i + 1)).matrix
        assert np.abs(h @ e - e @ h - 2 * e).max() <= 1e-12


@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_lift_preserves_commutators(d, k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Y = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    lx, ly = lift_one_body(X, k), lift_one_body(Y, k)
    assert np.abs(lift_one_body(X @ Y - Y @ X, k) - (lx @ ly - ly @ lx)).max() <= 1e-11


def test_reconstruct_basis_projector():
    d = 4
    coeffs = {H(1, j): 1.0 for j in range(2, d + 1)}
    expected = np.zeros((d, d))
    expected[0, 0] = 1
    assert np.allclose(reconstruct_block(d, 1, coeffs), expected)


@given(qudits(2, 4))
@settings(max_examples=10, deadline=None)
def test_coefficients_are_k_independent(b):
    coeffs = canonical_coefficients(b)
    assert len(coeffs) == 2 * b.d * (b.d - 1)
    for k in range(1, 6):
        assert np.abs(reconstruct_block(b.d, k, coeffs) - output_block(b.d, k, b)).max() <= 1e-12


def test_uniform_input_coefficients():
    d = 3
    coeffs = canonical_coefficients(QuditState(np.ones(d) / math.sqrt(d)))
    steps = [v for lab, v in coeffs.items() if lab.kind is GeneratorKind.StepE]
    # d * beta_i conj(beta_j) = d * (1/d)
    assert np.allclose(steps, 1.0)
    cartan = [v for lab, v in coeffs.items() if lab.kind is GeneratorKind.CartanH]
    assert np.allclose(cartan, 1 / d)


def test_reconstruct_rejects_bad_maps():
    with pytest.raises(ValueError):
        reconstruct_block(2, 1, {})
    with pytest.raises(ValueError):
        reconstruct_block(2, 1, {(1, 2): 1.0})
    with pytest.raises(ValueError):
        reconstruct_block(2, 1, {E(1, 3): 1.0})


def permanent(M):
    n = M.shape[0]
    return sum(np.prod([M[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def symmetric_power_by_permanents(U, k):
    occ = occupation_array(U.shape[0], k)
    out = np.zeros((len(occ),) * 2, dtype=complex)
    for r, M in enumerate(occ):
        rows = np.repeat(np.arange(len(M)), M)
        for c, L in enumerate(occ):
            cols = np.repeat(np.arange(len(L)), L)
            norm = math.sqrt(math.prod(map(math.factorial, M)) * math.prod(map(math.factorial, L)))
            out[r, c] = permanent(U[np.ix_(rows, cols)]) / norm
    return out


@pytest.mark.parametrize("d,k", [(2, 1), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_symmetric_power_matches_permanents(d, k, rng):
    U = random_su(d, rng)
    assert np.allclose(symmetric_power(U, k), symmetric_power_by_permanents(U, k), atol=1e-12)


def test_symmetric_power_trivial_cases(rng):
    U = random_su(3, rng)
    assert np.allclose(symmetric_power(np.eye(3), 4), np.eye(15))
    assert np.allclose(symmetric_power(U, 1), U)
    with pytest.raises(ValueError):
        symmetric_power(2 * np.eye(2), 2)


@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_symmetric_power_homomorphism_and_unitarity(d, k, seed):
    rng = np.random.default_rng(seed)
    U, V = random_su(d, rng), random_su(d, rng)
    S = symmetric_power(U, k)
    assert np.abs(symmetric_power(U @ V, k) - S @ symmetric_power(V, k)).max() <= 1e-9
    assert np.abs(S.conj().T @ S - np.eye(S.shape[0])).max() <= 1e-9


def test_exponentiated_generators(rng):
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    X = (X + X.conj().T) / 2
    X -= np.trace(X) / 2 * np.eye(2)
    assert exp_lift_residual(X, 2) <= 1e-8
    assert np.abs(symmetric_power(expm(1j * X), 2) - expm(1j * lift_one_body(X, 2))).max() <= 1e-8


def test_random_su_is_special_unitary(rng):
    for d in (2, 3, 5):
        g = random_su(d, rng)
        assert np.allclose(g.conj().T @ g, np.eye(d), atol=1e-12)
        assert abs(np.linalg.det(g) - 1) < 1e-12


def test_covariance_identity_is_exact(rng):
    assert covariance_residual(3, 3, QuditState.random(3, rng), np.eye(3)) <= 1e-14


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_covariance_random_group_elements(d, k, rng):
    worst = max(covariance_residual(d, k, QuditState.random(d, rng), random_su(d, rng)) for _ in range(20))
    assert worst <= 1e-10


def test_covariance_under_permutations(rng):
    for perm in itertools.permutations(range(3)):
        g = permutation_su(perm)
        assert covariance_residual(3, 3, QuditState.random(3, rng), g) <= 1e-12
        # permutations act on occupations by relabelling modes, up to a global phase
        S = symmetric_power(g, 3)
        occ = occupation_array(3, 3)
        target = [tuple(row[np.argsort(perm)]) for row in occ]
        lookup = {tuple(r): i for i, r in enumerate(occ)}
        phase = S[lookup[target[0]], 0]
        for c, t in enumerate(target):
            col = np.zeros(len(occ), dtype=complex)
            col[lookup[t]] = phase
            assert np.allclose(S[:, c], col, atol=1e-12)


def test_covariance_rejects_non_special(rng):
    with pytest.raises(ValueError):
        covariance_residual(2, 1, QuditState.random(2, rng), 1j * np.eye(2) @ np.diag([1, 1j]))
