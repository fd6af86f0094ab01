import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qudit_unruh.infotheory import (
    FiniteChannel,
    InvalidStateError,
    Z_MAX,
    blockwise_trace_distance,
    coherent_information,
    conditional_entropy,
    entropy_HA,
    entropy_HC,
    entropy_tail_bound,
    fidelity,
    h2,
    mutual_information,
    partial_trace,
    private_quantum_capacity,
    purify,
    quantum_capacity,
    trace_distance,
    trace_norm,
    trace_norm_bound,
    von_neumann_entropy,
    wiretap_rate_lower_bound,
)
from qudit_unruh.fock import QuditState
from qudit_unruh.unruh import BlockState, ChannelSpec, assemble_output, maximally_mixed_output

# Q(d, z) and H(A) from 40-digit summation of the eigenvalue series
REFERENCE = {
    (2, 0.5): (0.43576321737672406, 5.2757055068438874),
    (3, 0.25): (1.0530844800011176, 4.9099948867825814),
    (5, 0.9): (0.12152709072335899, 24.814223891119686),
    (10, 0.6): (0.65956754624100431, 25.996496963237925),
    (2, 0.99): (0.0072490522359885909, 17.27363819764063),
}


def random_density(n, rng, rank=None):
    rank = rank or n
    G = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def bell():
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return np.outer(psi, psi.conj())


# -- entropy -------------------------------------------------------------------


def test_entropy_basics(rng):
    psi = QuditState.random(4, rng)
    assert von_neumann_entropy(psi.projector()) == pytest.approx(0.0, abs=1e-12)
    for n in (2, 3, 7):
        assert von_neumann_entropy(np.eye(n) / n) == pytest.approx(math.log2(n))


def test_entropy_clipping_and_rejection():
    assert von_neumann_entropy(np.diag([1.0, -5e-11])) == pytest.approx(0.0)
    with pytest.raises(InvalidStateError):
        von_neumann_entropy(np.diag([1.1, -0.1]))
    with pytest.raises(InvalidStateError):
        von_neumann_entropy(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_block_entropy_equals_flat(rng):
    full = assemble_output(ChannelSpec(2, 0.5, 1e-12), QuditState.random(2, rng))
    st10 = BlockState(2, "A", full.blocks[:10])
    assert von_neumann_entropy(st10) == pytest.approx(von_neumann_entropy(st10.to_dense()), abs=1e-12)


def test_h2():
    assert h2(0.5) == pytest.approx(1.0)
    assert h2(0.0) == 0.0 and h2(1.0) == 0.0
    with pytest.raises(ValueError):
        h2(1.5)


# -- distances -------------------------------------------------------------------


def test_distance_and_fidelity_extremes(rng):
    rho = random_density(3, rng)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    a, b = np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])
    assert trace_distance(a, b) == pytest.approx(1.0)
    assert fidelity(a, b) == pytest.approx(0.0, abs=1e-14)


def test_fidelity_with_pure_state(rng):
    rho = random_density(4, rng)
    psi = QuditState.random(4, rng).projector()
    assert fidelity(rho, psi) == pytest.approx(np.trace(rho @ psi).real, abs=1e-10)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_distance(np.eye(2) / 2, np.eye(3) / 3)
    with pytest.raises(ValueError):
        fidelity(np.eye(2) / 2, np.eye(3) / 3)


def test_fuchs_van_de_graaf(rng):
    violations = 0
    for _ in range(100):
        n = int(rng.integers(2, 6))
        phi = random_density(n, rng, rank=int(rng.integers(1, n + 1)))
        tau = random_density(n, rng, rank=int(rng.integers(1, n + 1)))
        F, norm = fidelity(phi, tau), 2 * trace_distance(phi, tau)
        violations += F < 1 - norm - 1e-12
        violations += norm > 2 * math.sqrt(max(0.0, 1 - F)) + 1e-12
    assert violations == 0


def test_trace_norm_bound_dominates(rng):
    X = rng.normal(size=(30, 30))
    X = X + X.T
    assert trace_norm(X) <= trace_norm_bound(X) + 1e-12


def test_blockwise_distance_counts_missing_sectors(rng):
    spec = ChannelSpec(2, 0.3, 1e-6)
    a = assemble_output(spec, QuditState.random(2, rng))
    b = BlockState(2, "A", a.blocks[:-1], a.tail_bound)
    dist = blockwise_trace_distance(a, b)
    assert dist.total == pytest.approx(0.5 * a.blocks[-1].weight)
    assert dist.exact
    with pytest.raises(ValueError):
        trace_distance(a, np.eye(2))


# -- bipartite -----------------------------------------------------------------


def test_bell_pair_informations():
    assert coherent_information(bell(), (2, 2)) == pytest.approx(1.0)
    assert mutual_information(bell(), (2, 2)) == pytest.approx(2.0)
    assert conditional_entropy(bell(), (2, 2)) == pytest.approx(-1.0)


def test_product_state_has_no_correlation(rng):
    rho = np.kron(random_density(2, rng), random_density(3, rng))
    assert mutual_information(rho, (2, 3)) == pytest.approx(0.0, abs=1e-10)


def test_factor_dimensions_checked():
    with pytest.raises(ValueError):
        mutual_information(np.eye(6) / 6, (4, 2))


@given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_mutual_information_nonnegative(da, db, seed):
    rho = random_density(da * db, np.random.default_rng(seed))
    assert mutual_information(rho, (da, db)) >= -1e-9


def test_alicki_fannes(rng):
    violations = 0
    for _ in range(100):
        da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        rho = random_density(da * db, rng)
        eps_mix = float(rng.uniform(0, 0.15))
        sigma = (1 - eps_mix) * rho + eps_mix * random_density(da * db, rng)
        eps = 2 * trace_distance(rho, sigma)
        assert eps <= 1 / math.e
        gap = abs(conditional_entropy(rho, (da, db)) - conditional_entropy(sigma, (da, db)))
        violations += gap > 4 * eps * math.log2(da) + 2 * h2(eps) + 1e-12
    assert violations == 0


def test_partial_trace_of_product(rng):
    a, b = QuditState.random(2, rng), QuditState.random(3, rng)
    rho = np.kron(a.projector(), b.projector())
    assert np.allclose(partial_trace(rho, (2, 3), 0), a.projector())
    assert np.allclose(partial_trace(rho, (2, 3), 1), b.projector())
    three = np.kron(rho, np.eye(2) / 2)
    assert np.allclose(partial_trace(three, (2, 3, 2), [0, 2]), np.kron(a.projector(), np.eye(2) / 2))


def test_purify_maximally_mixed_qubit():
    psi = purify(np.eye(2) / 2)
    joint = np.outer(psi, psi.conj())
    assert von_neumann_entropy(joint) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(partial_trace(joint, (2, 2), 0)) == pytest.approx(1.0)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_purification_marginals(n, seed):
    rho = random_density(n, np.random.default_rng(seed), rank=1 + seed % n)
    psi = purify(rho)
    joint = np.outer(psi, psi.conj())
    a, b = partial_trace(joint, (n, n), 0), partial_trace(joint, (n, n), 1)
    assert np.allclose(a, rho, atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b), atol=1e-10)


# -- finite channels -------------------------------------------------------------


def test_finite_channel_construction():
    with pytest.raises(ValueError):
        FiniteChannel(np.ones((2, 2)), 2, 2, 1)
    ident = FiniteChannel.identity(3)
    rho = np.diag([0.2, 0.3, 0.5])
    assert np.allclose(ident.apply(rho), rho)
    assert np.allclose(ident.complementary(rho), [[1.0]])


def test_wiretap_bound_for_replacement_eavesdropper():
    d = 3
    psi = np.eye(d).reshape(-1) / math.sqrt(d)
    N = FiniteChannel.identity(d)
    E = FiniteChannel.replacement(d, [1, 0])
    assert wiretap_rate_lower_bound(N, E, psi) == pytest.approx(math.log2(d))
    assert wiretap_rate_lower_bound(N, N, psi) == pytest.approx(0.0, abs=1e-12)


def random_isometry(din, dout, rng):
    G = rng.normal(size=(dout, din)) + 1j * rng.normal(size=(dout, din))
    q, _ = np.linalg.qr(G)
    return q


def test_wiretap_bound_against_direct_kraus_evaluation(rng):
    for _ in range(10):
        VN = random_isometry(2, 4, rng)
        VE = random_isometry(2, 4, rng)
        N, E = FiniteChannel(VN, 2, 2, 2), FiniteChannel(VE, 2, 2, 2)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)

        def direct(V):
            kraus = [V.reshape(2, 2, 2)[:, e, :] for e in range(2)]
            rho = sum(np.kron(np.eye(2), K) @ np.outer(psi, psi.conj()) @ np.kron(np.eye(2), K).conj().T for K in kraus)
            out = np.einsum("abad->bd", rho.reshape(2, 2, 2, 2))
            return von_neumann_entropy(out) - von_neumann_entropy(rho)

        assert wiretap_rate_lower_bound(N, E, psi) == pytest.approx(0.5 * (direct(VN) - direct(VE)), abs=1e-10)


def test_wiretap_dimension_mismatch():
    with pytest.raises(ValueError):
        wiretap_rate_lower_bound(FiniteChannel.identity(2), FiniteChannel.identity(3), np.ones(4) / 2)


# -- capacity series -------------------------------------------------------------


@pytest.mark.parametrize("dz", sorted(REFERENCE))
def test_reference_values(dz):
    d, z = dz
    q_ref, ha_ref = REFERENCE[dz]
    q, ha = quantum_capacity(d, z), entropy_HA(d, z)
    assert q.tail_bound <= 1e-12
    assert q.value == pytest.approx(q_ref, abs=q.tail_bound + 1e-13)
    assert ha.value == pytest.approx(ha_ref, abs=ha.tail_bound + 1e-13 * ha_ref)


def test_zero_acceleration_endpoints():
    assert quantum_capacity(2, 0.0).value == pytest.approx(1.0, abs=1e-12)
    for d in (2, 3, 5, 10):
        assert quantum_capacity(d, 0.0).value == pytest.approx(math.log2(d), abs=1e-12)
        assert private_quantum_capacity(d, 0.0).value == pytest.approx(0.0, abs=1e-12)
        assert entropy_HA(d, 0.0).value == pytest.approx(math.log2(d))
        assert entropy_HC(d, 0.0).value == 0.0


def test_small_z_continuity():
    for d in (2, 5):
        assert quantum_capacity(d, 1e-9).value == pytest.approx(math.log2(d), abs=1e-7)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("z", [0.2, 0.5, 0.8])
def test_series_against_truncated_matrices(d, z):
    tol = 1e-12
    spec = ChannelSpec(d, z, tail_epsilon=1e-10)
    for side, series in (("A", entropy_HA), ("C", entropy_HC)):
        st_ = maximally_mixed_output(spec, side)
        gap = series(d, z, tol).value - von_neumann_entropy(st_)
        assert -tol <= gap <= tol + entropy_tail_bound(d, z, len(st_))


def test_capacity_is_entropy_difference():
    for d in (2, 3, 5):
        for z in np.linspace(0.05, 0.95, 10):
            q = quantum_capacity(d, z).value
            assert q == pytest.approx(entropy_HA(d, z).value - entropy_HC(d, z).value, abs=4e-12)


def test_capacity_from_truncated_matrices():
    spec = ChannelSpec(2, 0.5, tail_epsilon=1e-12)
    h_a = von_neumann_entropy(maximally_mixed_output(spec, "A"))
    h_c = von_neumann_entropy(maximally_mixed_output(spec, "C"))
    assert quantum_capacity(2, 0.5).value == pytest.approx(h_a - h_c, abs=1e-8)


def test_private_capacity_identities():
    for d in (2, 3, 5, 10):
        for z in np.linspace(0, 0.99, 25):
            qp = private_quantum_capacity(d, z).value
            q = quantum_capacity(d, z).value
            assert abs(2 * qp + q - math.log2(d)) <= 1e-10
            ha, hc = entropy_HA(d, z).value, entropy_HC(d, z).value
            assert qp == pytest.approx(0.5 * (math.log2(d) + hc - ha), abs=1e-9)


def test_private_capacity_near_full_acceleration():
    assert private_quantum_capacity(2, 0.999).value == pytest.approx(0.5, abs=0.05)


@pytest.mark.parametrize("d", [2, 3, 5, 10])
def test_monotone_in_acceleration(d):
    grid = np.linspace(0, 0.99, 50)
    q = np.array([quantum_capacity(d, z).value for z in grid])
    qp = np.array([private_quantum_capacity(d, z).value for z in grid])
    assert np.all(np.diff(q) < 0) and np.all(q > 0)
    assert np.all(np.diff(qp) > 0) and np.all(qp[1:] > 0)
    ha = np.array([entropy_HA(d, z).value for z in grid])
    hc = np.array([entropy_HC(d, z).value for z in grid])
    assert np.all(ha > hc)


def test_z_range_enforced():
    for f in (quantum_capacity, private_quantum_capacity, entropy_HA, entropy_HC):
        with pytest.raises(ValueError):
            f(2, 1.0)
        with pytest.raises(ValueError):
            f(2, Z_MAX + 1e-9)
    with pytest.raises(ValueError):
        quantum_capacity(1, 0.2)


def test_entropy_tail_bound_decreases():
    b = [entropy_tail_bound(3, 0.6, K) for K in (5, 20, 80)]
    assert b[0] > b[1] > b[2] > 0
    assert entropy_tail_bound(3, 0.0, 1) == 0.0
