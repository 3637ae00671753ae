import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainent.qstate import (
    MAX_QUBITS,
    InitialStateKind,
    PureState,
    QubitSample,
    build_initial_state,
    haar_qubit_amplitudes,
    middle_pair,
    purity,
    reduced_density_matrix,
    sample_haar_qubit,
    single_qubit_density,
)

from conftest import BELL, random_ket


def test_uniforms_zero_give_ket_zero():
    q = QubitSample.from_uniforms(0.0, 0.0, 0.0)
    np.testing.assert_allclose(q.amplitudes, [1, 0], atol=1e-15)


def test_phi_uniform_one_gives_ket_one():
    q = QubitSample.from_uniforms(0.3, 0.7, 1.0)
    assert q.phi == pytest.approx(np.pi / 2)
    assert abs(q.amplitudes[0]) < 1e-15
    assert abs(q.amplitudes[1]) == pytest.approx(1.0)


def test_orthogonal_state():
    q = QubitSample.from_uniforms(0.1, 0.6, 0.35)
    assert abs(np.vdot(q.orthogonal, q.amplitudes)) < 1e-15
    assert np.linalg.norm(q.orthogonal) == pytest.approx(1.0)


def test_haar_population_mean():
    amps = haar_qubit_amplitudes(np.random.default_rng(3), 1_000_000)
    p0 = np.abs(amps[:, 0]) ** 2
    assert abs(p0.mean() - 0.5) < 0.0015
    # uniform on the Bloch sphere: z = p0 - p1 is uniform on [-1, 1]
    z = 2 * p0 - 1
    assert abs(np.var(z) - 1 / 3) < 3e-3


def test_vectorised_sampler_consumes_stream_like_scalar_one():
    a, b = np.random.default_rng(9), np.random.default_rng(9)
    vec = haar_qubit_amplitudes(a, 5)
    single = np.array([sample_haar_qubit(b).amplitudes for _ in range(5)])
    np.testing.assert_allclose(vec, single, atol=1e-15)


def test_pure_state_validation():
    with pytest.raises(ValueError):
        PureState(2, np.ones(4))
    with pytest.raises(ValueError):
        PureState(2, np.ones(8) / np.sqrt(8))
    with pytest.raises(ValueError):
        PureState(MAX_QUBITS + 1, np.zeros(2))
    with pytest.raises(ValueError):
        PureState.basis(1)
    s = PureState.basis(3, 5)
    assert not s.amplitudes.flags.writeable


def test_homogeneous_zero():
    s = build_initial_state("zero", 4, (1, 2), np.random.default_rng(0))
    expected = np.zeros(16)
    expected[0] = 1
    np.testing.assert_array_equal(s.amplitudes, expected)


def test_random_product_marginals_pure():
    s = build_initial_state(InitialStateKind.RANDOM_PRODUCT, 3, (0, 1), np.random.default_rng(1))
    for q in range(3):
        assert purity(single_qubit_density(s, q)) == pytest.approx(1.0, abs=1e-10)


def test_env_random_structure():
    s = build_initial_state("env-random", 6, (2, 3), np.random.default_rng(2))
    rho = reduced_density_matrix(s, (2, 3))
    assert purity(rho) == pytest.approx(1.0, abs=1e-10)
    # the pair itself is a product state
    rho_a = rho.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    rho_b = rho.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
    np.testing.assert_allclose(rho, np.kron(rho_a, rho_b), atol=1e-10)
    assert purity(reduced_density_matrix(s, (0, 1))) < 1 - 1e-3


def test_env_random_places_pair_qubits():
    # explicit small-n construction as the oracle
    rng = np.random.default_rng(4)
    s = build_initial_state("env-random", 4, (0, 2), rng)
    rng = np.random.default_rng(4)
    qa, qb = haar_qubit_amplitudes(rng, 2)
    env = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    env /= np.linalg.norm(env)
    e = env.reshape(2, 2)  # qubits 1, 3
    expected = np.einsum("a,c,bd->abcd", qa, qb, e).reshape(-1)
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


def test_initial_state_rejects_bad_pairs():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        build_initial_state("product", 4, (2, 2), rng)
    with pytest.raises(ValueError):
        build_initial_state("product", 4, (0, 4), rng)
    with pytest.raises(ValueError):
        build_initial_state("product", 1, (0, 1), rng)
    with pytest.raises(ValueError):
        build_initial_state("nonsense", 4, (0, 1), rng)


def test_bell_times_zero():
    psi = np.kron(np.array([1, 0, 0, 1]) / np.sqrt(2), np.eye(8)[0])
    rho = reduced_density_matrix(PureState(5, psi), (0, 1))
    np.testing.assert_allclose(rho, BELL, atol=1e-15)


def test_ghz_marginal():
    n = 4
    psi = np.zeros(1 << n)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    for pair in [(0, 1), (0, 3), (1, 2), (2, 3)]:
        rho = reduced_density_matrix(psi, pair)
        np.testing.assert_allclose(rho, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)


def test_partial_trace_matches_direct_summation(rng):
    n = 4
    psi = random_ket(rng, 1 << n)
    a, b = 1, 3
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(1 << n):
        for j in range(1 << n):
            bits_i = [(i >> (n - 1 - q)) & 1 for q in range(n)]
            bits_j = [(j >> (n - 1 - q)) & 1 for q in range(n)]
            if all(bits_i[q] == bits_j[q] for q in range(n) if q not in (a, b)):
                rho[2 * bits_i[a] + bits_i[b], 2 * bits_j[a] + bits_j[b]] += psi[i] * np.conj(psi[j])
    np.testing.assert_allclose(reduced_density_matrix(psi, (a, b)), rho, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 9), data=st.data())
def test_partial_trace_properties(seed, n, data):
    rng = np.random.default_rng(seed)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1).filter(lambda x: x != a))
    psi = random_ket(rng, 1 << n)
    rho = reduced_density_matrix(psi, (a, b))
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-10
    assert np.linalg.eigvalsh(rho)[0] > -1e-9
    # swapping the labels permutes the basis |xy> -> |yx>
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(reduced_density_matrix(psi, (b, a)), swap @ rho @ swap, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8))
def test_product_state_reduced_factorizes(seed, n):
    s = build_initial_state("product", n, (0, 1), np.random.default_rng(seed))
    for a, b in [(0, n - 1), (n // 2 - 1, n // 2)] if n > 2 else [(0, 1)]:
        rho = reduced_density_matrix(s, (a, b))
        np.testing.assert_allclose(rho, np.kron(single_qubit_density(s, a), single_qubit_density(s, b)), atol=1e-10)


@pytest.mark.parametrize("kind", ["product", "zero", "env-random"])
def test_sampling_is_bit_deterministic(kind):
    a = build_initial_state(kind, 7, (2, 3), np.random.default_rng(77))
    b = build_initial_state(kind, 7, (2, 3), np.random.default_rng(77))
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()


@pytest.mark.parametrize("n,r,expected", [(12, 1, (5, 6)), (12, 2, (5, 7)), (12, 3, (4, 7)), (14, 1, (6, 7)), (5, 1, (2, 3))])
def test_middle_pair(n, r, expected):
    assert middle_pair(n, r) == expected
