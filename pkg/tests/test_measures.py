import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainent.measures import (
    EntanglementReport,
    batch_measures,
    binary_entropy,
    check_density_matrix,
    concurrence,
    correlation_matrix,
    entanglement_of_formation,
    entanglement_report,
    fef_bound,
    fully_entangled_fraction,
    negativity,
    partial_transpose,
    theta,
)

from conftest import BELL, MIXED, haar_unitary, ket, projector, random_density, random_ket, werner

seeds = st.integers(0, 2**32 - 1)


def von_neumann(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def product_density(rng):
    a, b = random_ket(rng, 2), random_ket(rng, 2)
    return projector(np.kron(a, b)), a, b


def bloch(v):
    rho = projector(v)
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


# -- partial transpose ------------------------------------------------------------


def test_partial_transpose_product(rng):
    a = projector(random_ket(rng, 2))
    b = projector(random_ket(rng, 2))
    pt = partial_transpose(np.kron(a, b))
    np.testing.assert_allclose(pt, np.kron(a, b.T), atol=1e-15)
    assert np.linalg.eigvalsh(pt)[0] > -1e-12


def test_partial_transpose_bell_spectrum():
    np.testing.assert_allclose(np.linalg.eigvalsh(partial_transpose(BELL)), [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_partial_transpose_involution(rng):
    rho = random_density(rng)
    assert np.array_equal(partial_transpose(partial_transpose(rho)), rho)


def test_shape_checked():
    with pytest.raises(ValueError):
        negativity(np.eye(2))


# -- analytic values --------------------------------------------------------------


def test_bell_values():
    n, lmin = negativity(BELL)
    assert n == pytest.approx(0.5, abs=1e-9)
    assert lmin == pytest.approx(-0.5, abs=1e-9)
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-9)
    assert entanglement_of_formation(concurrence(BELL)) == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(correlation_matrix(BELL), np.diag([1, -1, 1]), atol=1e-15)
    assert theta(BELL) == pytest.approx(3.0, abs=1e-9)
    assert fully_entangled_fraction(BELL) == pytest.approx(1.0, abs=1e-9)


def test_other_bell_states():
    for v in (ket(1, 0, 0, -1), ket(0, 1, 1, 0), ket(0, 1, -1, 0), ket(1, 0, 0, 1j)):
        rho = projector(v)
        r = entanglement_report(rho)
        assert r.concurrence == pytest.approx(1, abs=1e-9)
        assert r.theta == pytest.approx(3, abs=1e-9)
        assert r.fef == pytest.approx(1, abs=1e-9)


def test_maximally_mixed():
    np.testing.assert_allclose(correlation_matrix(MIXED), 0, atol=1e-16)
    assert fully_entangled_fraction(MIXED) == pytest.approx(0.25, abs=1e-12)
    assert concurrence(MIXED) == 0
    assert negativity(MIXED) == (0.0, pytest.approx(0.25))


def test_werner_half():
    rho = werner(0.5)
    n, lmin = negativity(rho)
    assert lmin == pytest.approx(-1 / 8, abs=1e-12)
    assert n == pytest.approx(1 / 8, abs=1e-12)
    assert concurrence(rho) == pytest.approx(0.25, abs=1e-12)
    assert fully_entangled_fraction(rho) == pytest.approx(5 / 8, abs=1e-12)
    assert theta(rho) == pytest.approx(1.5, abs=1e-12)
    assert (1 + theta(rho)) / 4 == pytest.approx(5 / 8, abs=1e-12)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_werner_family(p):
    rho = werner(p)
    assert concurrence(rho) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-12)
    assert negativity(rho)[0] == pytest.approx(max(0, (3 * p - 1) / 4), abs=1e-12)


def test_ghz_marginal():
    rho = np.diag([0.5, 0, 0, 0.5]).astype(complex)
    np.testing.assert_allclose(correlation_matrix(rho), np.diag([0, 0, 1]), atol=1e-16)
    assert theta(rho) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(rho) == 0


def test_product_values(rng):
    for _ in range(20):
        rho, a, b = product_density(rng)
        n, lmin = negativity(rho)
        assert n < 1e-12 and lmin > -1e-12
        assert concurrence(rho) < 1e-12
        assert theta(rho) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(correlation_matrix(rho), np.outer(bloch(a), bloch(b)), atol=1e-12)


def test_eof_values():
    assert entanglement_of_formation(0.0) == 0.0
    assert entanglement_of_formation(1.0) == 1.0
    assert entanglement_of_formation(0.6) == pytest.approx(0.46899559358928117, abs=1e-12)
    assert entanglement_of_formation(0.6) == pytest.approx(binary_entropy(0.9), abs=1e-15)
    assert entanglement_of_formation(1 + 5e-10) == 1.0
    for bad in (-1e-6, 1.01):
        with pytest.raises(ValueError):
            entanglement_of_formation(bad)


def test_eof_monotone():
    c = np.linspace(0, 1, 201)
    e = [entanglement_of_formation(x) for x in c]
    assert np.all(np.diff(e) > 0)


def test_pure_state_concurrence_closed_form(rng):
    for _ in range(1000):
        a, b, c, d = random_ket(rng, 4)
        assert concurrence(projector([a, b, c, d])) == pytest.approx(2 * abs(a * d - b * c), abs=1e-10)


def test_fef_bound():
    assert fef_bound(0.3) == 0
    assert fef_bound(0.5) == 0.0
    assert fef_bound(1.0) == pytest.approx(1.0)
    f = np.linspace(0.5, 1, 51)
    assert np.all(np.diff([fef_bound(x) for x in f]) > 0)


def test_correlation_matrix_rejects_non_hermitian():
    rho = MIXED.copy()
    rho[0, 3] = 0.1j
    with pytest.raises(ValueError):
        correlation_matrix(rho)


def test_check_density_matrix():
    check_density_matrix(BELL)
    with pytest.raises(ValueError):
        check_density_matrix(2 * BELL)
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.5, -0.5, 0, 0]))
    bad = MIXED.copy()
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        check_density_matrix(bad)


def test_report_fields():
    r = entanglement_report(werner(0.8))
    assert isinstance(r, EntanglementReport)
    assert set(r.to_dict()) == {
        "negativity", "lambda_min_pt", "concurrence", "eof", "theta", "fef", "fef_bound", "distillable"
    }
    assert r.distillable


def test_batch_matches_scalar(rng):
    rhos = np.array([random_density(rng) for _ in range(50)] + [BELL, MIXED, werner(0.5)])
    out = batch_measures(rhos)
    for k, rho in enumerate(rhos):
        n, lmin = negativity(rho)
        assert out["negativity"][k] == pytest.approx(n, abs=1e-12)
        assert out["lambda_min_pt"][k] == pytest.approx(lmin, abs=1e-12)
        assert out["concurrence"][k] == pytest.approx(concurrence(rho), abs=1e-12)
        assert out["theta"][k] == pytest.approx(theta(rho), abs=1e-12)
        assert out["eof"][k] == pytest.approx(entanglement_of_formation(concurrence(rho)), abs=1e-10)


# -- properties -------------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(seed=seeds, rank=st.integers(1, 4))
def test_negativity_equals_minus_lambda_min(seed, rank):
    rho = random_density(np.random.default_rng(seed), rank)
    n, lmin = negativity(rho)
    assert n == pytest.approx(max(0.0, -lmin), abs=1e-10)
    w = np.linalg.eigvalsh(partial_transpose(rho))
    assert np.sum(w < -1e-12) <= 1


@settings(max_examples=200, deadline=None)
@given(seed=seeds, rank=st.integers(1, 4))
def test_local_unitary_invariance(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, rank)
    u = np.kron(haar_unitary(rng), haar_unitary(rng))
    a, b = entanglement_report(rho), entanglement_report(u @ rho @ u.conj().T)
    for name in ("negativity", "lambda_min_pt", "concurrence", "eof", "theta", "fef"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), abs=1e-9), name


@settings(max_examples=200, deadline=None)
@given(seed=seeds, rank=st.integers(1, 4), p=st.floats(0, 1))
def test_zero_sets_and_bounds(seed, rank, p):
    rng = np.random.default_rng(seed)
    # mixing with noise puts many samples near the separability boundary
    rho = p * random_density(rng, rank) + (1 - p) * MIXED
    r = entanglement_report(rho)
    if r.concurrence < 1e-12:
        assert r.negativity < 1e-9
    if r.negativity < 1e-12:
        assert r.concurrence < 1e-9
    assert r.eof >= r.fef_bound - 1e-9
    if r.fef >= 0.5:
        assert r.fef == pytest.approx((1 + r.theta) / 4, abs=1e-9)
        if abs(r.theta - 1) > 1e-9:
            assert r.distillable == (r.theta > 1)


@settings(max_examples=200, deadline=None)
@given(seed=seeds)
def test_pure_state_eof_is_entropy(seed):
    v = random_ket(np.random.default_rng(seed), 4)
    rho = projector(v)
    marginal = rho.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    assert entanglement_of_formation(concurrence(rho)) == pytest.approx(von_neumann(marginal), abs=1e-9)
