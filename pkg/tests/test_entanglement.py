import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_density, random_ket, random_unitary
from heraldw import analytic
from heraldw.entanglement import (
    negativity,
    one_vs_rest_entropy,
    pairwise_negativity_report,
    success_weighted_yield,
    von_neumann_entropy,
    witness_expectation,
)
from heraldw.evolve import final_state
from heraldw.hamiltonian import SystemConfig
from heraldw.herald import project_all_ground
from heraldw.hilbert import BasisDescriptor, DensityMatrix, PureState, product_state

seeds = st.integers(0, 2**32 - 1)


def _pure(v, dims):
    return DensityMatrix(dims, np.outer(v, v.conj()))


def test_bell_state_negativity():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert negativity(_pure(bell, (2, 2))) == pytest.approx(0.5, abs=1e-15)
    assert negativity(_pure(bell, (2, 2)), transpose_on=0) == pytest.approx(0.5, abs=1e-15)


def test_negativity_input_checks():
    with pytest.raises(ValueError, match="two subsystems"):
        negativity(DensityMatrix((2, 2, 2), np.eye(8) / 8))
    bad = DensityMatrix((2, 2), np.eye(4) / 4 + 1e-8 * np.triu(np.ones((4, 4)), 1), check=False)
    with pytest.raises(ValueError, match="Hermitian"):
        negativity(bad)


@given(seed=seeds, da=st.integers(2, 3), db=st.integers(2, 3))
def test_schmidt_formula_and_symmetry(seed, da, db):
    rng = np.random.default_rng(seed)
    v = random_ket(da * db, rng)
    rho = _pure(v, (da, db))
    sv = np.linalg.svd(v.reshape(da, db), compute_uv=False)
    expected = (sv.sum() ** 2 - 1) / 2
    assert negativity(rho, 1) == pytest.approx(expected, abs=1e-12)
    assert negativity(rho, 0) == pytest.approx(expected, abs=1e-12)


@given(seed=seeds)
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_density((2, 3), rng, rank=2)
    u = np.kron(random_unitary(2, rng), random_unitary(3, rng))
    rot = u @ rho @ u.conj().T
    assert negativity(DensityMatrix((2, 3), rot)) == pytest.approx(negativity(DensityMatrix((2, 3), rho)), abs=1e-12)


@given(seed=seeds, k=st.integers(1, 6))
def test_separable_mixtures_have_zero_negativity(seed, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k))
    rho = sum(pi * np.kron(random_density((2,), rng, 1), random_density((3,), rng, 1)) for pi in p)
    assert negativity(DensityMatrix((2, 3), rho)) < 1e-13


@given(seed=seeds)
def test_negativity_convex_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    a = random_density((2, 2), rng)
    b = random_density((2, 2), rng)
    t = rng.uniform()
    na, nb = negativity(DensityMatrix((2, 2), a)), negativity(DensityMatrix((2, 2), b))
    nm = negativity(DensityMatrix((2, 2), t * a + (1 - t) * b))
    assert nm >= 0
    assert nm <= t * na + (1 - t) * nb + 1e-12


def _biseparable(n, rng):
    cut = rng.integers(1, n)
    left = random_ket(2**cut, rng)
    right = random_ket(2 ** (n - cut), rng)
    v = np.kron(left, right)
    perm = rng.permutation(n)
    t = v.reshape((2,) * n).transpose(perm).reshape(-1)
    return np.outer(t, t.conj())


@given(seed=seeds, n=st.integers(3, 4), k=st.integers(1, 4))
def test_witness_nonnegative_on_biseparable_states(seed, n, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k))
    rho = sum(pi * _biseparable(n, rng) for pi in p)
    assert witness_expectation(DensityMatrix((2,) * n, rho)) >= -1e-12


def test_witness_on_w_states():
    for n in (3, 4, 5):
        w = np.zeros(2**n)
        w[[1 << j for j in range(n)]] = 1 / np.sqrt(n)
        assert witness_expectation(_pure(w, (2,) * n)) == pytest.approx(-1 / n, abs=1e-14)
    ph = np.array([0.0, 0.7, 1.9])
    w = np.zeros(8, dtype=complex)
    w[[4, 2, 1]] = np.exp(1j * ph) / np.sqrt(3)
    rho = _pure(w, (2, 2, 2))
    assert witness_expectation(rho, phases=ph) == pytest.approx(-1 / 3, abs=1e-14)
    assert witness_expectation(rho) > -1 / 3
    with pytest.raises(ValueError):
        witness_expectation(DensityMatrix((3, 2), np.eye(6) / 6))
    with pytest.raises(ValueError):
        witness_expectation(rho, weights=np.ones(3) / np.sqrt(3), phases=ph)


def test_pairwise_report_on_w3():
    w = np.zeros(8)
    w[[4, 2, 1]] = 1 / np.sqrt(3)
    rep = pairwise_negativity_report(_pure(w, (2, 2, 2)))
    assert set(rep.pair_values) == {(0, 1), (0, 2), (1, 2)}
    assert rep.average == pytest.approx(analytic.pairwise_negativity_wn(3), abs=1e-15)
    assert rep.spread() < 1e-15
    with pytest.raises(ValueError):
        pairwise_negativity_report(_pure(w, (2, 2, 2)), parties=[0])


def test_pure_and_dense_paths_agree():
    cfg = SystemConfig.symmetric(3, 0.9, 0.3)
    s = final_state(cfg)
    from heraldw.herald import unconditional_electron_state

    dense = unconditional_electron_state(s)
    a = pairwise_negativity_report(s)
    b = pairwise_negativity_report(dense)
    np.testing.assert_allclose(a.values(), b.values(), atol=1e-13)


def test_effective_encoding_matches_ladder_when_no_leakage():
    cfg = SystemConfig.symmetric(3, analytic.g_optimal(3))
    h = project_all_ground(final_state(cfg))
    ket = h.conditional_ket
    ladder = pairwise_negativity_report(ket)
    qubit = pairwise_negativity_report(ket, effective_qubit_encoding=True)
    dense_q = pairwise_negativity_report(ket.density_matrix(), effective_qubit_encoding=True)
    np.testing.assert_allclose(ladder.values(), qubit.values(), atol=1e-12)
    np.testing.assert_allclose(dense_q.values(), qubit.values(), atol=1e-12)
    assert qubit.leakage < 1e-20


def test_effective_encoding_leakage_raises():
    b = BasisDescriptor(2, 1)
    v = np.zeros(9)
    v[np.ravel_multi_index((2, 1), (3, 3))] = 0.8
    v[np.ravel_multi_index((0, 1), (3, 3))] = 0.6
    ket = PureState((3, 3), v)
    with pytest.raises(ValueError, match="leaks"):
        pairwise_negativity_report(ket, effective_qubit_encoding=True)
    with pytest.raises(ValueError, match="leaks"):
        pairwise_negativity_report(ket.density_matrix(), effective_qubit_encoding=True)
    with pytest.raises(ValueError, match="leaks"):
        one_vs_rest_entropy(ket, 0, effective_qubit_encoding=True)
    assert b.ladder_dim == 3


def test_entropies():
    assert von_neumann_entropy(DensityMatrix((2,), np.eye(2) / 2)) == pytest.approx(1.0)
    assert von_neumann_entropy(DensityMatrix((2,), np.diag([1.0, 0.0]))) == 0.0
    w = np.zeros(8)
    w[[4, 2, 1]] = 1 / np.sqrt(3)
    ket = PureState((2, 2, 2), w)
    h = one_vs_rest_entropy(ket, 0)
    assert h == pytest.approx(analytic.single_excitation_entropy(np.ones(3), 0), abs=1e-12)
    assert one_vs_rest_entropy(ket.density_matrix(), 2) == pytest.approx(h, abs=1e-12)


@given(seed=seeds)
def test_pure_state_entropy_symmetric_across_cut(seed):
    rng = np.random.default_rng(seed)
    v = random_ket(6, rng)
    ket = PureState((2, 3), v)
    assert one_vs_rest_entropy(ket, 0) == pytest.approx(one_vs_rest_entropy(ket, 1), abs=1e-10)


def test_entropy_on_ladder_state_with_encoding():
    b = BasisDescriptor(3, 2)
    s = product_state(b, [0, 0, 0], np.ones(3) / np.sqrt(3))
    # the electrons are untouched, so every electron is pure
    assert one_vs_rest_entropy(s, 0) == 0.0
    assert one_vs_rest_entropy(s, 0, effective_qubit_encoding=True) == 0.0


def test_success_weighted_yield():
    assert success_weighted_yield(4 / 27, analytic.pairwise_negativity_wn(3)) == pytest.approx(
        analytic.pair_yield(3, analytic.g_optimal(3)), abs=1e-16
    )
    with pytest.raises(ValueError):
        success_weighted_yield(1.5, 0.1)
    with pytest.raises(ValueError):
        success_weighted_yield(0.5, -0.1)


def test_product_state_negativity_zero(rng):
    rho = np.kron(random_density((2,), rng), random_density((3,), rng))
    assert negativity(DensityMatrix((2, 3), rho)) == 0.0


def test_witness_on_maximally_mixed_state():
    assert witness_expectation(DensityMatrix((2, 2, 2), np.eye(8) / 8)) == pytest.approx(13 / 24, abs=1e-15)


@given(seed=seeds)
def test_witness_sign_matches_fidelity_threshold(seed):
    rng = np.random.default_rng(seed)
    w = np.zeros(8, dtype=complex)
    w[[4, 2, 1]] = 1 / np.sqrt(3)
    mix = rng.uniform()
    rho = mix * np.outer(w, w.conj()) + (1 - mix) * random_density((2, 2, 2), rng)
    dm = DensityMatrix((2, 2, 2), rho)
    fid = dm.expectation(w)
    assert (witness_expectation(dm) < 0) == (fid > 2 / 3)


def test_yield_values():
    assert success_weighted_yield(0.0, 0.3) == 0.0
    g = 0.9
    p = np.sin(g) ** 2 * np.cos(g) ** 4
    assert success_weighted_yield(p, analytic.pairwise_negativity_wn(3)) == pytest.approx(
        (np.sqrt(5) - 1) / 6 * p, abs=1e-16
    )


def test_symmetric_run_pairs_agree():
    cfg = SystemConfig.symmetric(3, 1.0, 0.6)
    s = final_state(cfg)
    assert pairwise_negativity_report(s).spread() < 1e-10
    assert pairwise_negativity_report(s, parties=[3, 4, 5]).spread() < 1e-10
