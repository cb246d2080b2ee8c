import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_ket
from heraldw import analytic
from heraldw.entanglement import negativity, one_vs_rest_entropy
from heraldw.hilbert import DensityMatrix, PureState

# high-precision oracles (mpmath, 30 digits)
S_G1_D1 = 0.698455998636608359842596703257
SURVIVAL_G1_D1 = 0.512159217968538140976721789609
G_OPT_3 = 0.615479708670387341067464589124
PMAX_8 = 0.049086987972259521484375  # = 7**7 / 8**8
W3_PAIR_NEG = 0.206011329583298282734862278122  # (sqrt 5 - 1) / 6
YIELD_PEAK_3 = 0.0305201969753034492940536708329
PMAX_1000_TIMES_NE = 1.00050029185429575
PMAX_100_RATIO = 1.005029355466
N2_NEG_1000 = 1.002003001994
WEIGHTED_PAIR_NEG = 0.148593604922330194676227094349  # parties 0,1 of (0.6, 0.48, 0.64)
H_ONE_THIRD = 0.918295834054489514787072277281


def test_local_amplitudes_oracles():
    loc = analytic.local_amplitudes(1.0, 1.0)
    assert loc.s == pytest.approx(S_G1_D1, abs=1e-15)
    assert abs(loc.c_minus) ** 2 == pytest.approx(SURVIVAL_G1_D1, abs=1e-15)
    assert loc.c_plus == np.conj(loc.c_minus)
    res = analytic.local_amplitudes(np.pi / 2)
    assert res.s == pytest.approx(1.0) and abs(res.c_minus) < 1e-15


@given(g=st.floats(0, 20), delta=st.floats(-20, 20))
def test_local_unitarity(g, delta):
    assert abs(analytic.local_amplitudes(g, delta).unitarity_defect()) < 1e-13


def test_small_root_branch_is_continuous():
    a = analytic.local_amplitudes(1e-7, 0.0)
    b = analytic.local_amplitudes(1.0001e-6, 0.0)
    assert a.s == pytest.approx(1e-7, rel=1e-12)
    assert b.s == pytest.approx(1.0001e-6, rel=1e-12)
    np.testing.assert_allclose(analytic._sinc([0.0, 1e-7, 2e-6]), [1, 1, 1], atol=1e-12)


def test_array_inputs():
    g = np.linspace(0, 3, 7)
    loc = analytic.local_amplitudes(g, 0.5)
    assert loc.s.shape == (7,)
    assert analytic.p_heralding(3, g).shape == (7,)


def test_g_optimal_and_p_max_oracles():
    assert analytic.g_optimal(3) == pytest.approx(G_OPT_3, abs=1e-15)
    assert analytic.g_optimal(1) == pytest.approx(np.pi / 2)
    assert analytic.p_max(3) == pytest.approx(4 / 27, abs=1e-16)
    assert analytic.p_max(8) == pytest.approx(PMAX_8, abs=1e-16)
    assert analytic.p_max(1) == 1.0
    assert analytic.p_max(1000) * 1000 * np.e == pytest.approx(PMAX_1000_TIMES_NE, abs=1e-13)
    assert analytic.p_max(100) / analytic.p_max_asymptotic(100) == pytest.approx(PMAX_100_RATIO, abs=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 20])
def test_p_max_attained_at_g_optimal(n):
    g = analytic.g_optimal(n)
    assert analytic.p_heralding(n, g) == pytest.approx(analytic.p_max(n), abs=1e-15)
    grid = np.linspace(0, np.pi, 20001)
    assert analytic.p_heralding(n, grid).max() <= analytic.p_max(n) + 1e-15


@given(n=st.integers(1, 50), g=st.floats(0, 10), delta=st.floats(-10, 10))
def test_p_heralding_bounded_by_p_max(n, g, delta):
    p = analytic.p_heralding(n, g, delta)
    assert 0.0 <= p <= analytic.p_max(n) + 1e-14


def test_p_max_decreasing():
    vals = [analytic.p_max(n) for n in range(1, 200)]
    assert np.all(np.diff(vals) < 0)


def test_invalid_n():
    for fn in (analytic.g_optimal, analytic.p_max, analytic.wn_pair_state, analytic.pairwise_negativity_wn):
        with pytest.raises(ValueError):
            fn(0)
    with pytest.raises(ValueError):
        analytic.p_heralding(0, 1.0)


def test_wn_pair_negativity_oracles():
    assert analytic.pairwise_negativity_wn(3) == pytest.approx(W3_PAIR_NEG, abs=1e-16)
    assert analytic.pairwise_negativity_wn(2) == pytest.approx(0.5, abs=1e-16)
    assert 1000**2 * analytic.pairwise_negativity_wn(1000) == pytest.approx(N2_NEG_1000, abs=1e-11)
    assert analytic.pair_yield(3, G_OPT_3) == pytest.approx(YIELD_PEAK_3, abs=1e-16)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_wn_pair_state_matches_numeric_negativity(n):
    rho = analytic.wn_pair_state(n)
    assert np.trace(rho).real == pytest.approx(1.0)
    num = negativity(DensityMatrix((2, 2), rho))
    assert num == pytest.approx(analytic.pairwise_negativity_wn(n), abs=1e-14)
    lam = analytic.wn_pair_pt_eigenvalues(n)
    assert lam.sum() == pytest.approx(1.0)
    assert -lam[0] == pytest.approx(num, abs=1e-14)


def test_single_excitation_pair_oracle():
    c = [0.6, 0.48, 0.64]
    assert analytic.single_excitation_pair_negativity(c, 0, 1) == pytest.approx(WEIGHTED_PAIR_NEG, abs=1e-15)
    uniform = np.ones(5) / np.sqrt(5)
    assert analytic.single_excitation_pair_negativity(uniform, 1, 3) == pytest.approx(
        analytic.pairwise_negativity_wn(5), abs=1e-15
    )


def _w_ket(w):
    n = len(w)
    idx = np.array([1 << (n - 1 - j) for j in range(n)])
    order = np.argsort(idx)
    return PureState((2,) * n, np.asarray(w)[order], idx[order])


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_single_excitation_formulas_match_numerics(seed, n):
    rng = np.random.default_rng(seed)
    w = random_ket(n, rng)
    ket = _w_ket(w)
    rho = ket.density_matrix()
    from heraldw.hilbert import partial_trace

    pair = partial_trace(rho, [0, n - 1])
    assert negativity(pair) == pytest.approx(
        analytic.single_excitation_pair_negativity(w, 0, n - 1), abs=1e-12
    )
    assert one_vs_rest_entropy(ket, 1) == pytest.approx(analytic.single_excitation_entropy(w, 1), abs=1e-10)


def test_entropy_oracle():
    assert analytic.single_excitation_entropy(np.ones(3), 0) == pytest.approx(H_ONE_THIRD, abs=1e-15)
    assert analytic.single_excitation_entropy([1, 0, 0], 0) == 0.0


def test_alpha_weights_symmetric_and_phased():
    alpha, w = analytic.alpha_weights([0.6] * 3, [0.0] * 3, phases=[0, 1, 2])
    np.testing.assert_allclose(w, 1 / 3)
    assert analytic.fidelity_perturbed(alpha, [0, 1, 2]) == pytest.approx(1.0, abs=1e-15)
    assert analytic.fidelity_perturbed(alpha) < 1.0
    _, w0 = analytic.alpha_weights([0.0, 0.0], [0.0, 0.0])
    np.testing.assert_array_equal(w0, [0, 0])
    with pytest.raises(ValueError):
        analytic.alpha_weights([1, 1], [0, 0], phases=[0, 0], amplitudes=[1, 0])
    with pytest.raises(ValueError):
        analytic.alpha_weights([1, 1], [0])
    with pytest.raises(ValueError):
        analytic.fidelity_perturbed([0, 0])


def test_alpha_equals_heralding_probability():
    areas, deltas = [0.5, 0.7, 0.9], [0.1, -0.2, 0.3]
    alpha, _ = analytic.alpha_weights(areas, deltas)
    # with W input the heralded norm is sum |alpha_j|^2 / N
    manual = sum(
        analytic.local_amplitudes(areas[j], deltas[j]).s ** 2
        * np.prod([abs(analytic.local_amplitudes(areas[k], deltas[k]).c_minus) ** 2 for k in range(3) if k != j])
        for j in range(3)
    )
    assert np.sum(np.abs(alpha) ** 2) == pytest.approx(manual, abs=1e-15)


@given(eps=st.lists(st.floats(-1e-3, 1e-3), min_size=3, max_size=3))
def test_variance_law_second_order(eps):
    g = analytic.g_optimal(3)
    alpha, _ = analytic.alpha_weights(g * (1 + np.array(eps)), [0.0] * 3)
    infid = 1 - analytic.fidelity_perturbed(alpha)
    est = analytic.variance_law_infidelity(alpha)
    assert abs(infid - est) <= 5e-3 * max(est, 1e-14) + 1e-13


def test_bloch_siegert_shift():
    assert analytic.bloch_siegert_delta_eff(0.6, 0.0, 10.0, 2.0) == pytest.approx(0.108, abs=1e-15)
    assert analytic.bloch_siegert_delta_eff(0.6, 0.1, 10.0, 2.0, kappa=0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        analytic.bloch_siegert_delta_eff(0.6, 0.0, 10.0, 0.0)


def test_multipartite_amplitudes_norm_and_frame():
    amps = np.array([0.6, 0.48j, 0.64])
    out = analytic.multipartite_amplitudes([0.4, 1.2, 2.0], [0.3, -0.5, 0.0], amps)
    assert sum(abs(a) ** 2 for a in out.values()) == pytest.approx(1.0, abs=1e-14)
    # all-ground heralded amplitudes reproduce alpha_j up to the input coefficient
    alpha, _ = analytic.alpha_weights([0.4, 1.2, 2.0], [0.3, -0.5, 0.0], amplitudes=amps)
    for j in range(3):
        offs = tuple(1 if k == j else 0 for k in range(3))
        assert out[(offs, (0, 0, 0))] == pytest.approx(-1j * alpha[j])
    assert analytic.simulation_frame_phase([0, 1], [0.2, 0.2]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        analytic.multipartite_amplitudes([1, 1], [0, 0], [1])


def test_trivial_amplitude_cases():
    loc = analytic.local_amplitudes(0.0, 1.0)
    assert loc.c_minus == pytest.approx(np.exp(-1j), abs=1e-15)
    assert loc.s == 0.0
    assert analytic.p_heralding(2, np.pi / 4) == pytest.approx(0.25, abs=1e-15)
    for n in (1, 4, 9):
        assert analytic.p_heralding(n, 0.0, 0.3) == 0.0


def test_single_pathway_fidelity():
    assert analytic.fidelity_perturbed([1, 0, 0]) == pytest.approx(1 / 3, abs=1e-16)
    assert analytic.fidelity_perturbed([0.3, 0.3, 0.3]) == pytest.approx(1.0, abs=1e-15)


def test_bloch_siegert_long_window_limit():
    vals = [analytic.bloch_siegert_delta_eff(0.6, 0.01, T, 2.0) for T in (10.0, 1e3, 1e6)]
    bare = [0.5 * 0.01 * T for T in (10.0, 1e3, 1e6)]
    shifts = np.subtract(vals, bare)
    assert np.all(np.diff(shifts) < 0)
    assert shifts[-1] < 1e-5
