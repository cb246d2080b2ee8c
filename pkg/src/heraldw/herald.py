"""All-ground heralding, branch probabilities and electron-sector fidelities.

Global indices factor as ``electron_index * 2**N + tls_index`` because the
TLS digits are the least significant ones; the all-ground outcome is
``tls_index == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import DensityMatrix, PureState, reduced_density_matrix

DEGENERATE_PROBABILITY = 1e-14
LEAKAGE_TOLERANCE = 1e-6


def _split(state: PureState):
    basis = state.basis
    if basis is None:
        raise ValueError("state must carry its BasisDescriptor")
    idx = state.indices
    n = basis.arm_count
    return basis, idx >> n, idx & ((1 << n) - 1)


def _upper_indices(n: int, m_cut: int) -> np.ndarray:
    """Electron-register indices of ``|E_j^(+)>``, j = 1..N."""
    d = 2 * m_cut + 1
    out = []
    for j in range(n):
        digits = [m_cut] * n
        digits[j] = m_cut + 1
        out.append(np.ravel_multi_index(digits, (d,) * n))
    return np.array(out, dtype=np.int64)


def _qubit_compress(ket: PureState, m_cut: int) -> tuple[np.ndarray, float]:
    """Dense vector of ``ket`` on ``{0, +}**N`` and the weight left outside."""
    n = len(ket.dims)
    digits = ket.digits() - m_cut
    inside = np.all((digits == 0) | (digits == 1), axis=1)
    vec = np.zeros(1 << n, dtype=complex)
    if np.any(inside):
        q = np.ravel_multi_index(tuple(digits[inside].T), (2,) * n)
        vec[q] = ket.amplitudes[inside]
    out = ket.amplitudes[~inside]
    return vec, float(np.vdot(out, out).real)


@dataclass(frozen=True)
class HeraldResult:
    """Outcome of projecting the TLS register onto ``|g...g>``.

    ``branch_amplitudes[j]`` is the *unnormalized* amplitude
    ``<E_j^(+), G_N | Psi>``.  ``conditional_ket`` is the normalized electron
    state (on the full ladders) or ``None`` when the branch is not
    operationally accessible (probability below 1e-14).
    """

    probability: float
    branch_amplitudes: np.ndarray
    conditional_ket: PureState | None
    sideband_cut: int
    leakage: float

    @property
    def accessible(self) -> bool:
        return self.conditional_ket is not None

    @property
    def arm_count(self) -> int:
        return len(self.branch_amplitudes)

    def qubit_vector(self) -> np.ndarray:
        if not self.accessible:
            raise ValueError("heralded branch is not operationally accessible (probability < 1e-14)")
        return _qubit_compress(self.conditional_ket, self.sideband_cut)[0]

    @property
    def conditional_state(self) -> DensityMatrix | None:
        """Conditional electron state in the effective ``{0, +}`` encoding.

        ``None`` when the branch is not accessible.
        """
        if not self.accessible:
            return None
        if self.leakage > LEAKAGE_TOLERANCE:
            raise ValueError(f"conditional state leaks {self.leakage:.3e} outside the {{0,+}} encoding")
        v = self.qubit_vector()
        v = v / np.linalg.norm(v)
        return DensityMatrix((2,) * self.arm_count, np.outer(v, v.conj()))

    def ladder_state(self) -> DensityMatrix:
        if not self.accessible:
            raise ValueError("heralded branch is not operationally accessible (probability < 1e-14)")
        return self.conditional_ket.density_matrix()


def project_all_ground(state: PureState) -> HeraldResult:
    basis, e_idx, t_idx = _split(state)
    n, m = basis.arm_count, basis.sideband_cut
    sel = t_idx == 0
    amps = np.asarray(state.amplitudes)[sel]
    e_sel = e_idx[sel]
    prob = float(np.vdot(amps, amps).real)
    upper = _upper_indices(n, m)
    branch = np.zeros(n, dtype=complex)
    pos = np.searchsorted(e_sel, upper)
    for j, (p, u) in enumerate(zip(pos, upper)):
        if p < e_sel.size and e_sel[p] == u:
            branch[j] = amps[p]
    if prob < DEGENERATE_PROBABILITY:
        return HeraldResult(prob, branch, None, m, 0.0)
    keep = np.abs(amps) > 0
    ket = PureState(basis.electron_dims, amps[keep] / np.sqrt(prob), e_sel[keep])
    leak = _qubit_compress(ket, m)[1]
    return HeraldResult(prob, branch, ket, m, leak)


def target_w_state(n: int, weights: Sequence[complex] | None = None, *, sideband_cut: int | None = None) -> PureState:
    """``sum_j w_j |E_j^(+)>``; equal weights give the electron W state.

    Without ``sideband_cut`` the state lives in the ``{0, +}**N`` encoding,
    otherwise on the full ladders of half-width ``sideband_cut``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    w = np.full(n, 1.0 / np.sqrt(n), dtype=complex) if weights is None else np.asarray(weights, dtype=complex)
    if w.shape != (n,):
        raise ValueError(f"need {n} weights")
    if abs(np.vdot(w, w).real - 1.0) > 1e-10:
        raise ValueError("target weights are not normalized")
    if sideband_cut is None:
        idx = np.array([1 << (n - 1 - j) for j in range(n)], dtype=np.int64)
        dims = (2,) * n
    else:
        idx = _upper_indices(n, sideband_cut)
        dims = (2 * sideband_cut + 1,) * n
    order = np.argsort(idx)
    keep = w[order] != 0
    return PureState(dims, w[order][keep], idx[order][keep])


def conditional_fidelity(herald: HeraldResult, target: PureState) -> float:
    """``<target| rho_cond |target>``."""
    if not herald.accessible:
        raise ValueError("heralded branch is not operationally accessible (probability < 1e-14)")
    n = herald.arm_count
    if tuple(target.dims) == (2,) * n:
        v = herald.qubit_vector()
        t = target.dense()
        return float(abs(np.vdot(t, v)) ** 2)
    return float(abs(target.overlap(herald.conditional_ket)) ** 2)


def unconditional_electron_state(state: PureState) -> DensityMatrix:
    """``Tr_TLS |Psi><Psi|`` on the full electron ladders."""
    basis = state.basis
    rho, _ = reduced_density_matrix(state, basis.electrons())
    return rho


def tls_branch_probabilities(state: PureState) -> np.ndarray:
    """Probability of each TLS outcome, indexed by the TLS register index."""
    basis, _, t_idx = _split(state)
    a = np.abs(np.asarray(state.amplitudes)) ** 2
    return np.bincount(t_idx, weights=a, minlength=basis.tls_dim)


def unconditional_fidelity(state: PureState, target: PureState) -> float:
    """``<target| Tr_TLS |Psi><Psi| |target>`` computed without forming rho."""
    basis, e_idx, t_idx = _split(state)
    n, m = basis.arm_count, basis.sideband_cut
    if tuple(target.dims) == (2,) * n:
        digits = target.digits() + m
        t_e = np.ravel_multi_index(tuple(digits.T), basis.electron_dims)
        order = np.argsort(t_e)
        t_e, t_amp = t_e[order], target.amplitudes[order]
    else:
        t_e, t_amp = target.indices, target.amplitudes
    pos = np.minimum(np.searchsorted(t_e, e_idx), len(t_e) - 1)
    hit = t_e[pos] == e_idx
    contrib = np.where(hit, np.conj(t_amp[pos]) * state.amplitudes, 0.0)
    re = np.bincount(t_idx, weights=contrib.real, minlength=basis.tls_dim)
    im = np.bincount(t_idx, weights=contrib.imag, minlength=basis.tls_dim)
    return float(np.sum(re * re + im * im))


def target_manifold_weight(state: PureState) -> float:
    """Population of the span of ``{|E_j^(+)>}`` in the electron marginal."""
    basis, e_idx, _ = _split(state)
    upper = _upper_indices(basis.arm_count, basis.sideband_cut)
    a = np.asarray(state.amplitudes)[np.isin(e_idx, upper)]
    return float(np.vdot(a, a).real)
