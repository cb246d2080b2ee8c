"""Negativity, pairwise negativity reports, entropy, witness and yield.

Pairwise measures on electrons can be taken either on the full ladders or
in the effective two-level encoding ``{0, +}`` (offsets 0 and +1, mapped to
local levels 0 and 1).  The compression reports how much weight it drops.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .hilbert import DensityMatrix, PureState, partial_trace, partial_transpose, reduced_density_matrix

HERMITIAN_TOLERANCE = 1e-10
LEAKAGE_TOLERANCE = 1e-6
_EPS = np.finfo(float).eps


def negativity(rho: DensityMatrix, transpose_on: int = 1) -> float:
    """``(||rho^T_b||_1 - 1) / 2`` for a two-subsystem state.

    Evaluated as the sum of the magnitudes of the negative eigenvalues of
    the partial transpose, which equals the trace-norm form for unit trace
    and stays meaningful for a slightly subnormalized input.
    """
    if len(rho.dims) != 2:
        raise ValueError(f"negativity needs exactly two subsystems, got dims {rho.dims}")
    m = rho.matrix
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > HERMITIAN_TOLERANCE:
        raise ValueError(f"input is not Hermitian (max deviation {dev:.2e})")
    pt = partial_transpose(rho, transpose_on)
    lam = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    cut = _EPS * max(1.0, float(np.max(np.abs(lam))))
    neg = lam[lam < -cut]
    return float(-neg.sum())


@dataclass(frozen=True)
class PairNegativityReport:
    """Negativity of every unordered pair, their mean and the dropped weight.

    Pair keys are positions within the chosen party list, starting at 0.
    """

    pair_values: dict
    average: float
    leakage: float = 0.0

    def values(self) -> np.ndarray:
        return np.array([self.pair_values[k] for k in sorted(self.pair_values)])

    def spread(self) -> float:
        v = self.values()
        return float(v.max() - v.min())


def _qubit_levels(dims: Sequence[int], parties: Sequence[int]) -> dict[int, list[int]]:
    levels = {}
    for p in parties:
        d = dims[p]
        if d == 2:
            continue
        if d % 2 == 0 or d < 3:
            raise ValueError(f"subsystem {p} of dimension {d} is not a sideband ladder")
        m = d // 2
        levels[p] = [m, m + 1]
    return levels


def _compress_rho(rho: DensityMatrix, levels: dict[int, list[int]]) -> tuple[np.ndarray, tuple[int, ...], float]:
    dims = list(rho.dims)
    t = rho.matrix.reshape(tuple(dims) * 2)
    n = len(dims)
    for sub, lv in levels.items():
        t = np.take(t, lv, axis=sub)
        t = np.take(t, lv, axis=n + sub)
        dims[sub] = len(lv)
    d = int(np.prod(dims))
    mat = t.reshape(d, d)
    tr = float(np.trace(mat).real)
    return mat, tuple(dims), max(0.0, 1.0 - tr)


def pairwise_negativity_report(rho_multi, effective_qubit_encoding: bool = False,
                               parties: Sequence[int] | None = None) -> PairNegativityReport:
    """Negativity of every pair of ``parties`` after tracing out the rest.

    ``rho_multi`` is a :class:`DensityMatrix` or a (possibly sparse)
    :class:`PureState`.  For a state on the composite electron-TLS basis the
    parties default to the electrons; otherwise to every subsystem.

    With ``effective_qubit_encoding`` each ladder party is restricted to
    offsets ``{0, +1}``; the dropped weight is reported as ``leakage`` and
    a value above 1e-6 raises.
    """
    pure = isinstance(rho_multi, PureState)
    dims = rho_multi.dims
    if parties is None:
        basis = getattr(rho_multi, "basis", None)
        parties = basis.electrons() if basis is not None else list(range(len(dims)))
    parties = [int(p) for p in parties]
    if len(parties) < 2:
        raise ValueError("need at least two parties")
    levels = _qubit_levels(dims, parties) if effective_qubit_encoding else {}
    values, leak = {}, 0.0
    for a, b in combinations(range(len(parties)), 2):
        pa, pb = parties[a], parties[b]
        if pure:
            lv = {k: v for k, v in levels.items() if k in (pa, pb)}
            pair, lk = reduced_density_matrix(rho_multi, [pa, pb], lv or None)
            mat, pdims = pair.matrix, pair.dims
        else:
            pair = partial_trace(rho_multi, [pa, pb])
            lv = {i: levels[p] for i, p in enumerate(sorted((pa, pb))) if p in levels}
            mat, pdims, lk = _compress_rho(pair, lv) if lv else (pair.matrix, pair.dims, 0.0)
        leak = max(leak, lk)
        if lk > LEAKAGE_TOLERANCE:
            raise ValueError(f"pair ({pa}, {pb}) leaks {lk:.3e} outside the {{0,+}} encoding")
        if lk > 0:
            mat = mat / (1.0 - lk)
        values[(a, b)] = negativity(DensityMatrix(pdims, mat, check=False))
    avg = float(np.mean(list(values.values())))
    return PairNegativityReport(values, avg, leak)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues below 1e-12 are dropped."""
    lam = np.linalg.eigvalsh(0.5 * (rho.matrix + rho.matrix.conj().T))
    lam = lam[lam > 1e-12]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def one_vs_rest_entropy(state, party: int, effective_qubit_encoding: bool = False) -> float:
    """Entropy of a single-party marginal of a pure state or density matrix."""
    if isinstance(state, PureState):
        lv = _qubit_levels(state.dims, [party]) if effective_qubit_encoding else None
        rho, lk = reduced_density_matrix(state, [party], lv or None)
    else:
        rho = partial_trace(state, [party])
        lk = 0.0
        if effective_qubit_encoding and rho.dims[0] != 2:
            mat, dims, lk = _compress_rho(rho, _qubit_levels(rho.dims, [0]))
            rho = DensityMatrix(dims, mat, check=False)
    if lk > LEAKAGE_TOLERANCE:
        raise ValueError(f"party {party} leaks {lk:.3e} outside the {{0,+}} encoding")
    if lk > 0:
        rho = DensityMatrix(rho.dims, rho.matrix / (1.0 - lk), check=False)
    return von_neumann_entropy(rho)


def _w_vector(n: int, weights) -> np.ndarray:
    w = np.full(n, 1.0 / np.sqrt(n), dtype=complex) if weights is None else np.asarray(weights, dtype=complex)
    if w.shape != (n,):
        raise ValueError(f"need {n} weights")
    vec = np.zeros(1 << n, dtype=complex)
    vec[[1 << (n - 1 - j) for j in range(n)]] = w
    return vec


def witness_expectation(rho: DensityMatrix, weights: Sequence[complex] | None = None,
                        phases: Sequence[float] | None = None) -> float:
    """``(N - 1)/N - <W|rho|W>`` on the ``{0, +}**N`` encoding.

    The target is ``sum_j w_j |E_j^(+)>`` with ``w_j`` from ``weights`` or
    ``exp(i phases_j) / sqrt(N)``; equal weights by default.
    """
    n = len(rho.dims)
    if any(d != 2 for d in rho.dims):
        raise ValueError("witness expects the effective two-level encoding on every electron")
    if phases is not None:
        if weights is not None:
            raise ValueError("give weights or phases, not both")
        weights = np.exp(1j * np.asarray(phases, dtype=float)) / np.sqrt(n)
    w = _w_vector(n, weights)
    return (n - 1) / n - rho.expectation(w)


def success_weighted_yield(probability: float, conditional_average_negativity: float) -> float:
    """``P * N_pair``."""
    if not -1e-12 <= probability <= 1 + 1e-12:
        raise ValueError(f"probability {probability} outside [0, 1]")
    if conditional_average_negativity < -1e-10:
        raise ValueError(f"negativity {conditional_average_negativity} is negative")
    return float(probability * conditional_average_negativity)
