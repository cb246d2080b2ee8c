"""Closed-form results for the square-pulse RWA model.

Conventions: ``g`` is the pulse area ``G T`` and ``delta`` the dimensionless
detuning ``Delta T / 2``; ``g_tilde = sqrt(g**2 + delta**2)``.  All functions
accept scalars or broadcastable arrays unless stated otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

SMALL_ROOT = 1e-6
DEFAULT_KAPPA = 6.0


def _sinc(x):
    """``sin(x) / x`` with its Taylor form below ``SMALL_ROOT``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SMALL_ROOT
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)


@dataclass(frozen=True)
class LocalAmplitudes:
    """Single-arm survival ``c_minus`` (and its conjugate) and transfer ``s``."""

    c_minus: complex
    c_plus: complex
    s: float

    def unitarity_defect(self):
        return np.abs(self.c_minus) ** 2 + self.s ** 2 - 1.0


def local_amplitudes(g, delta=0.0) -> LocalAmplitudes:
    g = np.asarray(g, dtype=float)
    delta = np.asarray(delta, dtype=float)
    gt = np.hypot(g, delta)
    sc = _sinc(gt)
    c_minus = np.cos(gt) - 1j * delta * sc
    s = g * sc
    if c_minus.ndim == 0:
        return LocalAmplitudes(complex(c_minus), complex(np.conj(c_minus)), float(s))
    return LocalAmplitudes(c_minus, np.conj(c_minus), s)


def p_heralding(n: int, g, delta=0.0):
    """All-ground heralding probability ``|s|^2 |c_minus|^(2N-2)``."""
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    g = np.asarray(g, dtype=float)
    delta = np.asarray(delta, dtype=float)
    gt = np.hypot(g, delta)
    sc = _sinc(gt)
    surv = np.cos(gt) ** 2 + (delta * sc) ** 2
    out = (g * sc) ** 2 * surv ** (int(n) - 1)
    return float(out) if out.ndim == 0 else out


def g_optimal(n: int) -> float:
    """Resonant area maximizing the heralding probability."""
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    return float(np.arccos(np.sqrt((n - 1) / n)))


def p_max(n: int) -> float:
    """``(1/N) ((N-1)/N)**(N-1)``, evaluated through ``log1p`` for large N."""
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1.0
    return float(np.exp((n - 1) * np.log1p(-1.0 / n)) / n)


def p_max_asymptotic(n: int) -> float:
    return float(np.exp(-1.0) / n)


def wn_pair_state(n: int) -> np.ndarray:
    """Two-party marginal of the N-party W state, basis ``|00>, |0+>, |+0>, |++>``."""
    if int(n) < 2:
        raise ValueError("n must be >= 2")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = (n - 2) / n
    rho[1:3, 1:3] = 1.0 / n
    return rho


def wn_pair_pt_eigenvalues(n: int) -> np.ndarray:
    """Eigenvalues of the partial transpose of :func:`wn_pair_state`, ascending."""
    if int(n) < 2:
        raise ValueError("n must be >= 2")
    root = np.sqrt((n - 2) ** 2 + 4.0)
    lam_m = ((n - 2) - root) / (2.0 * n)
    lam_p = ((n - 2) + root) / (2.0 * n)
    return np.sort(np.array([lam_m, 1.0 / n, 1.0 / n, lam_p]))


def pairwise_negativity_wn(n: int) -> float:
    """Pairwise negativity of the N-party W state."""
    if int(n) < 2:
        raise ValueError("n must be >= 2")
    # written without cancellation: (sqrt(a^2+4) - a) = 4 / (sqrt(a^2+4) + a)
    a = n - 2.0
    return float(2.0 / (n * (np.sqrt(a * a + 4.0) + a)))


def single_excitation_pair_negativity(weights: Sequence[complex], a: int, b: int) -> float:
    """Negativity of parties ``a, b`` of ``sum_j w_j |1_j>``.

    The marginal is an X state; its partial transpose has the single
    negative eigenvalue ``r/2 - sqrt((r/2)**2 + |w_a w_b|**2)`` with ``r`` the
    weight on the other parties.
    """
    w = np.asarray(weights, dtype=complex)
    p = np.abs(w) ** 2
    r = max(0.0, float(p.sum() - p[a] - p[b]))
    x = abs(w[a] * w[b])
    return float(np.hypot(0.5 * r, x) - 0.5 * r)


def single_excitation_entropy(weights: Sequence[complex], j: int) -> float:
    """One-versus-rest entropy (bits) of party ``j`` of ``sum_k w_k |1_k>``."""
    w = np.asarray(weights, dtype=complex)
    p = float(abs(w[j]) ** 2 / np.sum(np.abs(w) ** 2))
    return float(sum(-q * np.log2(q) for q in (p, 1.0 - p) if q > 1e-12)) + 0.0


def alpha_weights(areas: Sequence[float], deltas: Sequence[float], phases: Sequence[float] | None = None,
                  amplitudes: Sequence[complex] | None = None):
    """Heralded pathway amplitudes and their normalized weights.

    ``alpha_j = e^{i phi_j} s_j prod_{k != j} c_{k,-}``.  With ``amplitudes``
    (general atomic input ``c_j``) the prefactor ``e^{i phi_j}`` is replaced
    by ``c_j``, which already contains any ``1/sqrt(N)``.

    Returns ``(alpha, weights)``; the weights are ``|alpha_j|^2 / sum |alpha|^2``
    (all zero when every alpha vanishes).
    """
    g = np.asarray(areas, dtype=float)
    d = np.asarray(deltas, dtype=float)
    if g.shape != d.shape or g.ndim != 1:
        raise ValueError("areas and deltas must be equal-length 1-D sequences")
    if amplitudes is not None:
        if phases is not None:
            raise ValueError("give phases or amplitudes, not both")
        pref = np.asarray(amplitudes, dtype=complex)
    else:
        ph = np.zeros_like(g) if phases is None else np.asarray(phases, dtype=float)
        pref = np.exp(1j * ph)
    if pref.shape != g.shape:
        raise ValueError("phases/amplitudes must match the number of arms")
    loc = local_amplitudes(g, d)
    c = np.atleast_1d(loc.c_minus)
    s = np.atleast_1d(loc.s)
    alpha = np.empty(g.size, dtype=complex)
    for j in range(g.size):
        alpha[j] = pref[j] * s[j] * np.prod(np.delete(c, j))
    tot = float(np.sum(np.abs(alpha) ** 2))
    weights = np.abs(alpha) ** 2 / tot if tot > 0 else np.zeros(g.size)
    return alpha, weights


def fidelity_perturbed(alpha: Sequence[complex], phases: Sequence[float] | None = None) -> float:
    """``|sum_j alpha_j e^{-i phi_j}|^2 / (N sum_j |alpha_j|^2)``."""
    a = np.asarray(alpha, dtype=complex)
    tot = float(np.sum(np.abs(a) ** 2))
    if tot == 0.0:
        raise ValueError("alpha vanishes identically")
    ph = np.zeros(a.size) if phases is None else np.asarray(phases, dtype=float)
    return float(abs(np.sum(a * np.exp(-1j * ph))) ** 2 / (a.size * tot))


def bloch_siegert_delta_eff(g, Delta, T, Omega_plus, kappa: float = DEFAULT_KAPPA):
    """``Delta T / 2 + kappa g**2 / (Omega_+ T)``."""
    wt = np.asarray(Omega_plus, dtype=float) * np.asarray(T, dtype=float)
    if np.any(wt <= 0):
        raise ValueError("Omega_plus * T must be positive")
    out = 0.5 * np.asarray(Delta) * np.asarray(T) + kappa * np.asarray(g) ** 2 / wt
    return float(out) if np.ndim(out) == 0 else out


def pair_yield(n: int, g, delta=0.0):
    """Success-weighted W-state pair negativity ``P * N_pair`` (ideal transfer)."""
    return pairwise_negativity_wn(n) * p_heralding(n, g, delta)


def multipartite_amplitudes(areas: Sequence[float], deltas: Sequence[float],
                            amplitudes: Sequence[complex]) -> dict:
    """Closed-form final state of independent square-pulse arms.

    Starting from the reference electrons and ``sum_j c_j |g..e_j..g>``, the
    excited arm maps ``|0,e> -> c_+ |0,e> - i s |+1,g>`` and every spectator
    ``|0,g> -> c_- |0,g> - i s |-1,e>``.  Returns ``{(offsets, tls): amplitude}``
    with offsets and TLS states as tuples (``0 = g``, ``1 = e``).

    The amplitudes refer to the frame co-rotating at ``+-Delta/2``; see
    :func:`simulation_frame_phase` for the map to the propagated state.
    """
    g = np.asarray(areas, dtype=float)
    d = np.asarray(deltas, dtype=float)
    c = np.asarray(amplitudes, dtype=complex)
    n = g.size
    if d.shape != g.shape or c.shape != g.shape:
        raise ValueError("areas, deltas and amplitudes must have equal length")
    loc = [local_amplitudes(gj, dj) for gj, dj in zip(g, d)]
    out: dict = {}
    for j in range(n):
        if c[j] == 0:
            continue
        factors = []
        for k in range(n):
            lk = loc[k]
            if k == j:
                factors.append((((0, 1), lk.c_plus), ((1, 0), -1j * lk.s)))
            else:
                factors.append((((0, 0), lk.c_minus), ((-1, 1), -1j * lk.s)))
        for combo in np.ndindex(*(2,) * n):
            amp = c[j]
            offs, tls = [], []
            for k, pick in enumerate(combo):
                (m, q), a = factors[k][pick]
                amp *= a
                offs.append(m)
                tls.append(q)
            key = (tuple(offs), tuple(tls))
            out[key] = out.get(key, 0j) + amp
    return out


def simulation_frame_phase(tls_states: Sequence[int], deltas: Sequence[float]) -> complex:
    """Phase ``prod_j exp(i delta_j (1 - 2 q_j))`` taking closed-form amplitudes
    to those propagated under the ``exp(-i Delta t)`` coupling convention."""
    q = np.asarray(tls_states, dtype=float)
    d = np.asarray(deltas, dtype=float)
    return complex(np.exp(1j * np.sum(d * (1.0 - 2.0 * q))))


def variance_law_infidelity(alpha: Sequence[complex], phases: Sequence[float] | None = None) -> float:
    """Second-order estimate ``(1/N) sum_j |eps_j - mean(eps)|**2`` of ``1 - F``.

    ``eps_j`` is the relative deviation of ``alpha_j e^{-i phi_j}`` from its
    mean over the arms.
    """
    a = np.asarray(alpha, dtype=complex)
    ph = np.zeros(a.size) if phases is None else np.asarray(phases, dtype=float)
    r = a * np.exp(-1j * ph)
    mean = r.mean()
    if mean == 0:
        raise ValueError("mean pathway amplitude vanishes")
    eps = r / mean - 1.0
    return float(np.mean(np.abs(eps - eps.mean()) ** 2))
