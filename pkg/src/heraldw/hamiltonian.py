"""Coupling envelopes and interaction-picture generators (hbar = 1).

The generator is assembled from per-arm local terms acting on the pair
(electron j, TLS j)::

    H(t) = sum_j G_j(t) [ e^{-i D_j t} b_j s+_j + h.c. ]                  (rwa)
         + sum_j G_j(t) [ e^{-i W t}   b_j s-_j + h.c. ]   W = w + w0     (full)

``b_j`` lowers the sideband offset by one; amplitude that would leave the
truncated ladder ``[-M, M]`` is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.special import erf

from .hilbert import EXCITED, GROUND, BasisDescriptor

SQUARE, GAUSSIAN = "square", "gaussian"
RWA, FULL = "rwa", "full"


@dataclass(frozen=True)
class PulseEnvelope:
    """Coupling envelope on the window ``[0, window]``.

    ``peak`` is the coupling rate (``G0`` for a square pulse, ``G_max`` for a
    Gaussian centred at ``window / 2`` with standard deviation ``width``).
    """

    kind: str
    peak: float
    window: float
    width: float | None = None

    def __post_init__(self):
        if self.kind not in (SQUARE, GAUSSIAN):
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.window > 0:
            raise ValueError("window must be positive")
        if self.peak < 0:
            raise ValueError("peak coupling must be nonnegative")
        if self.kind == GAUSSIAN and not (self.width and self.width > 0):
            raise ValueError("gaussian envelope needs a positive width")

    @classmethod
    def square(cls, area: float, window: float = 1.0) -> "PulseEnvelope":
        if not window > 0:
            raise ValueError("window must be positive")
        return cls(SQUARE, area / window, window)

    @classmethod
    def gaussian(cls, peak: float, width: float, window: float = 1.0) -> "PulseEnvelope":
        return cls(GAUSSIAN, peak, window, width)

    @property
    def area(self) -> float:
        return accumulated_area(self, self.window)


def envelope_value(env: PulseEnvelope, t):
    """Coupling rate ``G(t)``; zero outside ``[0, T]``."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= env.window)
    if env.kind == SQUARE:
        val = np.where(inside, env.peak, 0.0)
    else:
        z = (t - 0.5 * env.window) / env.width
        val = np.where(inside, env.peak * np.exp(-0.5 * z * z), 0.0)
    return float(val) if val.ndim == 0 else val


def accumulated_area(env: PulseEnvelope, t: float) -> float:
    """``g(t) = int_0^t G(t') dt'`` for ``0 <= t <= T``."""
    if t < 0 or t > env.window * (1 + 1e-14):
        raise ValueError(f"t = {t} outside the window [0, {env.window}]")
    t = min(t, env.window)
    if env.kind == SQUARE:
        return env.peak * t
    s = math.sqrt(2.0) * env.width
    half = 0.5 * env.window
    return env.peak * env.width * math.sqrt(0.5 * math.pi) * (erf((t - half) / s) + erf(half / s))


@dataclass(frozen=True)
class ArmParams:
    envelope: PulseEnvelope
    detuning: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.detuning):
            raise ValueError("detuning must be finite")


@dataclass(frozen=True)
class SystemConfig:
    """Everything needed to build the generator and the initial state.

    ``atomic_amplitudes`` are the coefficients ``c_j`` of ``|g..e_j..g>``;
    ``ground_amplitude`` multiplies ``|g..g>``.  ``omega``/``omega0`` are only
    used (and required) for ``model="full"``.
    """

    arms: tuple[ArmParams, ...]
    atomic_amplitudes: tuple[complex, ...]
    sideband_cut: int | None = None
    model: str = RWA
    omega: float | None = None
    omega0: float | None = None
    ground_amplitude: complex = 0.0
    electron_offsets: tuple[int, ...] | None = None

    def __post_init__(self):
        arms = tuple(self.arms)
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "atomic_amplitudes", tuple(complex(c) for c in self.atomic_amplitudes))
        if not arms:
            raise ValueError("need at least one arm")
        if len(self.atomic_amplitudes) != len(arms):
            raise ValueError("need one atomic amplitude per arm")
        if self.model not in (RWA, FULL):
            raise ValueError(f"model must be 'rwa' or 'full', got {self.model!r}")
        norm2 = sum(abs(c) ** 2 for c in self.atomic_amplitudes) + abs(self.ground_amplitude) ** 2
        if abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"atomic amplitudes are not normalized (sum |c|^2 = {norm2:.12g})")
        if self.sideband_cut is None:
            object.__setattr__(self, "sideband_cut", 3 if self.model == FULL else 2)
        if self.electron_offsets is None:
            object.__setattr__(self, "electron_offsets", (0,) * len(arms))
        if self.model == FULL:
            if not (self.omega and self.omega > 0 and self.omega0 and self.omega0 > 0):
                raise ValueError("model 'full' needs carrier frequencies omega > 0 and omega0 > 0")
            bare = self.omega - self.omega0
            for arm in arms:
                if abs(arm.detuning - bare) > 1e-12 * max(1.0, abs(bare)):
                    raise ValueError("model 'full' requires every arm detuning to equal omega - omega0")

    @property
    def arm_count(self) -> int:
        return len(self.arms)

    @property
    def omega_plus(self) -> float:
        if self.omega is None or self.omega0 is None:
            raise ValueError("carrier frequencies are not set")
        return self.omega + self.omega0

    @property
    def window(self) -> float:
        return max(a.envelope.window for a in self.arms)

    def with_model(self, model: str, **changes) -> "SystemConfig":
        return replace(self, model=model, **changes)

    @classmethod
    def symmetric(
        cls,
        n: int,
        g: float,
        delta: float = 0.0,
        *,
        window: float = 1.0,
        phases: Sequence[float] | None = None,
        amplitudes: Sequence[complex] | None = None,
        model: str = RWA,
        omega: float | None = None,
        omega0: float | None = None,
        sideband_cut: int | None = None,
    ) -> "SystemConfig":
        """Identical square pulses of area ``g`` and dimensionless detuning
        ``delta = D T / 2`` on every arm, fed by a (phased) W resource."""
        return cls.from_arms(
            [g] * n, [delta] * n, window=window, phases=phases, amplitudes=amplitudes,
            model=model, omega=omega, omega0=omega0, sideband_cut=sideband_cut,
        )

    @classmethod
    def from_arms(
        cls,
        areas: Sequence[float],
        deltas: Sequence[float],
        *,
        window: float = 1.0,
        phases: Sequence[float] | None = None,
        amplitudes: Sequence[complex] | None = None,
        model: str = RWA,
        omega: float | None = None,
        omega0: float | None = None,
        sideband_cut: int | None = None,
    ) -> "SystemConfig":
        n = len(areas)
        if len(deltas) != n:
            raise ValueError("areas and deltas must have equal length")
        phases = [0.0] * n if phases is None else list(phases)
        if amplitudes is None:
            amplitudes = [np.exp(1j * p) / math.sqrt(n) for p in phases]
        arms = tuple(
            ArmParams(PulseEnvelope.square(a, window), 2.0 * d / window, p)
            for a, d, p in zip(areas, deltas, phases)
        )
        return cls(arms, tuple(amplitudes), sideband_cut, model, omega, omega0)


# -- local operators on one arm, local index = digit_e * 2 + q --------------


def _local_ops(m_cut: int):
    """Local ``b s+`` (rotating) and ``b s-`` (counter-rotating) lowering parts."""
    d = 2 * m_cut + 1
    rot = np.zeros((2 * d, 2 * d))
    cr = np.zeros((2 * d, 2 * d))
    for k in range(1, d):
        # b s+ : |k, g> -> |k-1, e>;  b s- : |k, e> -> |k-1, g>
        rot[(k - 1) * 2 + EXCITED, k * 2 + GROUND] = 1.0
        cr[(k - 1) * 2 + GROUND, k * 2 + EXCITED] = 1.0
    return rot, cr


@dataclass(frozen=True)
class LocalTerm:
    """``coeff(t) * op + conj(coeff(t)) * op^dagger`` acting on one arm."""

    arm: int
    op: np.ndarray
    coeff: Callable[[float], complex] = field(compare=False)


def generator_terms(config: SystemConfig, model: str | None = None) -> list[LocalTerm]:
    model = model or config.model
    rot, cr = _local_ops(config.sideband_cut)
    terms = []
    for j, arm in enumerate(config.arms):
        env, dj = arm.envelope, arm.detuning
        terms.append(LocalTerm(j, rot, lambda t, env=env, dj=dj: envelope_value(env, t) * np.exp(-1j * dj * t)))
        if model == FULL:
            wp = config.omega_plus
            terms.append(LocalTerm(j, cr, lambda t, env=env, wp=wp: envelope_value(env, t) * np.exp(-1j * wp * t)))
    return terms


def _embed(basis: BasisDescriptor, arm: int, op: np.ndarray, support: np.ndarray) -> sparse.csr_matrix:
    """Matrix of a local arm operator restricted to ``support`` (rows and cols)."""
    n = basis.arm_count
    digits = basis.digits(support)
    local = digits[:, arm] * 2 + digits[:, n + arm]
    rows, cols, vals = [], [], []
    for to, frm in zip(*np.nonzero(op)):
        src = np.nonzero(local == frm)[0]
        if src.size == 0:
            continue
        new = digits[src].copy()
        new[:, arm] = to // 2
        new[:, n + arm] = to % 2
        tgt = basis.ravel(new)
        k = np.minimum(np.searchsorted(support, tgt), len(support) - 1)
        ok = support[k] == tgt
        rows.append(k[ok])
        cols.append(src[ok])
        vals.append(np.full(int(ok.sum()), op[to, frm], dtype=complex))
    dim = len(support)
    if rows:
        rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)


def reachable_support(config: SystemConfig, basis: BasisDescriptor, seed, model: str | None = None) -> np.ndarray:
    """Closure of ``seed`` (global indices) under the generator's coupling graph."""
    terms = generator_terms(config, model)
    n = basis.arm_count
    moves = []
    for term in terms:
        for to, frm in zip(*np.nonzero(term.op)):
            moves.append((term.arm, frm, to))
            moves.append((term.arm, to, frm))
    seen = np.unique(np.asarray(seed, dtype=np.int64))
    frontier = seen
    while frontier.size:
        digits = basis.digits(frontier)
        new = []
        for arm, frm, to in moves:
            local = digits[:, arm] * 2 + digits[:, n + arm]
            hit = digits[local == frm].copy()
            if hit.size:
                hit[:, arm] = to // 2
                hit[:, n + arm] = to % 2
                new.append(basis.ravel(hit))
        if not new:
            break
        cand = np.unique(np.concatenate(new))
        frontier = np.setdiff1d(cand, seen, assume_unique=True)
        seen = np.union1d(seen, frontier)
    return seen


class Generator:
    """Generator restricted to a support, as ``sum_k f_k(t) S_k + h.c.``.

    All terms share one CSR sparsity pattern, so combining coefficients only
    rewrites the data array.
    """

    def __init__(self, config: SystemConfig, basis: BasisDescriptor, support=None, model: str | None = None):
        self.config = config
        self.basis = basis
        self.model = model or config.model
        if support is None:
            support = np.arange(basis.total_dim, dtype=np.int64)
        self.support = np.asarray(support, dtype=np.int64)
        self.terms = generator_terms(config, self.model)
        rows, cols, vals, owner, conj = [], [], [], [], []
        for k, term in enumerate(self.terms):
            m = _embed(basis, term.arm, term.op, self.support).tocoo()
            for r, c, flag in ((m.row, m.col, False), (m.col, m.row, True)):
                rows.append(r)
                cols.append(c)
                vals.append(np.conj(m.data) if flag else m.data)
                owner.append(np.full(m.nnz, k))
                conj.append(np.full(m.nnz, flag))
        rows, cols = np.concatenate(rows), np.concatenate(cols)
        order = np.lexsort((cols, rows))
        self._indices = cols[order].astype(np.int32)
        self._indptr = np.searchsorted(rows[order], np.arange(self.dim + 1)).astype(np.int32)
        self._vals = np.concatenate(vals)[order]
        self._owner = np.concatenate(owner)[order]
        self._conj = np.concatenate(conj)[order]
        self._op_scale = max((float(np.abs(t.op).max()) for t in self.terms), default=0.0)

    @property
    def dim(self) -> int:
        return len(self.support)

    def coefficients(self, t: float) -> np.ndarray:
        return np.array([term.coeff(t) for term in self.terms], dtype=complex)

    def combine(self, coeffs) -> sparse.csr_matrix:
        coeffs = np.asarray(coeffs, dtype=complex)
        c = coeffs[self._owner]
        c = np.where(self._conj, c.conj(), c)
        return sparse.csr_matrix((c * self._vals, self._indices, self._indptr), shape=(self.dim, self.dim))

    def norm_bound(self, coeffs) -> float:
        """Upper bound on the 1-norm of ``combine(coeffs)``."""
        return 2.0 * self._op_scale * float(np.sum(np.abs(coeffs)))

    def matrix(self, t: float) -> sparse.csr_matrix:
        return self.combine(self.coefficients(t))


def build_rwa_generator(config: SystemConfig, basis: BasisDescriptor, t: float, *, as_sparse: bool = False):
    """Rotating-wave generator on the full basis at time ``t``."""
    _check_basis(config, basis)
    mat = Generator(config, basis, model=RWA).matrix(t)
    return mat if as_sparse else mat.toarray()


def build_full_generator(config: SystemConfig, basis: BasisDescriptor, t: float, *, as_sparse: bool = False):
    """Generator including the counter-rotating terms at ``Omega_+``."""
    _check_basis(config, basis)
    if config.omega is None or config.omega0 is None:
        raise ValueError("full generator needs carrier frequencies omega and omega0")
    mat = Generator(config, basis, model=FULL).matrix(t)
    return mat if as_sparse else mat.toarray()


def _check_basis(config: SystemConfig, basis: BasisDescriptor):
    if basis.arm_count != config.arm_count or basis.sideband_cut != config.sideband_cut:
        raise ValueError("basis does not match config (arm count or sideband cut)")


def arm_charge(basis: BasisDescriptor, arm: int, support=None) -> np.ndarray:
    """Diagonal of ``C_j = m_j + [TLS j excited]`` over ``support``."""
    if support is None:
        support = np.arange(basis.total_dim, dtype=np.int64)
    d = basis.digits(support)
    return (d[:, arm] - basis.sideband_cut + d[:, basis.arm_count + arm]).astype(float)
