"""Composite Hilbert space of N electron sideband ladders and N two-level systems.

Subsystem order is fixed everywhere: electrons ``1..N`` first, then TLS
``1..N``.  Electron levels are stored as offsets ``m`` from the reference
sideband, ``m in [-M, M]``; the local digit of an electron is ``m + M``.
TLS digits are ``0 = g`` and ``1 = e``.  Global indices are the row-major
(C-order) mixed-radix encoding of the digit tuple.

States may carry a ``support`` (sorted array of global indices) so that
large registers, e.g. ``N = 8`` with ``5**8 * 2**8`` basis states, are
handled through the dynamically reachable subspace only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

GROUND, EXCITED = 0, 1

DENSE_LIMIT = 1 << 14


@dataclass(frozen=True)
class BasisDescriptor:
    """Mixed-radix index map over ``N`` electron ladders and ``N`` TLS."""

    arm_count: int
    sideband_cut: int
    subsystem_dims: tuple[int, ...] = field(init=False)
    total_dim: int = field(init=False)

    def __post_init__(self):
        if int(self.arm_count) < 1:
            raise ValueError(f"arm_count must be >= 1, got {self.arm_count}")
        if int(self.sideband_cut) < 1:
            raise ValueError(
                f"sideband_cut must be >= 1 (transfer needs offsets +-1), got {self.sideband_cut}"
            )
        n, m = int(self.arm_count), int(self.sideband_cut)
        dims = (2 * m + 1,) * n + (2,) * n
        object.__setattr__(self, "arm_count", n)
        object.__setattr__(self, "sideband_cut", m)
        object.__setattr__(self, "subsystem_dims", dims)
        object.__setattr__(self, "total_dim", int(np.prod(dims, dtype=np.int64)))

    @property
    def ladder_dim(self) -> int:
        return 2 * self.sideband_cut + 1

    @property
    def electron_dims(self) -> tuple[int, ...]:
        return self.subsystem_dims[: self.arm_count]

    @property
    def tls_dim(self) -> int:
        return 1 << self.arm_count

    def electrons(self) -> list[int]:
        return list(range(self.arm_count))

    def tls(self) -> list[int]:
        return list(range(self.arm_count, 2 * self.arm_count))

    def index_of(self, offsets: Sequence[int], tls_states: Sequence[int]) -> int:
        """Global index of the configuration (electron offsets, TLS states)."""
        offsets, tls_states = list(offsets), list(tls_states)
        if len(offsets) != self.arm_count or len(tls_states) != self.arm_count:
            raise ValueError("need one offset and one TLS state per arm")
        for m in offsets:
            if abs(m) > self.sideband_cut:
                raise ValueError(f"offset {m} outside [-{self.sideband_cut}, {self.sideband_cut}]")
        for q in tls_states:
            if q not in (GROUND, EXCITED):
                raise ValueError(f"TLS state must be 0 (g) or 1 (e), got {q}")
        digits = [m + self.sideband_cut for m in offsets] + tls_states
        return int(np.ravel_multi_index(digits, self.subsystem_dims))

    def occupations_of(self, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Inverse of :meth:`index_of`."""
        if not 0 <= index < self.total_dim:
            raise ValueError(f"index {index} out of range")
        digits = np.unravel_index(int(index), self.subsystem_dims)
        n, m = self.arm_count, self.sideband_cut
        return (tuple(int(d) - m for d in digits[:n]), tuple(int(d) for d in digits[n:]))

    def digits(self, indices) -> np.ndarray:
        """Digit table, shape ``(len(indices), 2N)``, for an index array."""
        idx = np.asarray(indices, dtype=np.int64)
        return np.stack(np.unravel_index(idx, self.subsystem_dims), axis=-1).astype(np.int64)

    def ravel(self, digits) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(digits).T), self.subsystem_dims).astype(np.int64)

    def electron_index(self, offsets: Sequence[int]) -> int:
        """Index of an electron configuration in the electron-only register."""
        digits = [m + self.sideband_cut for m in offsets]
        return int(np.ravel_multi_index(digits, self.electron_dims))


def build_basis(config) -> BasisDescriptor:
    """Basis for a :class:`~heraldw.hamiltonian.SystemConfig` (or anything with
    ``arm_count`` and ``sideband_cut``)."""
    return BasisDescriptor(config.arm_count, config.sideband_cut)


@dataclass(frozen=True)
class PureState:
    """Complex amplitudes over a register with subsystem ``dims``.

    When ``support`` is given, ``amplitudes[k]`` belongs to global index
    ``support[k]`` and all other amplitudes are zero.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray
    support: np.ndarray | None = None
    basis: BasisDescriptor | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        amps = np.asarray(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.support is not None:
            sup = np.asarray(self.support, dtype=np.int64)
            if sup.shape != amps.shape:
                raise ValueError("support and amplitudes must have equal length")
            if sup.size > 1 and np.any(np.diff(sup) <= 0):
                raise ValueError("support must be strictly increasing")
            sup.setflags(write=False)
            object.__setattr__(self, "support", sup)
        elif amps.size != self.total_dim:
            raise ValueError(f"expected {self.total_dim} amplitudes, got {amps.size}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def indices(self) -> np.ndarray:
        if self.support is not None:
            return self.support
        return np.arange(self.total_dim, dtype=np.int64)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amplitudes) -> "PureState":
        return PureState(self.dims, amplitudes, self.support, self.basis)

    def dense(self) -> np.ndarray:
        if self.support is None:
            return np.array(self.amplitudes)
        if self.total_dim > DENSE_LIMIT * 64:
            raise ValueError(f"register of dimension {self.total_dim} is too large to densify")
        out = np.zeros(self.total_dim, dtype=complex)
        out[self.support] = self.amplitudes
        return out

    def amplitude(self, index: int) -> complex:
        if self.support is None:
            return complex(self.amplitudes[index])
        k = np.searchsorted(self.support, index)
        if k < self.support.size and self.support[k] == index:
            return complex(self.amplitudes[k])
        return 0j

    def digits(self) -> np.ndarray:
        return np.stack(np.unravel_index(self.indices, self.dims), axis=-1).astype(np.int64)

    def overlap(self, other: "PureState") -> complex:
        """``<self|other>``."""
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")
        common, ia, ib = np.intersect1d(self.indices, other.indices, return_indices=True)
        return complex(np.vdot(self.amplitudes[ia], other.amplitudes[ib]))

    def density_matrix(self) -> "DensityMatrix":
        psi = self.dense()
        return DensityMatrix(self.dims, np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on ``dims``."""

    dims: tuple[int, ...]
    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        mat = np.array(self.matrix, dtype=complex)
        d = int(np.prod(self.dims, dtype=np.int64))
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {self.dims}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if self.check:
            herm = np.max(np.abs(mat - mat.conj().T)) if d else 0.0
            if herm > 1e-12:
                raise ValueError(f"matrix is not Hermitian (max deviation {herm:.2e})")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"trace is {tr!r}, expected 1")
            if d <= 4096:
                lam = np.linalg.eigvalsh(mat).min()
                if lam < -1e-10:
                    raise ValueError(f"matrix has negative eigenvalue {lam:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def expectation(self, ket) -> float:
        """``<ket|rho|ket>`` for a dense vector or a :class:`PureState`."""
        v = ket.dense() if isinstance(ket, PureState) else np.asarray(ket, dtype=complex)
        return float(np.vdot(v, self.matrix @ v).real)


def _normalize_keep(keep, n_sub: int) -> list[int]:
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n_sub:
        raise ValueError(f"keep set {keep} outside subsystem range 0..{n_sub - 1}")
    return keep


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept order follows ``dims``."""
    dims = rho.dims
    n = len(dims)
    keep = _normalize_keep(keep, n)
    if len(keep) == n:
        return rho
    traced = [k for k in range(n) if k not in keep]
    t = rho.matrix.reshape(dims + dims)
    perm = keep + traced
    t = t.transpose(perm + [n + p for p in perm])
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in traced]))
    t = t.reshape(dk, dt, dk, dt)
    out = np.einsum("ajbj->ab", t)
    return DensityMatrix(tuple(dims[k] for k in keep), out, check=False)


def partial_transpose(rho: DensityMatrix, subsystem: int) -> np.ndarray:
    """Partial transpose on one subsystem; returns the (Hermitian) matrix."""
    dims = rho.dims
    n = len(dims)
    if not 0 <= int(subsystem) < n:
        raise ValueError(f"subsystem {subsystem} outside 0..{n - 1}")
    s = int(subsystem)
    t = rho.matrix.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[s], axes[n + s] = axes[n + s], axes[s]
    d = rho.dim
    return np.ascontiguousarray(t.transpose(axes).reshape(d, d))


def reduced_density_matrix(state: PureState, keep, levels: dict[int, Sequence[int]] | None = None):
    """Reduced state of a (possibly sparse) pure state on ``keep``.

    ``levels`` optionally restricts subsystems to a list of local levels
    (re-indexed in the given order).  Amplitude outside the restriction is
    discarded; the discarded weight is returned alongside the matrix, which
    is normalized by the *original* norm (so its trace is ``1 - leaked``).

    Returns ``(DensityMatrix, leaked_weight)``.
    """
    dims = list(state.dims)
    n = len(dims)
    keep = _normalize_keep(keep, n)
    digits = state.digits()
    amps = np.asarray(state.amplitudes)
    total = float(np.vdot(amps, amps).real)
    new_dims = list(dims)
    if levels:
        mask = np.ones(len(amps), dtype=bool)
        for sub, lv in levels.items():
            lv = list(lv)
            lut = np.full(dims[sub], -1, dtype=np.int64)
            lut[lv] = np.arange(len(lv))
            mapped = lut[digits[:, sub]]
            mask &= mapped >= 0
            digits[:, sub] = np.where(mapped >= 0, mapped, 0)
            new_dims[sub] = len(lv)
        leaked = float(np.vdot(amps[~mask], amps[~mask]).real) / total
        digits, amps = digits[mask], amps[mask]
    else:
        leaked = 0.0
    traced = [k for k in range(n) if k not in keep]
    kdims = [new_dims[k] for k in keep]
    dk = int(np.prod(kdims))
    if dk > DENSE_LIMIT:
        raise ValueError(f"reduced dimension {dk} too large for a dense density matrix")
    kidx = np.ravel_multi_index(tuple(digits[:, keep].T), kdims) if len(amps) else np.zeros(0, int)
    if traced:
        tdims = [new_dims[k] for k in traced]
        tidx = np.ravel_multi_index(tuple(digits[:, traced].T), tdims) if len(amps) else np.zeros(0, int)
    else:
        tidx = np.zeros(len(amps), dtype=np.int64)
    # Group amplitudes by traced configuration: rho = sum_t |v_t><v_t|.
    x = sparse.csr_matrix((amps, (kidx, tidx)), shape=(dk, int(tidx.max()) + 1 if len(amps) else 1))
    mat = (x @ x.conj().T).toarray() / total
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(tuple(kdims), mat, check=False), leaked


def product_state(
    basis: BasisDescriptor,
    electron_offsets: Sequence[int],
    atomic_amplitudes: Sequence[complex],
    ground_amplitude: complex = 0.0,
) -> PureState:
    """Electron reference configuration times a single-excitation atomic state.

    The atomic part is ``ground_amplitude |g..g> + sum_j c_j |g..e_j..g>``.
    """
    n = basis.arm_count
    offsets = list(electron_offsets)
    if len(offsets) != n:
        raise ValueError(f"need {n} electron offsets, got {len(offsets)}")
    if any(abs(int(m)) > basis.sideband_cut for m in offsets):
        raise ValueError(f"electron offsets {offsets} outside [-{basis.sideband_cut}, {basis.sideband_cut}]")
    c = np.asarray(atomic_amplitudes, dtype=complex)
    if c.shape != (n,):
        raise ValueError(f"need {n} atomic amplitudes, got shape {c.shape}")
    norm2 = float(np.sum(np.abs(c) ** 2) + abs(ground_amplitude) ** 2)
    if abs(norm2 - 1.0) > 1e-10:
        raise ValueError(f"atomic amplitudes are not normalized (sum |c|^2 = {norm2!r})")
    entries = {}
    if ground_amplitude != 0:
        entries[basis.index_of(offsets, [GROUND] * n)] = complex(ground_amplitude)
    for j in range(n):
        if c[j] != 0:
            tls = [GROUND] * n
            tls[j] = EXCITED
            entries[basis.index_of(offsets, tls)] = c[j]
    support = np.array(sorted(entries), dtype=np.int64)
    amps = np.array([entries[k] for k in support], dtype=complex)
    return PureState(basis.subsystem_dims, amps, support, basis)


def edge_population(state: PureState) -> float:
    """Population on the outermost ladder rungs ``|m| = M`` of any electron."""
    basis = state.basis
    if basis is None:
        raise ValueError("edge population needs a state on a BasisDescriptor")
    d = state.digits()[:, : basis.arm_count]
    on_edge = np.any((d == 0) | (d == basis.ladder_dim - 1), axis=1)
    a = state.amplitudes[on_edge]
    return float(np.vdot(a, a).real)
