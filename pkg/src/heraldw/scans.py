"""Parameter sweeps producing :class:`SweepTable` objects.

Each grid point is a pure function of its own config, so points may be
evaluated in worker processes; results are always assembled in grid order.
Every table's manifest records the scan name and the exact keyword
arguments needed to rebuild it, plus the integrator settings.
"""
from __future__ import annotations

import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import analytic
from .entanglement import (
    one_vs_rest_entropy,
    pairwise_negativity_report,
    success_weighted_yield,
    witness_expectation,
)
from .evolve import IntegratorSpec, final_state, initial_state, time_series
from .hamiltonian import (
    FULL,
    RWA,
    ArmParams,
    PulseEnvelope,
    SystemConfig,
    accumulated_area,
    envelope_value,
)
from .herald import conditional_fidelity, project_all_ground, target_w_state

__all__ = [
    "SweepTable",
    "ScanError",
    "sweep_pulse_area",
    "optimize_pulse_area",
    "optimum_scan",
    "sweep_detuning",
    "mismatch_scan",
    "time_resolved_trace",
    "weighted_resource_scan",
    "beyond_rwa_comparison",
    "gaussian_width_scan",
    "gaussian_detuning_scan",
    "SCANS",
]

WORKERS_ENV = "HERALDW_WORKERS"


class ScanError(RuntimeError):
    """A grid point failed; the message names the point."""


@dataclass
class SweepTable:
    """Named columns over one ordered parameter grid."""

    parameter_name: str
    parameter_values: np.ndarray
    columns: dict
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        self.parameter_values = np.asarray(self.parameter_values, dtype=float)
        n = self.parameter_values.size
        cols = {}
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != (n,):
                raise ValueError(f"column {name!r} has shape {col.shape}, expected ({n},)")
            cols[name] = col
        self.columns = cols
        self.manifest.setdefault("max_abs_err", self.discrepancies())

    def __getitem__(self, name: str) -> np.ndarray:
        if name == self.parameter_name:
            return self.parameter_values
        return self.columns[name]

    def __len__(self) -> int:
        return self.parameter_values.size

    @property
    def column_names(self) -> list[str]:
        return [self.parameter_name, *self.columns]

    def discrepancies(self) -> dict[str, float]:
        """Max of every ``abs_err*`` column, ignoring flagged (NaN) rows."""
        out = {}
        for name, col in self.columns.items():
            if name.startswith("abs_err"):
                ok = col[np.isfinite(col)]
                out[name] = float(ok.max()) if ok.size else float("nan")
        return out

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.column_names) + "\n")
        data = [self.parameter_values, *self.columns.values()]
        for row in zip(*data):
            buf.write(",".join(format(float(x), ".12g") for x in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        return text

    def manifest_json(self) -> str:
        return json.dumps(self.manifest, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _manifest(scan: str, params: dict, spec: IntegratorSpec, **extra) -> dict:
    from . import __version__

    out = {
        "scan": scan,
        "params": {k: (np.asarray(v).tolist() if isinstance(v, (np.ndarray, list, tuple)) else v)
                   for k, v in params.items()},
        "integrator": asdict(spec),
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    out.update(extra)
    return out


def _workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def _guarded(task):
    fn, label, args = task
    try:
        return fn(*args)
    except Exception as exc:  # noqa: BLE001 - re-raised with the grid point attached
        raise ScanError(f"grid point {label}: {type(exc).__name__}: {exc}") from None


def _map(fn: Callable, labels: Sequence[str], arglists: Sequence[tuple], workers: int | None) -> list:
    tasks = [(fn, lab, args) for lab, args in zip(labels, arglists)]
    w = _workers(workers)
    if w == 1 or len(tasks) < 2:
        return [_guarded(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(_guarded, tasks))


def _as_grid(values, name: str) -> np.ndarray:
    g = np.asarray(values, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D grid")
    if not np.all(np.isfinite(g)):
        raise ValueError(f"{name} contains non-finite values")
    return g


def _spec(spec):
    return spec if spec is not None else IntegratorSpec()


# -- per-point evaluators (top level so that they pickle) ---------------------

def _herald_point(config: SystemConfig, spec: IntegratorSpec, target_weights=None):
    """(P, conditional fidelity, witness, branch amplitudes) at the window end."""
    n = config.arm_count
    h = project_all_ground(final_state(config, spec))
    if not h.accessible:
        return h.probability, math.nan, math.nan, h.branch_amplitudes
    target = target_w_state(n, target_weights)
    fid = conditional_fidelity(h, target)
    wit = witness_expectation(h.conditional_state, weights=target_weights)
    return h.probability, fid, wit, h.branch_amplitudes


def _probability_point(config: SystemConfig, spec: IntegratorSpec) -> float:
    return project_all_ground(final_state(config, spec)).probability


def _carrier_kwargs(model: str, omega_t: float, sideband_cut):
    if model == FULL:
        return dict(window=float(omega_t), model=FULL, omega=1.0, omega0=1.0, sideband_cut=sideband_cut)
    if model != RWA:
        raise ValueError(f"model must be 'rwa' or 'full', got {model!r}")
    return dict(sideband_cut=sideband_cut)


# -- scans --------------------------------------------------------------------

def sweep_pulse_area(n: int = 3, g_grid=None, model: str = RWA, *, points: int = 50, omega_t: float = 100.0,
                     sideband_cut: int | None = None, spec: IntegratorSpec | None = None,
                     workers: int | None = None) -> SweepTable:
    """Heralding probability versus pulse area, numeric against closed form.

    The default grid is ``points`` equally spaced areas ending at ``pi/2``.
    For ``model="full"`` the carriers are resonant with ``omega = 1`` and the
    window is ``omega_t``.
    """
    spec = _spec(spec)
    if g_grid is None:
        g_grid = np.linspace(0.5 * np.pi / points, 0.5 * np.pi, points)
    g_grid = _as_grid(g_grid, "g_grid")
    if np.any(np.diff(g_grid) <= 0) or g_grid[0] <= 0 or g_grid[-1] > 0.5 * np.pi + 1e-12:
        raise ValueError("g_grid must be ascending within (0, pi/2]")
    kw = _carrier_kwargs(model, omega_t, sideband_cut)
    cfgs = [SystemConfig.symmetric(n, float(g), **kw) for g in g_grid]
    p = np.array(_map(_probability_point, [f"g={g:.6g}" for g in g_grid], [(c, spec) for c in cfgs], workers))
    pa = analytic.p_heralding(n, g_grid, 0.0)
    params = dict(n=n, g_grid=g_grid, model=model, omega_t=omega_t, sideband_cut=sideband_cut)
    return SweepTable("g", g_grid, {"p_numeric": p, "p_analytic": pa, "abs_err": np.abs(p - pa)},
                      _manifest("sweep-area", params, spec))


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimize_pulse_area(n: int = 3, model: str = RWA, *, coarse_step: float = 0.01, tol: float = 1e-6,
                        omega_t: float = 100.0, sideband_cut: int | None = None,
                        spec: IntegratorSpec | None = None, workers: int | None = None) -> tuple[float, float]:
    """Numerical maximizer of the heralding probability over the pulse area.

    A coarse grid over ``(0, pi/2]`` with spacing at most ``coarse_step``
    brackets the peak; golden-section search then narrows it to ``tol``.
    """
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    spec = _spec(spec)
    kw = _carrier_kwargs(model, omega_t, sideband_cut)
    m = int(math.ceil(0.5 * np.pi / coarse_step))
    grid = np.linspace(0.5 * np.pi / m, 0.5 * np.pi, m)

    def prob(g):
        return _probability_point(SystemConfig.symmetric(n, float(g), **kw), spec)

    if model == RWA:
        # resonant square pulse: the state at time t of a pulse of area G T is
        # the final state of a pulse of area G t, so one trajectory covers the grid
        cfg = SystemConfig.symmetric(n, 0.5 * np.pi, **kw)
        states = time_series(initial_state(cfg), cfg, grid / (0.5 * np.pi) * cfg.window, spec)
        coarse = np.array([project_all_ground(st).probability for st in states])
    else:
        coarse = np.array(_map(_probability_point, [f"g={g:.6g}" for g in grid],
                               [(SystemConfig.symmetric(n, float(g), **kw), spec) for g in grid], workers))
    k = int(np.argmax(coarse))
    if k == m - 1:  # peak on the upper edge (N = 1): resonant full transfer
        a, b = grid[k - 1], grid[k]
        g_opt = _golden_max(prob, a, b, tol) if prob(b) < prob(0.5 * (a + b)) else float(b)
    else:
        a = grid[k - 1] if k > 0 else 0.0
        g_opt = _golden_max(prob, a, grid[k + 1], tol)
    return float(g_opt), float(prob(g_opt))


def optimum_scan(n_values=(3,), model: str = RWA, *, coarse_step: float = 0.01, tol: float = 1e-6,
                 omega_t: float = 100.0, sideband_cut: int | None = None, spec: IntegratorSpec | None = None,
                 workers: int | None = None) -> SweepTable:
    """Numerical optimum against the closed form for each arm count."""
    spec = _spec(spec)
    ns = [int(k) for k in np.atleast_1d(n_values)]
    rows = [optimize_pulse_area(k, model, coarse_step=coarse_step, tol=tol, omega_t=omega_t,
                                sideband_cut=sideband_cut, spec=spec, workers=workers) for k in ns]
    g_num = np.array([r[0] for r in rows])
    p_num = np.array([r[1] for r in rows])
    g_an = np.array([analytic.g_optimal(k) for k in ns])
    p_an = np.array([analytic.p_max(k) for k in ns])
    cols = {
        "g_opt_numeric": g_num,
        "g_opt_analytic": g_an,
        "abs_err_g": np.abs(g_num - g_an),
        "p_max_numeric": p_num,
        "p_max_analytic": p_an,
        "abs_err_p": np.abs(p_num - p_an),
    }
    params = dict(n_values=ns, model=model, coarse_step=coarse_step, tol=tol, omega_t=omega_t,
                  sideband_cut=sideband_cut)
    return SweepTable("n", np.array(ns, float), cols, _manifest("optimize", params, spec))


def sweep_detuning(n: int = 3, g_fixed: float | None = None, delta_grid=None, model: str = RWA, *,
                   points: int = 41, delta_max: float = 3.0, spec: IntegratorSpec | None = None,
                   workers: int | None = None) -> SweepTable:
    """Common detuning ``delta = Delta T / 2`` at fixed area (default ``g_opt``)."""
    if model != RWA:
        raise ValueError("detuning sweeps use the rotating-wave model")
    spec = _spec(spec)
    g = analytic.g_optimal(n) if g_fixed is None else float(g_fixed)
    if not g > 0:
        raise ValueError("g_fixed must be positive")
    if delta_grid is None:
        delta_grid = np.linspace(-delta_max, delta_max, points)
    delta_grid = _as_grid(delta_grid, "delta_grid")
    cfgs = [SystemConfig.symmetric(n, g, float(d)) for d in delta_grid]
    res = _map(_herald_point, [f"delta={d:.6g}" for d in delta_grid], [(c, spec) for c in cfgs], workers)
    p = np.array([r[0] for r in res])
    pa = analytic.p_heralding(n, g, delta_grid)
    cols = {
        "p_numeric": p,
        "p_analytic": pa,
        "abs_err": np.abs(p - pa),
        "fidelity": np.array([r[1] for r in res]),
        "witness": np.array([r[2] for r in res]),
    }
    params = dict(n=n, g_fixed=g, delta_grid=delta_grid, model=model)
    return SweepTable("delta", delta_grid, cols, _manifest("sweep-detuning", params, spec))


def mismatch_profile(n: int) -> np.ndarray:
    """Per-arm mismatch pattern, ``(+1, 0, -1)`` for three arms."""
    if n == 1:
        return np.zeros(1)
    return 1.0 - 2.0 * np.arange(n) / (n - 1)


def mismatch_arms(kind: str, value: float, n: int, g: float, delta: float):
    """Per-arm (areas, deltas) for a coupling (``eta``) or detuning mismatch.

    For the detuning kind ``value`` is the normalized mismatch
    ``delta_Delta T / 2`` added to the common ``delta``.
    """
    prof = mismatch_profile(n)
    if kind == "coupling":
        return g * (1.0 + value * prof), np.full(n, delta)
    if kind == "detuning":
        return np.full(n, g), delta + value * prof
    raise ValueError(f"kind must be 'coupling' or 'detuning', got {kind!r}")


def mismatch_scan(kind: str = "coupling", range_grid=None, g: float | None = None, delta: float = 0.0, *,
                  n: int = 3, points: int = 41, span: float = 0.3, spec: IntegratorSpec | None = None,
                  workers: int | None = None) -> SweepTable:
    """Symmetry-breaking scan with the pathway-weight closed form alongside."""
    spec = _spec(spec)
    g = analytic.g_optimal(n) if g is None else float(g)
    if range_grid is None:
        range_grid = np.linspace(-span, span, points)
    grid = _as_grid(range_grid, "range_grid")
    arms = [mismatch_arms(kind, float(v), n, g, delta) for v in grid]
    cfgs = [SystemConfig.from_arms(list(a), list(d)) for a, d in arms]
    res = _map(_herald_point, [f"{kind}={v:.6g}" for v in grid], [(c, spec) for c in cfgs], workers)
    cols = {"p_numeric": np.array([r[0] for r in res])}
    alphas = [analytic.alpha_weights(a, d)[0] for a, d in arms]
    cols["p_analytic"] = np.array([np.sum(np.abs(al) ** 2) / n for al in alphas])
    cols["abs_err_p"] = np.abs(cols["p_numeric"] - cols["p_analytic"])
    cols["fidelity_numeric"] = np.array([r[1] for r in res])
    cols["fidelity_analytic"] = np.array([analytic.fidelity_perturbed(al) for al in alphas])
    cols["abs_err_fidelity"] = np.abs(cols["fidelity_numeric"] - cols["fidelity_analytic"])
    for j in range(n):
        cols[f"weight_{j + 1}"] = np.array([abs(r[3][j]) ** 2 / np.sum(np.abs(r[3]) ** 2) for r in res])
    for j in range(n):
        cols[f"weight_{j + 1}_analytic"] = np.array([analytic.alpha_weights(a, d)[1][j] for a, d in arms])
    cols["witness"] = np.array([r[2] for r in res])
    params = dict(kind=kind, range_grid=grid, g=g, delta=delta, n=n)
    name = "eta" if kind == "coupling" else "delta_mismatch"
    return SweepTable(name, grid, cols, _manifest("mismatch", params, spec))


def time_resolved_trace(n: int = 3, g: float = 0.5 * np.pi, samples: int = 201, *,
                        spec: IntegratorSpec | None = None) -> SweepTable:
    """Pairwise entanglement redistribution during one resonant square pulse.

    Times are in units of the window; the conditional columns are NaN where
    the heralded branch is not accessible.  Unconditional electron pairs use
    the full ladders, the conditional ones the ``{0, +}`` encoding.
    """
    spec = _spec(spec)
    if samples < 2:
        raise ValueError("need at least two samples")
    cfg = SystemConfig.symmetric(n, g)
    times = np.linspace(0.0, cfg.window, samples)
    states = time_series(initial_state(cfg), cfg, times, spec)
    basis_tls = list(range(n, 2 * n))
    const = analytic.pairwise_negativity_wn(n)
    atomic, unc, cond, prob, yld = [], [], [], [], []
    for st in states:
        atomic.append(pairwise_negativity_report(st, parties=basis_tls).average)
        unc.append(pairwise_negativity_report(st).average)
        h = project_all_ground(st)
        prob.append(h.probability)
        if h.accessible:
            c = pairwise_negativity_report(h.conditional_state).average
            cond.append(c)
            yld.append(success_weighted_yield(h.probability, c))
        else:
            cond.append(math.nan)
            yld.append(math.nan)
    g_t = g * times / cfg.window
    cond = np.array(cond)
    y_an = analytic.pair_yield(n, g_t)
    cols = {
        "area": g_t,
        "p_numeric": np.array(prob),
        "atomic_pair_negativity": np.array(atomic),
        "electron_pair_negativity": np.array(unc),
        "conditional_pair_negativity": cond,
        "conditional_pair_negativity_analytic": np.full(samples, const),
        "abs_err_conditional": np.abs(cond - const),
        "yield_numeric": np.array(yld),
        "yield_analytic": y_an,
        "abs_err_yield": np.abs(np.array(yld) - y_an),
    }
    params = dict(n=n, g=g, samples=samples)
    return SweepTable("t", times, cols, _manifest("time-trace", params, spec))


def weighted_amplitudes(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)], dtype=complex)


def _weighted_point(theta: float, phi: float, g: float, spec: IntegratorSpec):
    amps = weighted_amplitudes(theta, phi)
    cfg = SystemConfig.symmetric(3, g, amplitudes=amps)
    s0 = initial_state(cfg)
    tls = [3, 4, 5]
    neg_a = pairwise_negativity_report(s0, parties=tls).average
    ent_a = one_vs_rest_entropy(s0, 3)
    h = project_all_ground(final_state(cfg, spec))
    rho = h.conditional_state
    neg_e = pairwise_negativity_report(rho).average
    ent_e = one_vs_rest_entropy(rho, 0)
    fid = conditional_fidelity(h, target_w_state(3, amps))
    return neg_a, neg_e, ent_a, ent_e, h.probability, fid


def weighted_resource_scan(theta_grid=None, phi_grid=None, g: float | None = None, *, points: int = 11,
                           spec: IntegratorSpec | None = None, workers: int | None = None) -> SweepTable:
    """Weighted three-party resource ``(cos t, sin t cos p, sin t sin p)``.

    Rows run over the flattened ``theta x phi`` grid (theta slowest); the
    parameter column is the row index and ``theta``/``phi`` are columns.
    """
    spec = _spec(spec)
    g = analytic.g_optimal(3) if g is None else float(g)
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 0.5 * np.pi, points)
    if phi_grid is None:
        phi_grid = np.linspace(0.0, 0.5 * np.pi, points)
    th = _as_grid(theta_grid, "theta_grid")
    ph = _as_grid(phi_grid, "phi_grid")
    for grid, name in ((th, "theta"), (ph, "phi")):
        if np.any(grid < -1e-12) or np.any(grid > 0.5 * np.pi + 1e-12):
            raise ValueError(f"{name} grid must lie within [0, pi/2]")
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    res = np.array(_map(_weighted_point, [f"theta={a:.6g},phi={b:.6g}" for a, b in zip(tt, pp)],
                        [(a, b, g, spec) for a, b in zip(tt, pp)], workers))
    p_an = analytic.p_heralding(3, g)
    cols = {
        "theta": tt,
        "phi": pp,
        "atomic_pair_negativity": res[:, 0],
        "electron_pair_negativity": res[:, 1],
        "abs_err_negativity": np.abs(res[:, 0] - res[:, 1]),
        "atomic_entropy": res[:, 2],
        "electron_entropy": res[:, 3],
        "abs_err_entropy": np.abs(res[:, 2] - res[:, 3]),
        "p_numeric": res[:, 4],
        "p_analytic": np.full(tt.size, p_an),
        "abs_err_p": np.abs(res[:, 4] - p_an),
        "fidelity": res[:, 5],
    }
    params = dict(theta_grid=th, phi_grid=ph, g=g)
    return SweepTable("index", np.arange(tt.size), cols, _manifest("weighted-scan", params, spec))


def fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares slope of ``log10 y`` against ``log10 x`` and the residual standard error."""
    lx, ly = np.log10(np.asarray(x, float)), np.log10(np.asarray(y, float))
    coef, ssr, *_ = np.polyfit(lx, ly, 1, full=True)
    dof = max(1, lx.size - 2)
    rse = math.sqrt(float(ssr[0]) / dof) if len(ssr) else 0.0
    return float(coef[0]), rse


def largest_decade(x) -> np.ndarray:
    """Mask of the widest window ``[a, 10 a]`` of the grid (all points if it spans less)."""
    x = np.asarray(x, float)
    best, mask = -1, np.ones(x.size, bool)
    if x.max() < 10.0 * x.min() * (1 - 1e-12):
        return mask
    for a in x:
        m = (x >= a) & (x <= 10.0 * a * (1 + 1e-12))
        if x[m].max() >= 10.0 * a * (1 - 1e-12) and m.sum() > best:
            best, mask = int(m.sum()), m
    return mask


def beyond_rwa_comparison(T_grid=None, g: float = 0.6, kappa: float = analytic.DEFAULT_KAPPA, *, n: int = 3,
                          points: int = 81, t_min: float = 20.0, t_max: float = 200.0, sideband_cut: int = 3,
                          check_cut: bool = True, spec: IntegratorSpec | None = None,
                          workers: int | None = None) -> SweepTable:
    """Full versus rotating-wave heralding probability over window lengths.

    Times are in units of ``1/omega`` with ``omega = omega0 = 1`` (so
    ``Delta = 0`` and ``Omega_+ = 2``); the coupling is ``g / T`` at every
    point.  The default grid is log-spaced.  With ``check_cut`` the shortest
    window (largest counter-rotating effect) is rerun with twice the
    sideband cut and the change in ``P_full`` is stored in the manifest.
    """
    spec = _spec(spec)
    if T_grid is None:
        T_grid = np.geomspace(t_min, t_max, points)
    grid = _as_grid(T_grid, "T_grid")
    if np.any(grid <= 0):
        raise ValueError("window lengths must be positive")
    full = [SystemConfig.symmetric(n, g, window=float(T), model=FULL, omega=1.0, omega0=1.0,
                                   sideband_cut=sideband_cut) for T in grid]
    rwa = [SystemConfig.symmetric(n, g, window=float(T)) for T in grid]
    labels = [f"T={T:.6g}" for T in grid]
    p_full = np.array(_map(_probability_point, labels, [(c, spec) for c in full], workers))
    p_rwa = np.array(_map(_probability_point, labels, [(c, spec) for c in rwa], workers))
    p_an = np.full(grid.size, analytic.p_heralding(n, g, 0.0))
    d_eff = analytic.bloch_siegert_delta_eff(g, 0.0, grid, 2.0, kappa)
    p_bs = analytic.p_heralding(n, g, d_eff)
    res_rwa = np.abs(p_full - p_an)
    res_bs = np.abs(p_full - p_bs)
    mask = largest_decade(grid)
    s_rwa, e_rwa = fit_loglog(grid[mask], res_rwa[mask])
    s_bs, e_bs = fit_loglog(grid[mask], res_bs[mask])
    extra = {"fits": {"slope_rwa": s_rwa, "rse_rwa": e_rwa, "slope_bs": s_bs, "rse_bs": e_bs,
                      "fit_range": [float(grid[mask].min()), float(grid[mask].max())]}}
    if check_cut:
        k = int(np.argmin(grid))
        doubled = SystemConfig.symmetric(n, g, window=float(grid[k]), model=FULL, omega=1.0, omega0=1.0,
                                         sideband_cut=2 * sideband_cut)
        extra["cut_check"] = {"T": float(grid[k]), "sideband_cut": 2 * sideband_cut,
                              "abs_change": float(abs(_probability_point(doubled, spec) - p_full[k]))}
    cols = {
        "p_full": p_full,
        "p_rwa_numeric": p_rwa,
        "p_rwa_analytic": p_an,
        "p_bs": p_bs,
        "abs_err_rwa": np.abs(p_rwa - p_an),
        "residual_rwa": res_rwa,
        "residual_bs": res_bs,
    }
    params = dict(T_grid=grid, g=g, kappa=kappa, n=n, sideband_cut=sideband_cut, check_cut=check_cut)
    return SweepTable("T", grid, cols, _manifest("beyond-rwa", params, spec, **extra))


def gaussian_config(n: int, peak: float, width: float, delta: float = 0.0, window: float = 1.0) -> SystemConfig:
    env = PulseEnvelope.gaussian(peak, width, window)
    arms = tuple(ArmParams(env, 2.0 * delta / window) for _ in range(n))
    return SystemConfig(arms, tuple(np.full(n, 1.0 / np.sqrt(n))))


def square_config(n: int, peak: float, delta: float = 0.0, window: float = 1.0) -> SystemConfig:
    return SystemConfig.symmetric(n, peak * window, delta, window=window)


def _unc_negativity_point(config: SystemConfig, spec: IntegratorSpec) -> float:
    return pairwise_negativity_report(final_state(config, spec)).average


def default_gaussian_peak(n: int = 3, window: float = 1.0) -> float:
    """Peak coupling used for the Gaussian scans: the optimal square-pulse area over the window."""
    return analytic.g_optimal(n) / window


def gaussian_width_scan(tau_grid=None, peak: float | None = None, *, n: int = 3, points: int = 41,
                        tau_min: float = 0.05, tau_max: float = 3.0, spec: IntegratorSpec | None = None,
                        workers: int | None = None) -> SweepTable:
    """Final unconditional electron pair negativity versus ``tau / T`` at fixed peak.

    The window is ``T = 1``.  ``area`` is the accumulated area from the
    closed form and ``area_quadrature`` the same integral by adaptive
    quadrature of the envelope.
    """
    spec = _spec(spec)
    peak = default_gaussian_peak(n) if peak is None else float(peak)
    if tau_grid is None:
        tau_grid = np.linspace(tau_min, tau_max, points)
    grid = _as_grid(tau_grid, "tau_grid")
    if np.any(grid <= 0):
        raise ValueError("widths must be positive")
    cfgs = [gaussian_config(n, peak, float(w)) for w in grid]
    neg = np.array(_map(_unc_negativity_point, [f"tau={w:.6g}" for w in grid], [(c, spec) for c in cfgs], workers))
    env = [c.arms[0].envelope for c in cfgs]
    area = np.array([accumulated_area(e, e.window) for e in env])
    quad = np.array([integrate.quad(lambda t, e=e: envelope_value(e, t), 0.0, e.window,
                                    epsabs=1e-14, epsrel=1e-13)[0] for e in env])
    sq = _unc_negativity_point(square_config(n, peak), spec)
    cols = {
        "electron_pair_negativity": neg,
        "square_pulse_negativity": np.full(grid.size, sq),
        "area": area,
        "area_quadrature": quad,
        "abs_err_area": np.abs(area - quad),
    }
    params = dict(tau_grid=grid, peak=peak, n=n)
    return SweepTable("tau_over_T", grid, cols, _manifest("gaussian-width", params, spec))


def gaussian_detuning_scan(delta_grid=None, peak: float | None = None, tau: float = 1.2, *, n: int = 3,
                           points: int = 41, delta_max: float = 6.0, spec: IntegratorSpec | None = None,
                           workers: int | None = None) -> SweepTable:
    """Final unconditional electron pair negativity versus ``delta = Delta T / 2``
    for a Gaussian of width ``tau`` (in units of ``T``) and a square pulse
    with the same peak coupling."""
    spec = _spec(spec)
    peak = default_gaussian_peak(n) if peak is None else float(peak)
    if delta_grid is None:
        delta_grid = np.linspace(-delta_max, delta_max, points)
    grid = _as_grid(delta_grid, "delta_grid")
    labels = [f"delta={d:.6g}" for d in grid]
    gau = _map(_unc_negativity_point, labels, [(gaussian_config(n, peak, tau, float(d)), spec) for d in grid], workers)
    sq = _map(_unc_negativity_point, labels, [(square_config(n, peak, float(d)), spec) for d in grid], workers)
    cols = {"gaussian_negativity": np.array(gau), "square_pulse_negativity": np.array(sq)}
    params = dict(delta_grid=grid, peak=peak, tau=tau, n=n)
    return SweepTable("delta", grid, cols, _manifest("gaussian-detuning", params, spec))


SCANS = {
    "optimize": optimum_scan,
    "sweep-area": sweep_pulse_area,
    "sweep-detuning": sweep_detuning,
    "mismatch": mismatch_scan,
    "time-trace": time_resolved_trace,
    "weighted-scan": weighted_resource_scan,
    "beyond-rwa": beyond_rwa_comparison,
    "gaussian-width": gaussian_width_scan,
    "gaussian-detuning": gaussian_detuning_scan,
}
