"""Command-line front end: ``heraldw <subcommand> [flags]``.

Every subcommand writes ``<name>.csv`` and ``<name>.json`` (the run
manifest) into ``--out``.  Passing a manifest back through ``--config``
re-runs the recorded scan with identical parameters.

Exit codes: 0 success, 1 validation or tolerance failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, fields

import numpy as np

from . import __version__, analytic, scans
from .evolve import IntegratorSpec
from .hamiltonian import FULL, RWA, SystemConfig

SUBCOMMANDS = ("sweep-area", "optimize", "sweep-detuning", "mismatch", "time-trace",
               "weighted-scan", "beyond-rwa", "gaussian", "verify")

CONFIG_KEYS = {"n", "model", "g", "delta", "phases", "amplitudes", "omega", "omega0", "window", "sideband_cut"}


class ConfigError(ValueError):
    """Invalid configuration document."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _complex_list(values, key):
    out = []
    for v in values:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)):
            out.append(complex(v))
        else:
            raise ConfigError(f"{key}: entries must be numbers or [re, im] pairs")
    return out


def config_from_dict(doc: dict) -> tuple[SystemConfig, dict]:
    """Validated config plus the document with every default filled in."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in ("n", "g") if k not in doc]
    if missing:
        raise ConfigError(f"missing required config keys: {missing}")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise ConfigError("n must be a positive integer")
    model = doc.get("model", RWA)
    if model not in (RWA, FULL):
        raise ConfigError(f"model must be 'rwa' or 'full', got {model!r}")
    filled = {
        "n": n,
        "model": model,
        "g": float(doc["g"]),
        "delta": float(doc.get("delta", 0.0)),
        "window": float(doc.get("window", 1.0)),
        "phases": [float(p) for p in doc.get("phases", [0.0] * n)],
        "omega": doc.get("omega"),
        "omega0": doc.get("omega0"),
        "sideband_cut": doc.get("sideband_cut"),
    }
    if len(filled["phases"]) != n:
        raise ConfigError(f"phases: need {n} entries")
    amps = None
    if "amplitudes" in doc:
        amps = _complex_list(doc["amplitudes"], "amplitudes")
        if len(amps) != n:
            raise ConfigError(f"amplitudes: need {n} entries")
        norm2 = sum(abs(c) ** 2 for c in amps)
        if abs(norm2 - 1.0) > 1e-10:
            raise ConfigError(f"atomic amplitudes are not normalized: sum |c_j|^2 = {norm2:.12g}")
        filled["amplitudes"] = [[c.real, c.imag] for c in amps]
    if model == FULL:
        if filled["omega"] is None or filled["omega0"] is None:
            raise ConfigError("model 'full' requires both carrier frequencies 'omega' and 'omega0'")
        if not (filled["omega"] > 0 and filled["omega0"] > 0):
            raise ConfigError("carrier frequencies must be positive")
        bare = 0.5 * (filled["omega"] - filled["omega0"]) * filled["window"]
        if "delta" in doc and abs(filled["delta"] - bare) > 1e-12 * max(1.0, abs(bare)):
            raise ConfigError("model 'full': delta must equal (omega - omega0) * window / 2")
        filled["delta"] = bare
    elif filled["omega"] is not None or filled["omega0"] is not None:
        raise ConfigError("carrier frequencies are only meaningful for model 'full'")
    try:
        cfg = SystemConfig.symmetric(
            n, filled["g"], filled["delta"], window=filled["window"], phases=filled["phases"],
            amplitudes=amps, model=model, omega=filled["omega"], omega0=filled["omega0"],
            sideband_cut=filled["sideband_cut"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    filled["sideband_cut"] = cfg.sideband_cut
    return cfg, filled


def load_config(path) -> SystemConfig:
    """Read a flat JSON config; see :func:`config_from_dict`."""
    return config_from_dict(_read_json(path))[0]


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None


def _spec_from(doc) -> IntegratorSpec:
    names = {f.name for f in fields(IntegratorSpec)}
    return IntegratorSpec(**{k: v for k, v in doc.items() if k in names})


def _scan_kwargs(cmd: str, args, cfg: dict | None) -> tuple[str, dict]:
    """Map flags (overriding config values) onto a scan name and its keyword arguments."""
    cfg = cfg or {}

    def pick(flag, key, default=None):
        v = getattr(args, flag, None)
        return v if v is not None else cfg.get(key, default)

    n = pick("n", "n", 3)
    model = pick("model", "model", RWA)
    g = pick("g", "g")
    delta = pick("delta", "delta", 0.0)
    pts = args.points
    kw: dict = {}
    if cmd == "sweep-area":
        kw = dict(n=n, model=model)
        if pts:
            kw["points"] = pts
        if model == FULL:
            kw["omega_t"] = cfg.get("window", 100.0) * (cfg.get("omega") or 1.0)
        return "sweep-area", kw
    if cmd == "optimize":
        return "optimize", dict(n_values=[n], model=model)
    if cmd == "sweep-detuning":
        kw = dict(n=n, g_fixed=g, model=model)
        if pts:
            kw["points"] = pts
        return "sweep-detuning", kw
    if cmd == "mismatch":
        kw = dict(kind=args.kind, g=g, delta=delta, n=n)
        if pts:
            kw["points"] = pts
        return "mismatch", kw
    if cmd == "time-trace":
        kw = dict(n=n, g=0.5 * math.pi if g is None else g)
        if pts:
            kw["samples"] = pts
        return "time-trace", kw
    if cmd == "weighted-scan":
        kw = dict(g=g)
        if pts:
            kw["points"] = pts
        return "weighted-scan", kw
    if cmd == "beyond-rwa":
        kw = dict(g=0.6 if g is None else g, n=n, kappa=args.kappa)
        if pts:
            kw["points"] = pts
        return "beyond-rwa", kw
    raise AssertionError(cmd)


def _plot_svg(table: scans.SweepTable, path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    x = table.parameter_values
    for name, col in table.columns.items():
        if name.startswith("abs_err") or not np.any(np.isfinite(col)):
            continue
        ax.plot(x, col, label=name, lw=1.2)
    ax.set_xlabel(table.parameter_name)
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _emit(table: scans.SweepTable, out_dir: str, stem: str, cmd: str, svg: bool, config_echo=None) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    json_path = os.path.join(out_dir, f"{stem}.json")
    table.to_csv(csv_path)
    outputs = [csv_path, json_path]
    if svg:
        svg_path = os.path.join(out_dir, f"{stem}.svg")
        _plot_svg(table, svg_path)
        outputs.append(svg_path)
    table.manifest["subcommand"] = cmd
    table.manifest["outputs"] = outputs
    if config_echo is not None:
        table.manifest["config"] = config_echo
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(table.manifest_json() + "\n")
    return outputs


def _run_scan(name: str, kwargs: dict, spec: IntegratorSpec) -> scans.SweepTable:
    return scans.SCANS[name](**kwargs, spec=spec)


# -- verification -------------------------------------------------------------

def verify_checks(spec: IntegratorSpec | None = None):
    """Analytic-versus-numeric oracle suite; yields ``(name, value, tolerance)``."""
    spec = spec or IntegratorSpec()
    opt = scans.optimum_scan(range(2, 9), spec=spec)
    yield "optimum g_opt N=2..8", float(opt["abs_err_g"].max()), 1e-4
    yield "optimum P_max N=2..8", float(opt["abs_err_p"].max()), 1e-6
    yield "large-N asymptote |P_max N e - 1|", abs(analytic.p_max(1000) * 1000 * math.e - 1.0), 1e-2
    yield "area sweep N=3", scans.sweep_pulse_area(3, spec=spec).discrepancies()["abs_err"], 1e-6
    det = scans.sweep_detuning(3, spec=spec)
    yield "detuning sweep N=3", det.discrepancies()["abs_err"], 1e-6
    yield "detuning conditional fidelity", float(np.max(np.abs(det["fidelity"] - 1.0))), 1e-9
    yield "detuning witness", float(np.max(np.abs(det["witness"] + 1.0 / 3.0))), 1e-6
    for kind in ("coupling", "detuning"):
        mm = scans.mismatch_scan(kind, spec=spec)
        yield f"{kind} mismatch fidelity closed form", mm.discrepancies()["abs_err_fidelity"], 1e-7
    tr = scans.time_resolved_trace(spec=spec)
    yield "time trace conditional negativity", tr.discrepancies()["abs_err_conditional"], 1e-6
    ws = scans.weighted_resource_scan(spec=spec)
    d = ws.discrepancies()
    yield "weighted negativity identity", d["abs_err_negativity"], 1e-8
    yield "weighted entropy identity", d["abs_err_entropy"], 1e-8
    yield "weighted heralding probability", d["abs_err_p"], 1e-6
    yield "weighted conditional fidelity", float(np.max(np.abs(ws["fidelity"] - 1.0))), 1e-8
    br = scans.beyond_rwa_comparison(spec=spec)
    yield "beyond-RWA numeric vs analytic RWA", br.discrepancies()["abs_err_rwa"], 1e-6
    yield "beyond-RWA slope (residual RWA) + 2", abs(br.manifest["fits"]["slope_rwa"] + 2.0), 0.3
    yield "beyond-RWA slope (residual BS) + 2", abs(br.manifest["fits"]["slope_bs"] + 2.0), 0.3
    gw = scans.gaussian_width_scan(spec=spec)
    yield "gaussian area quadrature", gw.discrepancies()["abs_err_area"], 1e-10
    neg = gw["electron_pair_negativity"]
    yield "gaussian width monotonicity (max decrease)", float(max(0.0, -np.diff(neg).min())), 1e-9


def _verify(spec, out_dir) -> int:
    rows, failed = [], 0
    for name, value, tol in verify_checks(spec):
        ok = bool(np.isfinite(value) and value <= tol)
        failed += not ok
        rows.append({"check": name, "value": value, "tolerance": tol, "pass": ok})
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (tol {tol:g})")
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "verify.csv"), "w", encoding="ascii", newline="") as fh:
        fh.write("check,value,tolerance,pass\n")
        for r in rows:
            fh.write(f"{r['check']},{format(r['value'], '.12g')},{r['tolerance']:g},{int(r['pass'])}\n")
    manifest = {"subcommand": "verify", "integrator": asdict(spec), "version": __version__,
                "checks": rows, "outputs": [os.path.join(out_dir, "verify.csv"), os.path.join(out_dir, "verify.json")]}
    with open(os.path.join(out_dir, "verify.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heraldw", description="Heralded electron entanglement transfer: sweeps and checks.")
    p.add_argument("--version", action="version", version=f"heraldw {__version__}")
    sub = p.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    sub.required = True
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--n", type=int)
        sp.add_argument("--model", choices=(RWA, FULL))
        sp.add_argument("--g", type=float)
        sp.add_argument("--delta", type=float)
        sp.add_argument("--points", type=int)
        sp.add_argument("--config")
        sp.add_argument("--out", default=".")
        sp.add_argument("--svg", action="store_true")
        if name == "mismatch":
            sp.add_argument("--kind", choices=("coupling", "detuning"), default="coupling")
        if name == "beyond-rwa":
            sp.add_argument("--kappa", type=float, default=analytic.DEFAULT_KAPPA)
        if name == "gaussian":
            sp.add_argument("--tau", type=float, default=1.2)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cmd = args.command
    if args.points is not None and args.points < 2:
        print("heraldw: error: --points must be at least 2", file=sys.stderr)
        return 2
    try:
        doc = _read_json(args.config) if args.config else None
        spec = IntegratorSpec()
        if cmd == "verify":
            return _verify(spec, args.out)
        if isinstance(doc, dict) and "scan" in doc and "params" in doc:
            # a manifest: replay it exactly
            spec = _spec_from(doc.get("integrator", {}))
            name = doc["scan"]
            if name not in scans.SCANS:
                raise ConfigError(f"manifest names unknown scan {name!r}")
            table = _run_scan(name, doc["params"], spec)
            _report(table, cmd)
            _emit(table, args.out, name, cmd, args.svg)
            return 0
        echo = None
        if doc is not None:
            _, echo = config_from_dict(doc)
        if cmd == "gaussian":
            n = args.n or (echo or {}).get("n", 3)
            peak = args.g if args.g is not None else (echo or {}).get("g")
            for table, stem in ((scans.gaussian_width_scan(peak=peak, n=n, spec=spec), "gaussian-width"),
                                (scans.gaussian_detuning_scan(peak=peak, tau=args.tau, n=n, spec=spec),
                                 "gaussian-detuning")):
                _report(table, cmd)
                _emit(table, args.out, stem, cmd, args.svg, echo)
            return 0
        name, kw = _scan_kwargs(cmd, args, echo)
        table = _run_scan(name, kw, spec)
        _report(table, cmd)
        _emit(table, args.out, name, cmd, args.svg, echo)
        return 0
    except (ConfigError, ValueError, scans.ScanError, RuntimeError) as exc:
        print(f"heraldw {cmd}: {exc}", file=sys.stderr)
        return 1


def _report(table: scans.SweepTable, cmd: str):
    if table.manifest.get("scan") == "optimize":
        for k, n in enumerate(table.parameter_values):
            print(f"N={int(n)}  g_opt={table['g_opt_numeric'][k]:.5f}  P_max={table['p_max_numeric'][k]:.5f}  "
                  f"(closed form {table['g_opt_analytic'][k]:.5f}, {table['p_max_analytic'][k]:.5f})")
    for name, err in table.manifest.get("max_abs_err", {}).items():
        print(f"{name}: {err:.3e}")
    if "fits" in table.manifest:
        f = table.manifest["fits"]
        print(f"slopes: residual_rwa {f['slope_rwa']:.3f} (rse {f['rse_rwa']:.3f}), "
              f"residual_bs {f['slope_bs']:.3f} (rse {f['rse_bs']:.3f})")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
