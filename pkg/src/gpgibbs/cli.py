"""Command-line front end: configuration, orchestration, persistence.

Flat ``key = value`` config files (with an optional [run] section) are
merged with command-line overrides, echoed to JSON, and hashed; every
output file carries the hash in a header line so results can be traced
back to the exact configuration.  All numeric output uses a fixed
17-significant-digit format, making repeated runs byte-identical for a
fixed seed (the manifest records wall time and is the one exception).
"""

import argparse
import configparser
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .energy import calibrate_A, grand_hamiltonian, hamiltonian
from .errors import DiagnosticError, ParameterError
from .fields import GibbsParams, wick_mass
from .ldp import (
    concentration_experiment,
    entropy_experiment,
    free_energy_experiment,
    quadrature_oracle,
)
from .mcmc import (
    ChainConfig,
    default_step_beta,
    make_shell_init,
    run_chain,
    run_conditioned_chain,
)
from .oracle import OracleGrid
from .soliton import minimize_constrained, scan_mass_threshold
from .spectral import build_basis

__all__ = ["main", "run"]

_DEFAULTS = {
    "epsilon": 0.2,
    "truncation": 8,
    "mass_level": 1.0,
    "shell_width": 0.1,
    "coupling": 1.0,
    "chem_potential": 0.0,
    "eps_grid": "0.4,0.2,0.1",
    "r_schedule": "",            # empty -> {0.2, 0.1, 0.05} * mass_level
    "delta_grid": "0.2,0.5",
    "d_grid": "0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6",
    "p": 4.0,
    "n_samples": 100_000,
    "n_steps": 50_000,
    "n_burn": -1,                # -1 -> n_steps // 10
    "step_beta": 0.0,            # 0 -> temperature default
    "thin": 10,
    "observable": "shell_prob",
    "power": 1,
    "probes": 2000,
    "seed": 0,
    "threads": 1,
    "out": "out",
}
_INT_KEYS = {"truncation", "n_samples", "n_steps", "n_burn", "thin", "power",
             "probes", "seed", "threads"}
_FLOAT_KEYS = {"epsilon", "mass_level", "shell_width", "coupling",
               "chem_potential", "p", "step_beta"}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _parse_list(text):
    return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]


def load_config(path=None, overrides=None) -> dict:
    """Defaults <- config file <- command-line overrides, validated."""
    cfg = dict(_DEFAULTS)
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ParameterError(f"config file not found: {path}")
        for section in parser.sections():
            for key, value in parser[section].items():
                if key not in _DEFAULTS:
                    raise ParameterError(f"unknown config key {key!r}")
                cfg[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = value
    for key in _INT_KEYS:
        cfg[key] = int(cfg[key])
    for key in _FLOAT_KEYS:
        cfg[key] = float(cfg[key])
    for key in ("eps_grid", "r_schedule", "delta_grid", "d_grid"):
        if not isinstance(cfg[key], list):
            cfg[key] = _parse_list(cfg[key])
    if not cfg["r_schedule"]:
        cfg["r_schedule"] = [s * cfg["mass_level"] for s in (0.2, 0.1, 0.05)]
    if cfg["threads"] < 1:
        raise ParameterError(f"threads must be >= 1, got {cfg['threads']}")
    return cfg


def config_hash(cfg: dict) -> str:
    # output directory and thread count are bookkeeping, not part of the
    # experiment (results must not depend on either)
    keyed = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
    blob = json.dumps(keyed, sort_keys=True, separators=(",", ":"), default=_fmt)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _params(cfg) -> GibbsParams:
    return GibbsParams(
        epsilon=cfg["epsilon"],
        truncation=cfg["truncation"],
        mass_level=cfg["mass_level"],
        shell_width=cfg["shell_width"],
        coupling=cfg["coupling"],
        chem_potential=cfg["chem_potential"],
    )


def _write_table(path: Path, hash_: str, columns, rows):
    lines = [f"# config {hash_}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_dat(path: Path, hash_: str, pairs):
    lines = [f"# config {hash_}"]
    lines += [f"{_fmt(x)} {_fmt(y)}" for x, y in pairs]
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(out: Path, cfg: dict, hash_: str, wall: float):
    import scipy

    manifest = {
        "config": {k: (_fmt(v) if not isinstance(v, list) else [_fmt(x) for x in v])
                   for k, v in cfg.items()},
        "config_hash": hash_,
        "seed": cfg["seed"],
        "versions": {
            "package": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_seconds": wall,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (out / "config.json").write_text(
        json.dumps(cfg, indent=2, sort_keys=True, default=_fmt) + "\n"
    )


def _chain_config(cfg, params, init):
    beta = cfg["step_beta"] or default_step_beta(params.epsilon)
    n_burn = cfg["n_burn"] if cfg["n_burn"] >= 0 else cfg["n_steps"] // 10
    return ChainConfig(
        params=params,
        step_beta=beta,
        n_steps=cfg["n_steps"],
        n_burn=n_burn,
        thin=cfg["thin"],
        seed=cfg["seed"],
        init=init,
    )


def _emit_chain(out, hash_, basis, params, result, coupling, A):
    n = basis.n_modes
    columns = ["step"]
    for k in range(n):
        columns += [f"c{k}_re", f"c{k}_im"]
    columns += ["wick_mass", "hamiltonian", "grand_hamiltonian"]
    rows = []
    for i, phi in enumerate(result.samples):
        e = hamiltonian(basis, phi, coupling, A)
        mw = wick_mass(basis, params, phi)
        row = [i]
        for c in phi:
            row += [c.real, c.imag]
        row += [mw, e.total_h, e.total_hg]
        rows.append(row)
    _write_table(out / "samples.csv", hash_, columns, rows)
    _write_table(
        out / "chain_summary.csv",
        hash_,
        ["accept_rate", "iact", "n_kept"],
        [[result.accept_rate, result.iact, result.samples.shape[0]]],
    )
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)


def _emit_report(out, hash_, report):
    doc = {
        "kind": report.kind,
        "config": report.config,
        "target": report.target,
        "target_source": report.target_source,
        "tolerance": report.tolerance,
        "verdict": bool(report.verdict),
        "notes": list(report.notes),
    }
    if report.fit is not None:
        doc["fit"] = {
            "slope_c": report.fit.slope_c,
            "intercept_b": report.fit.intercept_b,
            "slope_se": report.fit.slope_se,
            "residual": report.fit.residual,
        }
    (out / "report.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True, default=_fmt) + "\n"
    )
    if report.rows:
        columns = list(report.rows[0].keys())
        _write_table(
            out / "cells.csv", hash_, columns,
            [[row[c] for c in columns] for row in report.rows],
        )
    if report.fit is not None:
        pts = [(1.0 / e, v) for e, v, _ in report.fit.points]
        _write_dat(out / "fit_points.dat", hash_, pts)
        xs = sorted(x for x, _ in pts)
        line = [(x, report.fit.intercept_b - report.fit.slope_c * x) for x in xs]
        _write_dat(out / "fit_line.dat", hash_, line)
    return 0 if report.verdict else 1


def _cmd_soliton(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    res = minimize_constrained(basis, cfg["coupling"], cfg["mass_level"])
    rows = [[k, c.real, c.imag] for k, c in enumerate(res.q_coeffs)]
    _write_table(out / "q.csv", hash_, ["mode", "re", "im"], rows)
    table = [
        [d, minimize_constrained(basis, cfg["coupling"], d).energy]
        for d in cfg["d_grid"]
    ]
    _write_table(out / "i_table.csv", hash_, ["mass", "energy"], table)
    _write_table(
        out / "summary.csv", hash_,
        ["mass", "energy", "grad_residual", "iterations"],
        [[cfg["mass_level"], res.energy, res.grad_residual, res.iterations]],
    )
    return 0


def _cmd_dstar(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    scan = scan_mass_threshold(basis, cfg["coupling"], cfg["d_grid"])
    rows = [
        [d, e, u]
        for d, e, u in zip(scan.masses, scan.energies, scan.upper_bounds)
    ]
    _write_table(out / "dstar.csv", hash_, ["mass", "energy", "upper_bound"], rows)
    _write_table(out / "summary.csv", hash_, ["d_star"], [[scan.d_star]])
    return 0


def _cmd_sample(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    params = _params(cfg)
    init = np.zeros(basis.n_modes, dtype=complex)
    result = run_chain(basis, _chain_config(cfg, params, init))
    _emit_chain(out, hash_, basis, params, result, cfg["coupling"],
                cfg["chem_potential"])
    return 0


def _cmd_condition(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    params = _params(cfg)
    q = minimize_constrained(basis, cfg["coupling"] / 2.0, cfg["mass_level"]).q_coeffs
    init = make_shell_init(basis, params, q)
    result = run_conditioned_chain(basis, _chain_config(cfg, params, init))
    _emit_chain(out, hash_, basis, params, result, cfg["coupling"],
                cfg["chem_potential"])
    return 0


def _cmd_free_energy(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    report = free_energy_experiment(
        basis, _params(cfg), cfg["eps_grid"], cfg["n_samples"], seed=cfg["seed"]
    )
    return _emit_report(out, hash_, report)


def _cmd_entropy(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    report = entropy_experiment(
        basis, _params(cfg), cfg["eps_grid"], cfg["n_samples"],
        r_schedule=cfg["r_schedule"], seed=cfg["seed"],
    )
    return _emit_report(out, hash_, report)


def _cmd_concentration(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    report = concentration_experiment(
        basis, _params(cfg), cfg["eps_grid"], cfg["delta_grid"], p=cfg["p"],
        n_steps=cfg["n_steps"], seed=cfg["seed"], thin=cfg["thin"],
    )
    return _emit_report(out, hash_, report)


def _cmd_oracle(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    params = _params(cfg)
    value = quadrature_oracle(basis, params, cfg["observable"],
                              power=cfg["power"], grid=OracleGrid())
    _write_table(
        out / "oracle.csv", hash_,
        ["observable", "power", "epsilon", "value"],
        [[cfg["observable"], cfg["power"], cfg["epsilon"], value]],
    )
    return 0


def _cmd_calibrate_a(cfg, out, hash_):
    basis = build_basis(cfg["truncation"])
    rng = np.random.default_rng(cfg["seed"])
    res = calibrate_A(basis, cfg["coupling"], probes=cfg["probes"], rng=rng)
    _write_table(
        out / "calibration.csv", hash_,
        ["a0", "gns_constant", "coupling", "n_probes"],
        [[res.a0, res.gns_constant, res.coupling, res.n_probes]],
    )
    return 0


_COMMANDS = {
    "soliton": _cmd_soliton,
    "dstar": _cmd_dstar,
    "sample": _cmd_sample,
    "condition": _cmd_condition,
    "free-energy": _cmd_free_energy,
    "entropy": _cmd_entropy,
    "concentration": _cmd_concentration,
    "oracle": _cmd_oracle,
    "calibrate-a": _cmd_calibrate_a,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gpgibbs",
        description="Sampling laboratory for tamed Gibbs measures of the "
        "focusing trapped Gross-Pitaevskii field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--eps", type=str, default=None,
                       help="temperature, or comma list for grid experiments")
        p.add_argument("--mass", type=float, default=None, dest="mass_level")
        p.add_argument("--shell", type=float, default=None, dest="shell_width")
        p.add_argument("--delta", type=str, default=None, dest="delta_grid")
        p.add_argument("--n-samples", type=int, default=None, dest="n_samples")
        p.add_argument("--truncation", type=int, default=None)
        p.add_argument("--coupling", type=float, default=None)
        p.add_argument("--chem-potential", type=float, default=None,
                       dest="chem_potential")
        p.add_argument("--observable", type=str, default=None)
    return parser


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    overrides = {
        k: v for k, v in vars(args).items() if k not in ("command", "config")
    }
    eps = overrides.pop("eps", None)
    try:
        cfg = load_config(args.config, overrides)
        if eps is not None:
            values = _parse_list(eps)
            cfg["epsilon"] = values[0]
            if len(values) > 1 or args.command in (
                "free-energy", "entropy", "concentration"
            ):
                cfg["eps_grid"] = values
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        hash_ = config_hash(cfg)
        start = time.perf_counter()
        code = _COMMANDS[args.command](cfg, out, hash_)
        _write_manifest(out, cfg, hash_, time.perf_counter() - start)
        return code
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiagnosticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
