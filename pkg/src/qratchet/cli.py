"""Command-line entry point: ``qratchet <command> [--config FILE] [--key VALUE ...]``.

Commands map to figure families: ``evolve`` (current vs time), ``classical``
(ensemble current), ``portrait`` (phase space), ``rate`` (fitted rates),
``scan`` (rate grids), ``beta`` (quasi-momentum averaged current).

Every run writes plot-ready CSV plus a JSON sidecar holding the fully
resolved config; the sidecar is itself a valid ``--config``.

Exit codes: 0 success, 2 config error, 3 numerical abort, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import fields
from pathlib import Path

import yaml

from . import __version__
from ._backend import NAME as BACKEND
from .analysis import (beta_averaged_series, classical_series, estimate_rate, quantum_series,
                       write_series_csv)
from .classical import portrait, write_portrait_csv
from .config import COMMANDS, ConfigError, RunConfig, parse_config, read_config_file
from .params import ParameterError
from .quantum import TruncationError, evolve, write_distribution_csv
from .sweep import run_scan, write_grid_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def sidecar_path(output: str | Path) -> Path:
    return Path(output).with_suffix(".json")


def _write_sidecar(cfg: RunConfig, wall: float, warnings: list[str], details: dict) -> Path:
    path = sidecar_path(cfg.output)
    meta = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "version": __version__,
        "wall_time": wall,
        "warnings": warnings,
        "details": details,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def _mode_path(output: str, mode: str, n_modes: int) -> Path:
    p = Path(output)
    return p if n_modes == 1 else p.with_name(f"{p.stem}.{mode}{p.suffix}")


def run(cfg: RunConfig) -> tuple[int, list[Path]]:
    """Execute a validated config; returns ``(exit status, written files)``.

    Engine errors propagate, except per-point scan failures which are written
    as NaN rows and reported through a nonzero status.
    """
    t0 = time.perf_counter()
    params = cfg.scaled_params()
    v_k, v_l = cfg.potentials()
    warnings: list[str] = []
    details: dict = {"backend": BACKEND}
    written: list[Path] = []
    status = EXIT_OK

    if cfg.command == "evolve":
        ev = evolve(params, v_k, v_l, cfg.steps, n0=cfg.n0, beta=cfg.beta,
                    basis_size=cfg.basis_size, max_basis=cfg.max_basis,
                    check_every=cfg.check_every)
        written.append(write_series_csv(ev.values, cfg.output))
        if cfg.distribution:
            written.append(write_distribution_csv(ev.state, cfg.distribution))
        details.update(basis_size=ev.basis_size, norm_drift=ev.norm_drift,
                       growths=ev.growths)
        if ev.growths:
            warnings.append(f"basis grown to N={ev.basis_size}")
    elif cfg.command == "classical":
        s = classical_series(params, v_k, v_l, cfg.ensemble_size, cfg.steps, cfg.seed,
                             stratified=cfg.stratified, workers=cfg.workers)
        written.append(write_series_csv(s, cfg.output))
    elif cfg.command == "portrait":
        pts = portrait(params, v_k, v_l, cfg.n_init, cfg.n_iter)
        written.append(write_portrait_csv(pts, cfg.output))
    elif cfg.command == "rate":
        modes = ("quantum", "classical") if cfg.mode == "both" else (cfg.mode,)
        rows = []
        for mode in modes:
            if mode == "quantum":
                s = quantum_series(params, v_k, v_l, cfg.n0, cfg.steps, cfg.basis_size,
                                   beta=cfg.beta, max_basis=cfg.max_basis,
                                   check_every=cfg.check_every)
                details["basis_size"] = s.info["basis_size"]
            else:
                s = classical_series(params, v_k, v_l, cfg.ensemble_size, cfg.steps, cfg.seed,
                                     stratified=cfg.stratified, workers=cfg.workers)
            est = estimate_rate(s, tuple(cfg.window))
            rows.append([mode, repr(est.slope), repr(est.intercept), repr(est.r_squared),
                         est.window[0], est.window[1]])
        path = Path(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["mode", "slope", "intercept", "r_squared", "t_start", "t_end"])
            w.writerows(rows)
        written.append(path)
    elif cfg.command == "scan":
        spec = cfg.scan_spec()
        grids = run_scan(spec, workers=cfg.workers)
        for mode, grid in grids.items():
            written.append(write_grid_csv(grid, _mode_path(cfg.output, mode, len(grids))))
            for idx, reason in sorted(grid.missing.items()):
                warnings.append(f"{mode} point {list(idx)} missing: {reason}")
        if any(g.missing for g in grids.values()):
            status = EXIT_NUMERICAL
    elif cfg.command == "beta":
        dist = cfg.beta_distribution()
        s = beta_averaged_series(params, v_k, v_l, dist, cfg.steps, cfg.basis_size,
                                 max_basis=cfg.max_basis, workers=cfg.workers)
        written.append(write_series_csv(s, cfg.output))
        details.update(nodes=s.info["node_values"], basis_sizes=s.info["basis_sizes"])
    else:  # pragma: no cover - validated earlier
        raise ConfigError("command", cfg.command)

    written.append(_write_sidecar(cfg, time.perf_counter() - t0, warnings, details))
    return status, written


def _error_record(code: int, exc: BaseException, key: str | None = None) -> str:
    rec = {"status": "error", "exit_code": code, "type": type(exc).__name__, "message": str(exc)}
    if key is not None:
        rec["key"] = key
    return json.dumps(rec)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qratchet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML/JSON config file (or a run's .json sidecar)")
        for f in fields(RunConfig):
            if f.name == "command":
                continue
            sp.add_argument(f"--{f.name}", dest=f.name, default=None, metavar="VALUE")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        raw = getattr(args, f.name)
        if raw is not None:
            # flag text is parsed like a config value: numbers, lists, booleans
            overrides[f.name] = yaml.safe_load(raw) if f.type.startswith(("list", "bool", "int")) else raw
    try:
        text = read_config_file(args.config) if args.config else None
    except OSError as exc:
        print(_error_record(EXIT_IO, exc), file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, overrides, command=args.command)
    except ConfigError as exc:
        print(_error_record(EXIT_CONFIG, exc, exc.key), file=sys.stderr)
        return EXIT_CONFIG
    except yaml.YAMLError as exc:
        print(_error_record(EXIT_CONFIG, exc, "config"), file=sys.stderr)
        return EXIT_CONFIG
    try:
        status, written = run(cfg)
    except TruncationError as exc:
        print(_error_record(EXIT_NUMERICAL, exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except ParameterError as exc:
        print(_error_record(EXIT_CONFIG, exc, exc.key), file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(_error_record(EXIT_IO, exc), file=sys.stderr)
        return EXIT_IO
    for p in written:
        print(p)
    if status != EXIT_OK:
        print(json.dumps({"status": "partial", "exit_code": status,
                          "message": "some scan points are missing; see sidecar warnings"}),
              file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
