"""Command-line entry points: simulate, analyze, monitor, selftest.

Config files are strict JSON (unknown keys are hard errors). Exit codes:
0 ok, 2 config error, 3 IO error, 4 numerical abort (NaN/CFL), 1 failed
selftest. NSEB_THREADS caps FFT data parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .criteria import (
    CriterionConfig,
    CriterionReport,
    besov_lr_integral,
    jump_criterion,
    sup_besov_criterion,
    tail_sup_criterion,
    time_integral_criterion,
)
from .dyadic import decompose
from .errors import ConfigError, NumericalAbort, SnapshotFormatError
from .flux import flux_report
from .grid import GridSpec
from .selftest import run_selftest
from .snapshot_io import (
    RunManifest,
    file_sha256,
    read_manifest,
    read_snapshot,
    write_manifest,
    write_snapshot,
)
from .solver import RandomBandLimited, SolverConfig, TaylorGreen, run

_TOP_KEYS = {
    "n",
    "nu",
    "dt",
    "t_end",
    "snapshot_interval",
    "dealias_fraction",
    "initial_condition",
}
_IC_KEYS = {
    "taylor_green": {"type", "amplitude"},
    "random_band": {"type", "seed", "k_min", "k_max", "energy"},
}


def parse_solver_config(raw: dict) -> tuple[SolverConfig, dict]:
    """Validate a config mapping; returns the config and a canonical echo."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    missing = _TOP_KEYS - {"dealias_fraction"} - set(raw)
    if missing:
        raise ConfigError(f"missing config key(s): {sorted(missing)}")

    ic_raw = raw["initial_condition"]
    if not isinstance(ic_raw, dict) or "type" not in ic_raw:
        raise ConfigError("initial_condition must be an object with a 'type'")
    ic_type = ic_raw["type"]
    if ic_type not in _IC_KEYS:
        raise ConfigError(f"unknown initial_condition type {ic_type!r}")
    unknown = set(ic_raw) - _IC_KEYS[ic_type]
    if unknown:
        raise ConfigError(f"unknown initial_condition key(s): {sorted(unknown)}")
    if ic_type == "taylor_green":
        ic = TaylorGreen(amplitude=float(ic_raw.get("amplitude", 1.0)))
    else:
        try:
            ic = RandomBandLimited(
                seed=int(ic_raw["seed"]),
                k_min=float(ic_raw["k_min"]),
                k_max=float(ic_raw["k_max"]),
                energy=float(ic_raw.get("energy", 1.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"initial_condition missing key {exc}") from exc

    grid_kwargs = {"n": int(raw["n"])}
    if "dealias_fraction" in raw:
        grid_kwargs["dealias_fraction"] = float(raw["dealias_fraction"])
    config = SolverConfig(
        grid=GridSpec(**grid_kwargs),
        nu=float(raw["nu"]),
        dt=float(raw["dt"]),
        t_end=float(raw["t_end"]),
        snapshot_interval=float(raw["snapshot_interval"]),
        initial_condition=ic,
    )
    echo = {
        "n": config.grid.n,
        "dealias_fraction": config.grid.dealias_fraction,
        "nu": config.nu,
        "dt": config.dt,
        "t_end": config.t_end,
        "snapshot_interval": config.snapshot_interval,
        "initial_condition": {k: ic_raw[k] for k in sorted(ic_raw)},
    }
    return config, echo


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_simulate(config_path: str | Path, run_dir: str | Path) -> Path:
    raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
    config, echo = parse_solver_config(raw)
    run_dir = Path(run_dir)
    (run_dir / "snapshots").mkdir(parents=True, exist_ok=True)

    snapshots, ledger = run(config)
    entries = []
    for idx, snap in enumerate(snapshots):
        rel = f"snapshots/snap_{idx:06d}.nseb"
        record = write_snapshot(snap, run_dir / rel)
        entries.append({"time": snap.time, "file": rel, "sha256": record.sha256})

    energy_rel = "energy.csv"
    _write_csv(
        run_dir / energy_rel,
        ["time [T]", "kinetic_energy [L^5 T^-2]", "dissipation_integral [L^5 T^-2]"],
        (
            (_fmt(t), _fmt(e), _fmt(d))
            for t, e, d in zip(ledger.times, ledger.kinetic, ledger.dissipation_integral)
        ),
    )
    manifest = RunManifest(
        config=echo,
        snapshots=entries,
        energy_file=energy_rel,
        energy_sha256=file_sha256(run_dir / energy_rel),
    )
    write_manifest(manifest, run_dir)
    return run_dir


def _load_run(run_dir: Path):
    manifest = read_manifest(run_dir)
    fields = [read_snapshot(run_dir / entry["file"]) for entry in manifest.snapshots]
    if not fields:
        raise ConfigError(f"run directory {run_dir} holds no snapshots")
    return manifest, fields


def cmd_analyze(
    run_dir: str | Path, eps: float = 0.5, q_start: int = 2, fmt: str = "csv"
) -> list[Path]:
    run_dir = Path(run_dir)
    _, fields = _load_run(run_dir)
    out_dir = run_dir / "analysis"
    out_dir.mkdir(exist_ok=True)

    norm_history = []
    for f in fields:
        norm_history.append(decompose(f).norms)
    reports = [
        flux_report(f, eps=eps, q_start=q_start, history=norm_history) for f in fields
    ]

    def _nums(arr):
        return [v if np.isfinite(v) else None for v in arr.tolist()]

    written = []
    payload = []
    for rep in reports:
        payload.append(
            {
                "time": rep.time,
                "eps": rep.eps,
                "q_start": rep.q_start,
                "qs": rep.qs,
                "flux": _nums(rep.flux),
                "transfer": _nums(rep.transfer),
                "commutator_residual": _nums(rep.commutator_residual),
                "identity_residual": _nums(rep.identity_residual),
                "bound_low": rep.bound_terms.low,
                "bound_high": rep.bound_terms.high,
                "bound_transport": rep.bound_terms.transport,
                "remainder": rep.remainder,
                "tail_cubes": rep.tail_cubes,
                "bound_ratio": rep.bound_ratio,
            }
        )
    if fmt in ("json", "csv"):
        path = out_dir / "flux.json"
        path.write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        written.append(path)
    if fmt == "csv":
        rows = []
        for rep in reports:
            for i, q in enumerate(rep.qs):
                rows.append((_fmt(rep.time), q, "flux", "L^5 T^-3", _fmt(rep.flux[i])))
                rows.append(
                    (_fmt(rep.time), q, "transfer", "L^5 T^-3", _fmt(rep.transfer[i]))
                )
                rows.append(
                    (
                        _fmt(rep.time),
                        q,
                        "commutator_residual",
                        "1",
                        _fmt(rep.commutator_residual[i]),
                    )
                )
                rows.append(
                    (
                        _fmt(rep.time),
                        q,
                        "identity_residual",
                        "1",
                        _fmt(rep.identity_residual[i]),
                    )
                )
            scalars = {
                "bound_low": rep.bound_terms.low,
                "bound_high": rep.bound_terms.high,
                "bound_transport": rep.bound_terms.transport,
                "remainder": rep.remainder,
                "tail_cubes": rep.tail_cubes,
                "bound_ratio": rep.bound_ratio,
            }
            for name, value in scalars.items():
                unit = "1" if name == "bound_ratio" else "L^(4-eps) T^-3"
                rows.append((_fmt(rep.time), "", name, unit, _fmt(value)))
        path = out_dir / "flux.csv"
        _write_csv(path, ["time [T]", "q", "quantity", "unit", "value"], rows)
        written.append(path)
    return written


def _report_to_dict(rep: CriterionReport) -> dict:
    return {
        "name": rep.name,
        "summary": rep.summary,
        "threshold": rep.threshold,
        "margin": rep.margin,
        "verdict": rep.verdict,
        "times": rep.times.tolist(),
        "qs": rep.qs,
        "values": None if rep.values is None else np.asarray(rep.values).tolist(),
        "extras": {
            k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in rep.extras.items()
        },
    }


def cmd_monitor(
    run_dir: str | Path, criterion_config: CriterionConfig, fmt: str = "csv"
) -> list[Path]:
    run_dir = Path(run_dir)
    _, fields = _load_run(run_dir)
    out_dir = run_dir / "criteria"
    out_dir.mkdir(exist_ok=True)

    decs = [decompose(f) for f in fields] if len(fields) <= 64 else None
    reports = [
        tail_sup_criterion(fields, criterion_config, decs),
        sup_besov_criterion(fields, criterion_config, decs),
        jump_criterion(fields, criterion_config),
        time_integral_criterion(fields, criterion_config, decs),
    ]
    lr = besov_lr_integral(fields, criterion_config.r)

    written = []
    doc = {
        "criterion_config": asdict(criterion_config),
        "reports": [_report_to_dict(r) for r in reports],
        "besov_lr_integral": {"r": criterion_config.r, "value": lr},
    }
    path = out_dir / "criteria.json"
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    written.append(path)

    if fmt == "csv":
        for rep in reports:
            series = np.asarray(rep.values)
            if series.ndim == 2:  # collapse band axis for the time series
                masked = np.where(np.isfinite(series), series, -np.inf)
                series = masked.max(axis=1)
            rows = [
                (_fmt(t), _fmt(v))
                for t, v in zip(rep.times, series)
                if np.isfinite(v)
            ]
            path = out_dir / f"criterion_{rep.name}.csv"
            _write_csv(path, ["time [T]", f"{rep.name} [per-snapshot value]"], rows)
            written.append(path)
    return written


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nseb",
        description="Pseudo-spectral Navier-Stokes runs with dyadic-band "
        "flux decomposition and regularity-criterion monitoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("--config", required=True, help="JSON config path")
    p_sim.add_argument("--run-dir", required=True, help="output run directory")

    p_ana = sub.add_parser("analyze", help="per-snapshot flux decomposition")
    p_ana.add_argument("--run-dir", required=True)
    p_ana.add_argument("--eps", type=float, default=0.5)
    p_ana.add_argument("--Q", dest="q_start", type=int, default=2)
    p_ana.add_argument("--format", choices=("csv", "json"), default="csv")

    p_mon = sub.add_parser("monitor", help="evaluate regularity criteria")
    p_mon.add_argument("--run-dir", required=True)
    p_mon.add_argument("--c", type=float, default=1.0)
    p_mon.add_argument("--r", type=float, default=3.0)
    p_mon.add_argument("--q-tail", type=int, default=2)
    p_mon.add_argument("--jump-window", type=int, default=1)
    p_mon.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("selftest", help="oracle-equivalence checks at n in {16, 32}")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            out = cmd_simulate(args.config, args.run_dir)
            print(f"run written to {out}")
        elif args.command == "analyze":
            for path in cmd_analyze(args.run_dir, args.eps, args.q_start, args.format):
                print(f"wrote {path}")
        elif args.command == "monitor":
            config = CriterionConfig(
                c=args.c, r=args.r, q_tail=args.q_tail, jump_window=args.jump_window
            )
            for path in cmd_monitor(args.run_dir, config, args.format):
                print(f"wrote {path}")
        elif args.command == "selftest":
            return 0 if run_selftest() else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, SnapshotFormatError, json.JSONDecodeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
