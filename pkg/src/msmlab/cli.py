"""Command-line interface.

    msm-lab <command> --out DIR [--config FILE] [--seed N] [--n N] [--dt X]

Commands: simulate, verify-inequalities, stability, gauge-roundtrip,
embedding.  Exit codes: 0 when every hard check passed, 2 on a check
failure, 3 on a blow-up abort, 1 on configuration errors.  Hard checks are
the identity-backed ones (partition reconstruction, the paraproduct and
interpolation identities, the Coulomb condition, the embedding chain, the
perturbation-size uniformity of the stability run); survey ratios are
reported, never asserted against universal constants.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments, snapshot
from .config import ExperimentConfig, load_config
from .dyadic import besov_norm
from .evolution import BlowUpError
from .randfields import random_field, random_map, sample_rng
from .reports import write_json, write_norm_table

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_BLOWUP = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msm-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (
        "simulate",
        "verify-inequalities",
        "stability",
        "gauge-roundtrip",
        "embedding",
    ):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", type=Path, default=None, help="configuration file")
        cmd.add_argument("--out", type=Path, required=True, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override ensemble seed")
        cmd.add_argument("--n", type=int, default=None, help="override grid size")
        cmd.add_argument("--dt", type=float, default=None, help="override time step")
        if name == "gauge-roundtrip":
            cmd.add_argument(
                "--snapshot", type=Path, default=None, help="read the map from a snapshot"
            )
    return parser


def _load(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.n is not None:
        overrides["n"] = args.n
    if args.dt is not None:
        overrides["dt"] = args.dt
    return config.with_overrides(**overrides) if overrides else config


def _checks_payload(checks: dict[str, tuple[float, float]]) -> dict:
    return {
        name: {"value": value, "limit": limit, "passed": bool(value <= limit)}
        for name, (value, limit) in checks.items()
    }


def _run_simulate(config: ExperimentConfig, out: Path, args) -> dict:
    record = experiments.run_simulation(config)
    record.to_csv(out / "trajectory.csv", ["L2", "Hs", "Hminushalf", "Besov_half_q2"])
    if record.snapshots:
        fields = [f for _, fields in record.snapshots for f in fields]
        snapshot.write_snapshot(out / "snapshots.bin", fields)
    mass = record.column("L2") ** 2
    drift = float(np.abs(mass - mass[0]).max() / mass[0]) if mass[0] > 0 else 0.0
    payload = {
        "experiment": "simulate",
        "mass_relative_drift": drift,
        "final_time": record.times[-1],
        "in_uniqueness_range": config.in_uniqueness_range,
        "checks": {},
    }
    return payload


def _run_verify(config: ExperimentConfig, out: Path, args) -> dict:
    reports = experiments.run_inequality_survey(config)
    checks = {
        "partition_reconstruction": (
            experiments.check_reconstruction(config),
            1e-12,
        ),
        "paraproduct_identity": (experiments.check_paraproduct(config), 1e-10),
        "interpolation_inequality": (
            experiments.check_interpolation(config),
            1.0 + 1e-10,
        ),
    }
    rows = []
    grid = config.grid
    for i in range(min(config.count, 20)):
        f = random_field(grid, sample_rng(config.seed, i), config.amplitude, config.decay)
        for s, p, q in ((0.5, config.q, 2.0), (0.5, 2.0, 2.0), (0.0, np.inf, 1.0)):
            rows.append((i, s, p, q, besov_norm(f, s, p, q)))
    write_norm_table(out / "norm_table.csv", rows)
    return {
        "experiment": "verify-inequalities",
        "reports": [r.to_dict() for r in reports],
        "anchors": experiments.single_mode_anchors(config.q),
        "checks": _checks_payload(checks),
    }


def _run_stability(config: ExperimentConfig, out: Path, args) -> dict:
    reports = experiments.run_stability_experiment(config)
    sups = [r.sup_amplification() for r in reports if r.sup_amplification() > 0]
    spread = max(sups) / min(sups) if sups else 1.0
    dominated = all(
        w <= env * (1.0 + 1e-9)
        for r in reports
        for w, env in zip(r.w_norms, r.envelope)
    )
    checks = {
        "delta_uniformity_spread": (spread, 2.0),
        "envelope_domination": (0.0 if dominated else 1.0, 0.5),
    }
    return {
        "experiment": "stability",
        "reports": [r.to_dict() for r in reports],
        "checks": _checks_payload(checks),
    }


def _run_gauge_roundtrip(config: ExperimentConfig, out: Path, args) -> dict:
    if getattr(args, "snapshot", None):
        _, fields = snapshot.read_snapshot(args.snapshot)
        z = fields[0]
    else:
        z = random_map(config.grid, sample_rng(config.seed, 0), config.amplitude)
        snapshot.write_snapshot(out / "map.bin", [z])
    residuals = experiments.gauge_roundtrip_residuals(z)
    checks = {"coulomb_divergence": (residuals["div_residual"], 1e-8)}
    return {
        "experiment": "gauge-roundtrip",
        **residuals,
        "checks": _checks_payload(checks),
    }


def _run_embedding(config: ExperimentConfig, out: Path, args) -> dict:
    result = experiments.embedding_report(config)
    checks = {"embedding_chain": (result["ratio"], 1.0 + 1e-10)}
    return {"experiment": "embedding", **result, "checks": _checks_payload(checks)}


_RUNNERS = {
    "simulate": _run_simulate,
    "verify-inequalities": _run_verify,
    "stability": _run_stability,
    "gauge-roundtrip": _run_gauge_roundtrip,
    "embedding": _run_embedding,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load(args)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        payload = _RUNNERS[args.command](config, out, args)
    except BlowUpError as exc:
        write_json(out / "report.json", {"experiment": args.command, "blowup": str(exc)})
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    payload["config_hash"] = config.config_hash
    payload["seed"] = config.seed
    write_json(out / "report.json", payload)
    failed = [
        name for name, entry in payload.get("checks", {}).items() if not entry["passed"]
    ]
    for name in failed:
        print(f"check failed: {name}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
