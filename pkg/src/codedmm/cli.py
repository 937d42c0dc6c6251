"""Command-line interface: presets, config resolution, CSV/JSON emission.

Subcommands:
  table     comparison table (threshold, load, storage, success probability)
  sweep     per-cluster-size scheme comparison plus the adaptive selection
  select    one-shot constrained selection for a single cluster size
  simulate  Monte Carlo run for one concrete code
  verify    self-check battery with machine-readable verdicts

Configuration comes from an optional JSON file plus flags; flags win.
Presets bundle the reference experiment setups. All output is deterministic
for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .analytic import build_comparison_table
from .checks import FAIL, run_checks, summarize
from .codes import CodeChoice, Scheme, feasibility_issue
from .errors import NoFeasibleCodeError
from .selector import SelectionConstraints, select
from .simulation import run_experiment

SWEEP_HEADER = [
    "N",
    "scheme",
    "p_opt",
    "k",
    "T_analytic",
    "T_simulated",
    "storage_master",
    "storage_worker",
    "rho",
    "selected_by_acm2",
]

TABLE_HEADER = ["scheme", "N", "k", "gamma", "mu_master", "mu_worker", "rho", "feasible"]

# the adaptive selection row reuses the winning scheme's numbers
ADAPTIVE_LABEL = "acm2"

PRESETS = {
    "table1": {
        "n_values": [6, 7, 8, 9],
        "k_dim": 2000,
        "l_dim": 2000,
        "phi": 2 / 3,
        "partitions": 2,
        "lam_support": [1.0],
    },
    "fig1": {
        "n_values": list(range(6, 21)),
        "k_dim": 2000,
        "l_dim": 5000,
        "phi": 0.95,
        "lam_support": [float(v) for v in range(2, 11)],
    },
    "fig2": {
        "n_values": list(range(6, 21)),
        "k_dim": 2000,
        "l_dim": 5000,
        "phi": 0.95,
        "lam_support": [1 / d for d in range(10, 1, -1)],
        "storage_threshold_worker": 15_000_000.0,
    },
    "fig3": {
        "n_values": list(range(6, 21)),
        "k_dim": 2000,
        "l_dim": 5000,
        "phi": 0.9,
        "lam_support": [1 / 2000, 1 / 1000, 1 / 900, 1 / 800, 1 / 700, 1 / 600, 1 / 500],
        "storage_threshold_worker": 10_000_000.0,
        "success_threshold": 0.98,
    },
}


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one command invocation."""

    n_values: tuple
    k_dim: int = 2000
    l_dim: int = 2000
    lam_support: tuple = (1.0,)
    phi: float = 1.0
    success_threshold: float | None = None
    storage_threshold_worker: float | None = None
    storage_threshold_master: float | None = None
    partitions: int = 2
    trials: int = 100_000
    master_seed: int = 0
    simulate: bool = False
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if not self.n_values:
            raise UsageError("empty N range")
        if any(int(n) != n or n < 2 for n in self.n_values):
            raise UsageError(f"cluster sizes must be integers >= 2, got {list(self.n_values)}")
        if not self.lam_support or any(v <= 0 for v in self.lam_support):
            raise UsageError(f"straggling rates must be positive, got {list(self.lam_support)}")
        if self.trials < 1:
            raise UsageError(f"trials must be >= 1, got {self.trials}")
        if self.partitions < 2:
            raise UsageError(f"partitions must be >= 2, got {self.partitions}")
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.fmt}")


# config key -> (flag attribute, converter)
_CONFIG_KEYS = {
    "n_values": ("workers", lambda v: tuple(int(x) for x in v)),
    "k_dim": ("k_dim", int),
    "l_dim": ("l_dim", int),
    "lam_support": ("lam_support", lambda v: tuple(float(x) for x in v)),
    "phi": ("phi", float),
    "success_threshold": ("rho_thr", float),
    "storage_threshold_worker": ("storage_worker", float),
    "storage_threshold_master": ("storage_master", float),
    "partitions": ("partitions", int),
    "trials": ("trials", int),
    "master_seed": ("seed", int),
    "simulate": ("simulate", bool),
    "out": ("out", str),
    "fmt": ("format", str),
}
_FILE_KEYS = set(_CONFIG_KEYS) | {"preset", "format"}


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    unknown = set(raw) - _FILE_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return raw


def resolve_config(args, require_n=True):
    """defaults < preset < config file < flags; usage errors on bad input."""
    file_cfg = _load_config_file(args.config) if args.config else {}
    preset = args.preset or file_cfg.get("preset")
    merged = {}
    if preset is not None:
        if preset not in PRESETS:
            raise UsageError(f"unknown preset {preset!r}, expected one of {sorted(PRESETS)}")
        merged.update(PRESETS[preset])
    for key, value in file_cfg.items():
        if key == "preset":
            continue
        merged["fmt" if key == "format" else key] = value
    for key, (attr, convert) in _CONFIG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    if getattr(args, "lam", None) is not None:
        merged["lam_support"] = [args.lam]
    if "n_values" not in merged:
        if not require_n:
            merged["n_values"] = [6]
        else:
            raise UsageError(
                "no cluster sizes given (use --workers, --preset, or a config file)"
            )
    normalized = {}
    for key, value in merged.items():
        _, convert = _CONFIG_KEYS[key]
        try:
            normalized[key] = convert(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {value!r}") from exc
    return ExperimentConfig(**normalized)


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_value(cell) for cell in row])
    return buffer.getvalue()


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _constraints(config, n):
    return SelectionConstraints(
        worker_count=n,
        dims=(config.k_dim, config.l_dim),
        survival_probability=config.phi,
        storage_threshold_master=config.storage_threshold_master,
        storage_threshold_worker=config.storage_threshold_worker,
        success_threshold=config.success_threshold or 0.0,
    )


def _draw_rate(config, n):
    """Per-cluster-size straggling rate, uniform over the support."""
    support = config.lam_support
    if len(support) == 1:
        return support[0]
    rng = np.random.default_rng(np.random.SeedSequence((config.master_seed, n)))
    return support[int(rng.integers(len(support)))]


def _stream_seed(master_seed, *tags):
    words = np.random.SeedSequence((master_seed, *tags)).generate_state(2, np.uint64)
    return int(words[0]) | int(words[1]) << 64


# stable integer tags for per-scheme random streams
_SCHEME_TAG = {scheme: index for index, scheme in enumerate(Scheme)}


def cmd_table(config):
    rows = build_comparison_table(
        config.n_values, config.k_dim, config.l_dim, config.phi, p=config.partitions
    )
    records = [
        {
            "scheme": row.choice.scheme.value,
            "N": row.cluster_size,
            "k": row.recovery_threshold,
            "gamma": row.computing_load,
            "mu_master": row.storage_master,
            "mu_worker": row.storage_worker,
            "rho": row.success_probability,
            "feasible": row.feasible,
        }
        for row in rows
    ]
    if config.fmt == "json":
        _emit(_json_text(records), config.out)
    else:
        _emit(
            _csv_text(TABLE_HEADER, [[r[c] for c in TABLE_HEADER] for r in records]),
            config.out,
        )
    return 0


def _empty_sweep_record(n, label):
    return {
        "N": n,
        "scheme": label,
        "p_opt": None,
        "k": None,
        "T_analytic": None,
        "T_simulated": None,
        "storage_master": None,
        "storage_worker": None,
        "rho": None,
        "selected_by_acm2": 0,
    }


def _sweep_record(n, label, result, simulated, selected):
    return {
        "N": n,
        "scheme": label,
        "p_opt": result.choice.partitions,
        "k": result.row.recovery_threshold,
        "T_analytic": result.objective_time,
        "T_simulated": simulated,
        "storage_master": result.row.storage_master,
        "storage_worker": result.row.storage_worker,
        "rho": result.row.success_probability,
        "selected_by_acm2": 1 if selected else 0,
    }


def _simulated_mean(config, result, n, lam):
    try:
        stats = run_experiment(
            result.choice,
            n,
            lam,
            config.phi,
            config.trials,
            _stream_seed(config.master_seed, n, _SCHEME_TAG[result.choice.scheme]),
        )
    except ValueError:
        # grids beyond the exhaustive decodability table are not simulated
        return None
    mean = stats.mean_completion
    return None if math.isnan(mean) else float(mean)


def cmd_sweep(config):
    records = []
    for n in config.n_values:
        lam = _draw_rate(config, n)
        constraints = _constraints(config, n)
        try:
            winner = select(constraints, lam)
        except NoFeasibleCodeError:
            winner = None
        winner_record = None
        for scheme in Scheme:
            try:
                result = select(constraints, lam, schemes=[scheme])
            except NoFeasibleCodeError:
                records.append(_empty_sweep_record(n, scheme.value))
                continue
            simulated = _simulated_mean(config, result, n, lam) if config.simulate else None
            selected = winner is not None and winner.choice.scheme is scheme
            record = _sweep_record(n, scheme.value, result, simulated, selected)
            records.append(record)
            if selected:
                winner_record = record
        if winner_record is None:
            records.append(_empty_sweep_record(n, ADAPTIVE_LABEL))
        else:
            adaptive = dict(winner_record)
            adaptive["scheme"] = ADAPTIVE_LABEL
            records.append(adaptive)
    if config.fmt == "json":
        _emit(_json_text(records), config.out)
    else:
        _emit(
            _csv_text(SWEEP_HEADER, [[r[c] for c in SWEEP_HEADER] for r in records]),
            config.out,
        )
    return 0


def cmd_select(config):
    if len(config.n_values) != 1:
        raise UsageError(f"select needs exactly one cluster size, got {list(config.n_values)}")
    if len(config.lam_support) != 1:
        raise UsageError("select needs a single straggling rate (--lam)")
    n = config.n_values[0]
    lam = config.lam_support[0]
    try:
        result = select(_constraints(config, n), lam)
    except NoFeasibleCodeError as exc:
        _emit(_json_text({"error": str(exc), "reasons": exc.reasons}), config.out)
        return 1
    payload = {
        "workers": n,
        "lam": lam,
        "scheme": result.choice.scheme.value,
        "partitions": result.choice.partitions,
        "k": result.row.recovery_threshold,
        "objective_time": result.objective_time,
        "storage_master": result.row.storage_master,
        "storage_worker": result.row.storage_worker,
        "rho": result.row.success_probability,
        "feasible_set_size": result.feasible_set_size,
    }
    _emit(_json_text(payload), config.out)
    return 0


def cmd_simulate(config, scheme_name):
    if scheme_name is None:
        raise UsageError("simulate needs --scheme")
    if len(config.n_values) != 1:
        raise UsageError(f"simulate needs exactly one cluster size, got {list(config.n_values)}")
    if len(config.lam_support) != 1:
        raise UsageError("simulate needs a single straggling rate (--lam)")
    n = config.n_values[0]
    lam = config.lam_support[0]
    choice = CodeChoice(Scheme(scheme_name), config.partitions)
    issue = feasibility_issue(choice, n)
    if issue is not None:
        raise UsageError(f"infeasible code: {issue}")
    stats = run_experiment(choice, n, lam, config.phi, config.trials, config.master_seed)
    payload = {
        "scheme": choice.scheme.value,
        "partitions": choice.partitions,
        "workers": n,
        "lam": lam,
        "phi": config.phi,
        "trials": stats.trials,
        "master_seed": config.master_seed,
        "decodable_trials": stats.decodable_trials,
        "undecodable_fraction": stats.undecodable_fraction,
        "mean_completion": _json_safe(stats.mean_completion),
        "p50": _json_safe(stats.p50),
        "p95": _json_safe(stats.p95),
    }
    _emit(_json_text(payload), config.out)
    return 0


def _json_safe(value):
    return None if value is None or math.isnan(value) else float(value)


def cmd_verify(config):
    results = run_checks(trials=config.trials, master_seed=config.master_seed)
    counts = summarize(results)
    payload = {
        "checks": [r.as_dict() for r in results],
        "summary": counts,
        "ok": counts[FAIL] == 0,
    }
    _emit(_json_text(payload), config.out)
    return 0 if counts[FAIL] == 0 else 1


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), default=None)
    common.add_argument("--config", default=None, metavar="PATH")
    common.add_argument("--seed", type=int, default=None, dest="seed")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--out", default=None, metavar="PATH")
    common.add_argument("--simulate", action="store_const", const=True, default=None)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--workers", type=int, nargs="+", default=None, metavar="N")
    common.add_argument("--k-dim", type=int, default=None, dest="k_dim")
    common.add_argument("--l-dim", type=int, default=None, dest="l_dim")
    common.add_argument("--phi", type=float, default=None)
    common.add_argument("--lam", type=float, default=None)
    common.add_argument(
        "--lam-support", type=float, nargs="+", default=None, dest="lam_support"
    )
    common.add_argument("--partitions", type=int, default=None)
    common.add_argument(
        "--storage-worker", type=float, default=None, dest="storage_worker"
    )
    common.add_argument(
        "--storage-master", type=float, default=None, dest="storage_master"
    )
    common.add_argument("--rho-thr", type=float, default=None, dest="rho_thr")

    parser = argparse.ArgumentParser(
        prog="codedmm",
        description="coded distributed matrix multiplication laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common], help="comparison table")
    sub.add_parser("sweep", parents=[common], help="scheme comparison over cluster sizes")
    sub.add_parser("select", parents=[common], help="one-shot constrained selection")
    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo for one code")
    simulate.add_argument(
        "--scheme", choices=[s.value for s in Scheme], default=None
    )
    sub.add_parser("verify", parents=[common], help="self-check battery")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args, require_n=args.command != "verify")
        if args.command == "table":
            return cmd_table(config)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "select":
            return cmd_select(config)
        if args.command == "simulate":
            return cmd_simulate(config, args.scheme)
        if args.command == "verify":
            return cmd_verify(config)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
