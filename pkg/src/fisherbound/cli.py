"""Command-line harness: runs suites and writes machine-readable reports.

Exit codes: 0 success, 2 a mathematical check failed, 3 bad configuration,
4 output could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, dynamics, purelimit, suite
from .errors import DomainError, FisherBoundError, InternalConsistencyError
from .fop import CATALOG_KEYS, from_key
from .inequalities import COUNTEREXAMPLE_LAMBDAS
from .report import summarize, to_csv, to_jsonl
from .states import MAX_DIM

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 3
EXIT_IO = 4

OUT_DIR_ENV = "FISHERBOUND_OUT_DIR"
DEFAULT_OUT_DIR = "fisherbound-out"
MAX_TRIALS = 100_000

COMMANDS = ("axioms", "table1", "main", "hk", "refined", "park-luo", "counterexample",
            "dynamics", "pure-limit", "random-suite")
FORMATS = ("json", "csv", "both")


class ConfigError(FisherBoundError):
    pass


@dataclass
class RunConfig:
    command: str
    dims: tuple = (2, 3, 4)
    trials: int = 100
    seed: int = 0
    f_keys: tuple = CATALOG_KEYS
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    format: str = "both"
    lambdas: tuple = COUNTEREXAMPLE_LAMBDAS
    workers: int = 1
    extra_tables: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.dims or any(not (2 <= d <= MAX_DIM) for d in self.dims):
            raise ConfigError(f"dims must lie in [2, {MAX_DIM}], got {list(self.dims)}")
        if not (1 <= self.trials <= MAX_TRIALS):
            raise ConfigError(f"trials must lie in [1, {MAX_TRIALS}], got {self.trials}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        for k in self.f_keys:
            try:
                from_key(k)
            except (KeyError, ValueError, FisherBoundError) as exc:
                raise ConfigError(f"unknown f_key {k!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _dynamics_tables(cfg: RunConfig) -> dict:
    regular = [k for k in cfg.f_keys if from_key(k).regular]
    if not regular:
        return {}
    f = from_key(regular[0])
    rows = []
    for d in cfg.dims:
        _, s = suite.trial_seeds(cfg.seed, [d], 1)[0]
        rho, h, k = suite.draw_triple(d, s)
        ev = dynamics.Evolution(rho, h, dynamics.time_grid(6.0, 25))
        for t, lhs, rhs, gap in dynamics.trajectory(ev, f, k):
            rows.append((d, s, f.label, float(t), lhs, rhs, gap))
    return {"trajectory.csv": _rows_to_csv(("dim", "seed", "f_label", "t", "lhs", "rhs", "gap"), rows)}


def _radial_tables(cfg: RunConfig, meta: dict) -> dict:
    fs = [from_key(k) for k in cfg.f_keys if from_key(k).regular]
    if not fs:
        return {}
    rows = []
    converged = {}
    for d in cfg.dims:
        _, s = suite.trial_seeds(cfg.seed, [d], 1)[0]
        pure, a, b = suite.draw_triple(d, s, pure=True)
        sweep = purelimit.radial_limit_sweep(purelimit.RadialFamily(pure), fs, a, b)
        converged[str(d)] = sweep.converged()
        for label, eps, q, resid, spread in sweep.rows:
            rows.append((d, s, label, eps, q, resid, spread))
    meta["radial_converged"] = converged
    return {"radial.csv": _rows_to_csv(("dim", "seed", "f_label", "epsilon", "q", "residual", "spread"),
                                       rows)}


def collect(cfg: RunConfig):
    """Reports, extra CSV tables and summary metadata for a validated config."""
    meta: dict = {}
    tables: dict = {}
    cmd = cfg.command
    if cmd == "axioms":
        reports = suite.axioms_reports(cfg.f_keys)
    elif cmd == "table1":
        reports = suite.table1_reports()
    elif cmd == "counterexample":
        reports = suite.counterexample_reports(cfg.lambdas, cfg.f_keys)
    elif cmd == "park-luo":
        reports = suite.park_luo_witness_reports(cfg.f_keys)
        reports.append(suite.park_luo_equality_report())
        reports += suite.run_trials(cmd, cfg.dims, cfg.trials, cfg.seed, cfg.f_keys, cfg.workers)
    else:
        reports = suite.run_trials(cmd, cfg.dims, cfg.trials, cfg.seed, cfg.f_keys, cfg.workers)
        if cmd == "dynamics":
            tables.update(_dynamics_tables(cfg))
        if cmd == "pure-limit":
            tables.update(_radial_tables(cfg, meta))
    return reports, tables, meta


def build_summary(cfg: RunConfig, reports, meta: dict, unmet: int) -> dict:
    summary = summarize(reports)
    summary.update({
        "command": cfg.command,
        "seed": cfg.seed,
        "dims": list(cfg.dims),
        "trials": cfg.trials,
        "f_keys": list(cfg.f_keys),
        "catalog_keys": list(CATALOG_KEYS),
        "unmet_expectations": unmet,
        "version": __version__,
    })
    summary.update(meta)
    return summary


def write_outputs(cfg: RunConfig, reports, tables: dict, summary: dict):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.format in ("csv", "both"):
        (out / "reports.csv").write_text(to_csv(reports), newline="")
        for name, text in tables.items():
            (out / name).write_text(text, newline="")
    if cfg.format in ("json", "both"):
        (out / "reports.jsonl").write_text(to_jsonl(reports))
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def run(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    reports, tables, meta = collect(cfg)
    unmet = sum(1 for r in reports if not suite.expectation_met(r))
    summary = build_summary(cfg, reports, meta, unmet)
    try:
        write_outputs(cfg, reports, tables, summary)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    c = summary["counts"]
    print(f"{cfg.command}: {summary['total']} reports, {c['holds']} holds, "
          f"{c['equality']} equality, {c['violated']} violated, {unmet} unmet -> {cfg.out_dir}",
          file=stream)
    return EXIT_OK if unmet == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _float_list(text: str):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _key_list(text: str):
    return tuple(v.strip() for v in text.split(",") if v.strip())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fisherbound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--dims", type=_int_list, default=(2, 3, 4), help="e.g. 2,3,4")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f", dest="f_keys", type=_key_list, default=CATALOG_KEYS,
                   help="comma separated catalog keys, e.g. sld,wy,wyd:0.25")
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    p.add_argument("--format", choices=FORMATS, default="both")
    p.add_argument("--lambda1", dest="lambdas", type=_float_list, default=COUNTEREXAMPLE_LAMBDAS,
                   help="counterexample eigenvalues in (1/2, 1)")
    p.add_argument("--workers", type=int, default=1)
    return p


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    out_dir = ns.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR
    return RunConfig(command=ns.command, dims=ns.dims, trials=ns.trials, seed=ns.seed,
                     f_keys=ns.f_keys, out_dir=Path(out_dir), format=ns.format,
                     lambdas=ns.lambdas, workers=ns.workers)


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = config_from_args(argv)
    try:
        return run(cfg)
    except InternalConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except DomainError as exc:
        # user-supplied parameters outside their domain, e.g. lambda1 >= 1
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
