"""Command-line front end.

Subcommands: localize, pagerank, opinions, affine, verify-expectation,
plot-data.  Every run-style subcommand accepts --config FILE with flat
key=value pairs; explicit flags override file values.  On failure the
process exits nonzero after printing the error class name.
"""

from __future__ import annotations

import argparse
import sys

from .errors import GossipSimError
from .harness import (
    ScenarioConfig,
    emit_plot_data,
    parse_config_file,
    read_run_log,
    run_scenario,
    verify_expectation_cmd,
)


def _common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--thin", type=int, help="log every THIN steps")
    parser.add_argument("--replications", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossipsim",
        description="simulate randomized affine network dynamics and their time-averages",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("localize", help="relative localization from edge measurements")
    p.add_argument("--graph", help="oriented edge-list file")
    p.add_argument("--mode", choices=("sync", "gossip", "both"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--state", help="true-state CSV (one column); default: seeded draw")
    _common_flags(p)

    p = sub.add_parser("pagerank", help="PageRank by power iteration or edge gossip")
    p.add_argument("--graph", help="directed edge-list file")
    p.add_argument("--mode", choices=("sync", "gossip", "both"))
    p.add_argument("--m", type=float)
    p.add_argument("--x0", help="initial stochastic vector CSV")
    p.add_argument("--dump-every", type=int, dest="dump_every")
    _common_flags(p)

    p = sub.add_parser("opinions", help="Friedkin-Johnsen opinions, sync or gossip")
    p.add_argument("--weights", help="influence matrix CSV")
    p.add_argument("--prejudices", help="prejudice vector CSV")
    p.add_argument("--mode", choices=("sync", "gossip", "both"))
    _common_flags(p)

    p = sub.add_parser("affine", help="generic synchronous affine iteration")
    p.add_argument("--matrix", help="state matrix CSV")
    p.add_argument("--input", dest="affine_input", help="input vector CSV")
    p.add_argument("--x0", help="initial state CSV")
    _common_flags(p)

    p = sub.add_parser(
        "verify-expectation",
        help="check the kernel-mean identity exactly and by Monte Carlo",
    )
    p.add_argument("--application", choices=("localize", "pagerank", "opinions"))
    p.add_argument("--graph")
    p.add_argument("--weights")
    p.add_argument("--prejudices")
    p.add_argument("--state")
    p.add_argument("--gamma", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--samples", type=int)
    _common_flags(p)

    p = sub.add_parser("plot-data", help="emit plot-ready CSV from a run directory")
    p.add_argument("--run", required=True, help="directory written by a previous run")
    p.add_argument("--kind", required=True, choices=("trajectory", "error-curve"))
    p.add_argument("--column", help="log column to export")
    p.add_argument("--out", required=True, help="output CSV file")

    return parser


_APP_BY_COMMAND = {
    "localize": "localize",
    "pagerank": "pagerank",
    "opinions": "opinions",
    "affine": "generic-affine",
}


def _merge_config(args: argparse.Namespace, application: str | None) -> ScenarioConfig:
    mapping: dict = {}
    if getattr(args, "config", None):
        mapping.update(parse_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        mapping[key] = value
    if application is not None:
        mapping["application"] = application
    if application == "generic-affine":
        mapping["mode"] = "sync"
    return ScenarioConfig.from_mapping(mapping)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot-data":
            log = read_run_log(args.run)
            out = emit_plot_data(log, args.kind, args.out, column=args.column)
            print(f"wrote {out}")
            return 0
        if args.command == "verify-expectation":
            cfg = _merge_config(args, getattr(args, "application", None) or None)
            report = verify_expectation_cmd(cfg)
            for line in report.lines():
                print(line)
            return 0 if report.exact.passed else 1
        cfg = _merge_config(args, _APP_BY_COMMAND[args.command])
        log = run_scenario(cfg)
        last = int(log.steps[-1])
        print(f"{cfg.application}/{cfg.mode}: {log.n_rows} log rows, final step {last}")
        for name, col in sorted(log.columns.items()):
            if col.ndim == 1 and "err" in name:
                print(f"final {name} = {col[-1]:.6e}")
        if cfg.out:
            print(f"outputs under {cfg.out}")
        return 0
    except GossipSimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
