"""Command line entry points.

Subcommands:
    run      execute an experiment config and write records plus a result table
    diag     print diagnostics for a saved chain record
    plot     export plot-ready CSV data from a saved chain record
    compare  merge result tables into a relative-efficiency summary

Exit codes: 0 success, 1 invalid input or config, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import diagnostics, harness


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sahmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--profile", default="smoke", help="iteration profile to use")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--workers", type=int, default=1, help="parallel chain workers")

    p_diag = sub.add_parser("diag", help="diagnostics for a saved record")
    p_diag.add_argument("record", help="path to a saved .npz chain record")

    p_plot = sub.add_parser("plot", help="export plot data from a saved record")
    p_plot.add_argument("record", help="path to a saved .npz chain record")
    p_plot.add_argument("kind", choices=harness.PLOT_KINDS)
    p_plot.add_argument("--out", default=None, help="output CSV path")
    p_plot.add_argument("--stride", type=int, default=1)

    p_cmp = sub.add_parser("compare", help="summarize result tables")
    p_cmp.add_argument("tables", nargs="+", help="result_table.json files")
    p_cmp.add_argument("--json", action="store_true", help="emit JSON instead of text")
    return parser


def _cmd_run(args) -> int:
    config = harness.parse_config(args.config)
    table = harness.run_experiment(
        config, profile=args.profile, out_dir=args.out, max_workers=args.workers
    )
    print(table.to_json())
    return 0


def _cmd_diag(args) -> int:
    record = harness.load_record(args.record)
    out = {
        "algorithm": record.algorithm,
        "target": record.target_name,
        "iterations": record.iterations,
        "acceptance": record.acceptance_rate(),
        "min_energy": diagnostics.min_energy(record),
        "n_divergent": record.n_divergent,
        "ess": diagnostics.ess_report(record).to_dict(),
    }
    if record.theta_final is not None:
        out["theta_final"] = [float(t) for t in record.theta_final]
    print(json.dumps(out, indent=2))
    return 0


def _cmd_plot(args) -> int:
    record = harness.load_record(args.record)
    out = args.out or str(Path(args.record).with_suffix("")) + f"_{args.kind}.csv"
    path = harness.emit_plot_data(record, args.kind, out, stride=args.stride)
    print(str(path))
    return 0


def _cmd_compare(args) -> int:
    tables = [
        harness.ResultTable.from_json(Path(p).read_text()) for p in args.tables
    ]
    for table, path in zip(tables, args.tables):
        wt = Path(path).parent / "wall_times.json"
        if wt.exists():
            table.wall_times.update(json.loads(wt.read_text()))
    summary = harness.compare_summary(tables)
    if args.json:
        print(json.dumps({k: v for k, v in summary.items() if k != "text"}, indent=2))
    else:
        print(summary["text"])
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "diag": _cmd_diag,
        "plot": _cmd_plot,
        "compare": _cmd_compare,
    }[args.command]
    try:
        return handler(args)
    except (harness.ConfigError, ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
