"""Command-line entry point.

Subcommands:
  gen-targets   write the training + arch target sets as JSON
  simulate      run simulated participants and write the trial CSV
  analyze       first-trial exclusion + descriptive stats + Mann-Whitney tests
  serve         run the frame service (HTTP + WebSocket frame protocol)
"""

from __future__ import annotations

import argparse
import json
import sys

from . import protocol
from .config import load_config
from .session import (TargetGroup, drop_first_trials, read_records_csv,
                      write_records_csv)
from .simulate import simulate_study, study_targets
from .stats import analyze, report_csv, report_text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collimator")
    p.add_argument("--config", help="JSON config file (or $COLLIMATOR_CONFIG)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-targets", help="write target set JSON files")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="output JSON path")
    g.add_argument("--group", choices=[t.value for t in TargetGroup] + ["all"],
                   default="all")

    s = sub.add_parser("simulate", help="run simulated sessions to CSV")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--participants", type=int, default=1)
    s.add_argument("--include-training", action="store_true")

    a = sub.add_parser("analyze", help="analyze a trial CSV")
    a.add_argument("csv", help="input trial CSV")
    a.add_argument("--out", help="write report files <out>.txt and <out>.csv")
    a.add_argument("--by-anatomy", action="store_true",
                   help="also split cells by mandible/maxilla")
    a.add_argument("--keep-first", action="store_true",
                   help="skip the first-trial-per-block exclusion")

    v = sub.add_parser("serve", help="run the frame service")
    v.add_argument("--port", type=int, default=8421)
    v.add_argument("--host", default="127.0.0.1")
    return p


def cmd_gen_targets(args, config) -> int:
    # the training set is seeded from the CLI; arch geometry from config
    from .session import arch_targets, training_targets
    all_sets = {
        TargetGroup.TRAINING.value: training_targets(
            args.seed, config.training_count, config.training_radius_mm),
        TargetGroup.MANDIBLE.value: arch_targets(TargetGroup.MANDIBLE, config.arch),
        TargetGroup.MAXILLA.value: arch_targets(TargetGroup.MAXILLA, config.arch),
    }
    if args.group != "all":
        all_sets = {args.group: all_sets[args.group]}
    out = {name: [protocol.target_to_obj(t) for t in ts] for name, ts in all_sets.items()}
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(out, f, indent=2)
        f.write("\n")
    total = sum(len(v) for v in out.values())
    print(f"wrote {total} targets to {args.out}")
    return 0


def cmd_simulate(args, config) -> int:
    records = simulate_study(args.participants, config, args.seed,
                             include_training=args.include_training)
    write_records_csv(args.out, records, simulated=True)
    print(f"wrote {len(records)} trial records to {args.out}")
    return 0


def cmd_analyze(args, config) -> int:
    records = read_records_csv(args.csv)
    if not records:
        print("error: input CSV contains no trial records", file=sys.stderr)
        return 1
    if not args.keep_first:
        records = drop_first_trials(records)
    grouping = "widget+anatomy" if args.by_anatomy else "widget"
    report = analyze(records, grouping=grouping)
    text = report_text(report)
    if args.out:
        with open(args.out + ".txt", "w", encoding="utf-8") as f:
            f.write(text)
        with open(args.out + ".csv", "w", encoding="utf-8") as f:
            f.write(report_csv(report))
        print(f"analyzed {len(records)} records; report at {args.out}.txt / {args.out}.csv")
    else:
        print(text, end="")
    return 0


def cmd_serve(args, config) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        handler = {
            "gen-targets": cmd_gen_targets,
            "simulate": cmd_simulate,
            "analyze": cmd_analyze,
            "serve": cmd_serve,
        }[args.command]
        return handler(args, config)
    except KeyboardInterrupt:
        return 130
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
