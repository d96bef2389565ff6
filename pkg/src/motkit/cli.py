"""Command-line interface: track a sequence, evaluate results, compare runs.

Exit codes: 0 success, 1 load/parse errors (the message names the failing
file and line), 2 configuration errors, 3 empty ground truth.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import metrics, motio, tracker
from .errors import ConfigError, EmptyGroundTruthError, MotError

EXIT_OK = 0
EXIT_LOAD = 1
EXIT_CONFIG = 2
EXIT_EMPTY_GT = 3

METRIC_COLUMNS = ("MOTA", "MOTP", "IDF1", "IDs", "ML", "MT", "FP", "FN")
# Metrics where larger values win; the rest count errors, so smaller wins.
HIGHER_BETTER = frozenset({"MOTA", "MOTP", "IDF1", "MT"})


def _format_cells(summary: metrics.MetricsSummary) -> dict[str, str]:
    return {
        "MOTA": f"{summary.mota * 100:.2f}",
        "MOTP": f"{summary.motp * 100:.2f}",
        "IDF1": f"{summary.idf1 * 100:.2f}",
        "IDs": str(summary.ids),
        "ML": f"{summary.ml_ratio * 100:.2f}%",
        "MT": f"{summary.mt_ratio * 100:.2f}%",
        "FP": str(summary.fp),
        "FN": str(summary.fn),
    }


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    print("  ".join(header[i].ljust(widths[i]) for i in range(len(header))).rstrip())
    for row in rows:
        print("  ".join(row[i].ljust(widths[i]) for i in range(len(row))).rstrip())


def cmd_track(args) -> int:
    try:
        config = (
            motio.read_config(args.config) if args.config else motio.RunConfig()
        )
    except FileNotFoundError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        bundle, rejected = motio.load_bundle(
            args.detections,
            embeddings_path=args.embeddings,
            seqinfo_path=args.seqinfo,
            name=args.name,
        )
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except MotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD

    for row in rejected:
        print(
            f"warning: {args.detections}:{row.line_no}: skipped row ({row.reason})",
            file=sys.stderr,
        )

    outputs = tracker.run_sequence(bundle, config.tracker, config.noise)
    n_rows = sum(len(o.records) for o in outputs)
    track_ids = {tid for o in outputs for tid, _ in o.records}
    if args.output:
        motio.write_results(args.output, outputs)
        destination = f" -> {args.output}"
    else:
        destination = " (no --output, results not written)"
    print(
        f"{bundle.name}: {bundle.frame_count} frames, {len(track_ids)} tracks, "
        f"{n_rows} output rows{destination}"
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    name = args.name or Path(args.results).stem
    try:
        gt_records = motio.read_ground_truth(args.gt)
        hyp = motio.read_results(args.results)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except MotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD

    scored_gt, cleaned_hyp = metrics.filter_mot16(gt_records, hyp, args.iou_threshold)
    try:
        summary = metrics.evaluate_sequence(scored_gt, cleaned_hyp, args.iou_threshold)
    except EmptyGroundTruthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_GT

    cells = _format_cells(summary)
    _print_table(
        ["Model", *METRIC_COLUMNS],
        [[name, *(cells[m] for m in METRIC_COLUMNS)]],
    )
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["Model", *METRIC_COLUMNS])
            writer.writerow([name, *(cells[m] for m in METRIC_COLUMNS)])
    return EXIT_OK


def _parse_metric(cell: str) -> float:
    return float(cell.rstrip("%"))


def cmd_report(args) -> int:
    sources: dict[str, dict[str, str]] = {}
    for spec in args.row:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            print(f"error: --row expects NAME=CSVPATH, got {spec!r}", file=sys.stderr)
            return EXIT_LOAD
        if name in sources:
            print(f"error: duplicate row name {name!r}", file=sys.stderr)
            return EXIT_LOAD
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                rows = list(csv.reader(handle))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_LOAD
        if len(rows) < 2 or rows[0][:1] != ["Model"]:
            print(f"error: {path}: not a metrics row file", file=sys.stderr)
            return EXIT_LOAD
        header, values = rows[0], rows[1]
        if len(values) != len(header):
            print(f"error: {path}: ragged metrics row", file=sys.stderr)
            return EXIT_LOAD
        cells = dict(zip(header[1:], values[1:]))
        missing = [m for m in METRIC_COLUMNS if m not in cells]
        if missing:
            print(f"error: {path}: missing columns {missing}", file=sys.stderr)
            return EXIT_LOAD
        sources[name] = cells

    names = list(sources)
    table_rows = []
    for metric in METRIC_COLUMNS:
        try:
            numeric = {n: _parse_metric(sources[n][metric]) for n in names}
        except ValueError:
            print(f"error: non-numeric {metric} cell", file=sys.stderr)
            return EXIT_LOAD
        best = (
            max(numeric.values()) if metric in HIGHER_BETTER else min(numeric.values())
        )
        row = [metric]
        for n in names:
            marker = "*" if numeric[n] == best else ""
            row.append(sources[n][metric] + marker)
        table_rows.append(row)
    _print_table(["Metric", *names], table_rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motkit",
        description="Multi-object tracking over detection files, plus "
        "MOTChallenge-style evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track_p = sub.add_parser("track", help="run the tracker over a detection file")
    track_p.add_argument("--detections", required=True, help="det.txt-style input")
    track_p.add_argument("--embeddings", help="binary embedding sidecar")
    track_p.add_argument("--config", help="flat key = value config file")
    track_p.add_argument("--output", help="where to write the result file")
    track_p.add_argument("--seqinfo", help="seqinfo.ini with sequence metadata")
    track_p.add_argument("--name", help="sequence name for console output")
    track_p.set_defaults(func=cmd_track)

    eval_p = sub.add_parser("evaluate", help="score a result file against ground truth")
    eval_p.add_argument("--gt", required=True, help="ground-truth annotation file")
    eval_p.add_argument("--results", required=True, help="tracker result file")
    eval_p.add_argument("--iou-threshold", type=float, default=0.5)
    eval_p.add_argument("--csv", help="also write the row as CSV")
    eval_p.add_argument("--name", help="model name for the row (default: file stem)")
    eval_p.set_defaults(func=cmd_evaluate)

    report_p = sub.add_parser("report", help="combine metric rows into one table")
    report_p.add_argument(
        "--row",
        action="append",
        required=True,
        metavar="NAME=CSVPATH",
        help="named metrics row produced by evaluate --csv (repeatable)",
    )
    report_p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
