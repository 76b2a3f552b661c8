"""Command-line entry point: ``authordrift {couples,retrofit,analyze,report,run,generate}``.

Stages communicate through files in ``--out-dir``:

    couples.jsonl       declared couples          (couples)
    retrofitted.jsonl   inferred couples          (retrofit)
    drift.jsonl/.csv    one report per couple     (analyze)
    aggregate.csv       grouped summary           (report)

Exit codes: 0 success, 2 unreadable input or bad usage, 3 calibration underflow.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from typing import List, Optional, Sequence

from authordrift.config import PipelineConfig, load_config
from authordrift.couples import read_couples, select_declared_couples, write_couples
from authordrift.drift import analyze_couples, read_reports_jsonl, write_reports_csv, write_reports_jsonl
from authordrift.errors import CalibrationUnderflow, IoFailure
from authordrift.ingest import load_index
from authordrift.report import aggregate, effective_group_by, write_aggregate_csv
from authordrift.retrofit import FeatureCache, calibrate_interval, retrofit_by_similarity, retrofit_simple

log = logging.getLogger("authordrift")

COUPLES_FILE = "couples.jsonl"
RETROFIT_FILE = "retrofitted.jsonl"
DRIFT_JSONL = "drift.jsonl"
DRIFT_CSV = "drift.csv"
AGGREGATE_CSV = "aggregate.csv"

EXIT_OK = 0
EXIT_IO = 2
EXIT_CALIBRATION = 3


def _emit(summary: dict) -> None:
    print(json.dumps(summary, indent=2, sort_keys=False))


def _require_inputs(cfg: PipelineConfig) -> None:
    for name in ("products", "relations"):
        if not getattr(cfg, name):
            raise IoFailure(f"no {name} dump given (use --{name} or the config file)")


def _load(cfg: PipelineConfig, loaded=None):
    """Build the index, or reuse one already built by ``run``."""
    if loaded is None:
        _require_inputs(cfg)
        index, pstats, rstats = load_index(cfg.products, cfg.relations, jobs=cfg.jobs)
        loaded = index, {
            "products": pstats.as_dict(),
            "relations": rstats.as_dict(),
            "index": index.summary(),
        }
    index, summary = loaded
    return index, dict(summary)


def _open_out(cfg: PipelineConfig, name: str):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return open(cfg.path(name), "w", encoding="utf-8", newline="")


def _read_couple_file(path: str) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            return list(read_couples(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def cmd_couples(cfg: PipelineConfig, loaded=None) -> int:
    index, summary = _load(cfg, loaded)
    exclusions: Counter = Counter()
    couples = select_declared_couples(index, exclusions)
    with _open_out(cfg, COUPLES_FILE) as fh:
        write_couples(couples, fh)
    summary.update(couples=len(couples), exclusions=dict(sorted(exclusions.items())))
    _emit(summary)
    return EXIT_OK


def cmd_retrofit(cfg: PipelineConfig, loaded=None) -> int:
    declared = _read_couple_file(cfg.path(COUPLES_FILE))
    index, summary = _load(cfg, loaded)
    rcfg = cfg.retrofit
    counts: Counter = Counter()
    simple = retrofit_simple(index, cfg.matcher, rcfg.window_days, declared=declared, counts=counts)
    similar = []
    if not cfg.simple_only:
        cache = FeatureCache()
        try:
            interval = calibrate_interval(declared, index, rcfg.k, rcfg, cache)
        except CalibrationUnderflow as exc:
            print(f"error: {exc}; rerun with --simple-only to skip similarity retrofitting",
                  file=sys.stderr)
            return EXIT_CALIBRATION
        similar = retrofit_by_similarity(
            index, interval, rcfg, exclude=list(declared) + simple, counts=counts, cache=cache
        )
        summary["interval"] = interval.as_dict()
    retrofitted = sorted(simple + similar, key=lambda c: (c.sort_key(), c.provenance.value))
    with _open_out(cfg, RETROFIT_FILE) as fh:
        write_couples(retrofitted, fh)
    summary["retrofit"] = {
        "candidates": counts["candidates"],
        "missing_date": counts["missing_date"],
        "retrofitted_simple": len(simple),
        "retrofitted_similarity": len(similar),
    }
    declared_pairs = {c.pair for c in declared}
    summary["retrofit"]["overlap_with_declared"] = sum(c.pair in declared_pairs for c in retrofitted)
    if cfg.truth:
        summary["evaluation"] = _evaluate(cfg.truth, simple, similar)
    _emit(summary)
    return EXIT_OK


def _evaluate(truth_path: str, simple: list, similar: list) -> dict:
    from authordrift.synth import precision_recall

    with open(truth_path, encoding="utf-8") as fh:
        truth = [tuple(p) for p in json.load(fh)["supplement_cites"]]

    def pairs(cs):
        return [(c.publication.value, c.supplement.value) for c in cs]

    out = {}
    for name, found in (("simple", pairs(simple)), ("similarity", pairs(similar)),
                        ("combined", pairs(simple) + pairs(similar))):
        precision, recall = precision_recall(found, truth)
        out[name] = {"precision": round(precision, 4), "recall": round(recall, 4)}
    return out


def cmd_analyze(cfg: PipelineConfig, loaded=None) -> int:
    couples = _read_couple_file(cfg.path(COUPLES_FILE))
    if os.path.exists(cfg.path(RETROFIT_FILE)):
        couples += _read_couple_file(cfg.path(RETROFIT_FILE))
    index, summary = _load(cfg, loaded)
    skips: Counter = Counter()
    reports = analyze_couples(couples, index, cfg.matcher, skips)
    with _open_out(cfg, DRIFT_JSONL) as fh:
        write_reports_jsonl(reports, fh)
    with _open_out(cfg, DRIFT_CSV) as fh:
        write_reports_csv(reports, fh)
    summary.update(couples=len(couples), reports=len(reports), skipped=dict(sorted(skips.items())))
    _emit(summary)
    return EXIT_OK


def cmd_report(cfg: PipelineConfig) -> int:
    path = cfg.path(DRIFT_JSONL)
    try:
        with open(path, encoding="utf-8") as fh:
            reports = read_reports_jsonl(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    group_by = effective_group_by(reports, cfg.group_by)
    rows = aggregate(reports, group_by)
    with _open_out(cfg, AGGREGATE_CSV) as fh:
        write_aggregate_csv(rows, group_by, fh)
    _emit({"reports": len(reports), "groups": len(rows), "group_by": list(group_by)})
    return EXIT_OK


def cmd_run(cfg: PipelineConfig) -> int:
    loaded = _load(cfg)
    for step in (cmd_couples, cmd_retrofit, cmd_analyze):
        code = step(cfg, loaded)
        if code != EXIT_OK:
            return code
    return cmd_report(cfg)


def cmd_generate(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    from authordrift.synth import generate_corpus, scaled_corpus, write_corpus

    seed = args.seed if args.seed is not None else 0
    if args.products_count is not None:
        corpus = scaled_corpus(seed, args.products_count, args.relations_count)
    else:
        corpus = generate_corpus(seed)
    paths = write_corpus(corpus, cfg.out_dir, compress=args.gzip)
    _emit({
        "seed": seed,
        "products": len(corpus.products),
        "relations": len(corpus.relations),
        "declared": len(corpus.declared),
        "supplement_cites": len(corpus.supplement_cites),
        "files": paths,
    })
    return EXIT_OK


COMMANDS = {
    "couples": cmd_couples,
    "retrofit": cmd_retrofit,
    "analyze": cmd_analyze,
    "report": cmd_report,
    "run": cmd_run,
}


def _weights(text: str):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated weights")
    return tuple(parts)


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    g = parser.add_argument_group("global options")
    # On subcommands, unset flags must not clobber values given before the verb.
    d = {"default": argparse.SUPPRESS} if suppress else {}
    flag = {"action": "store_true", **({"default": argparse.SUPPRESS} if suppress else {"default": None})}
    g.add_argument("--config", help="key-value config file", **d)
    g.add_argument("--jobs", type=int, help="parallel parser processes", **d)
    g.add_argument("--exact-names", help="match authors by exact normalized name", **flag)
    g.add_argument("--simple-only", help="skip similarity retrofitting", **flag)
    g.add_argument("--seed", type=int, help="seed for synthetic data tooling", **d)
    g.add_argument("--products", help="products dump (JSON Lines, optionally gzipped)", **d)
    g.add_argument("--relations", help="relations dump (JSON Lines, optionally gzipped)", **d)
    g.add_argument("--out-dir", help="directory for stage outputs", **d)
    g.add_argument("--truth", help="ground-truth file for retrofit evaluation", **d)
    g.add_argument("--window-days", type=int, **d)
    g.add_argument("--weights", type=_weights, help="title,authors,date weights", **d)
    g.add_argument("--tau-days", type=float, **d)
    g.add_argument("--k", type=float, help="interval half-width in standard deviations", **d)
    g.add_argument("--threshold", type=float, help="author match distance threshold", **d)
    g.add_argument("--group-by", help="comma-separated: year,supplement_kind,subject,provenance", **d)
    g.add_argument("-v", "--verbose", **flag)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="authordrift", description=__doc__.splitlines()[0])
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "couples": "select declared publication/supplement couples",
        "retrofit": "infer couples from citation edges",
        "analyze": "compute per-couple drift reports",
        "report": "aggregate drift reports by group",
        "run": "run all four stages in order",
    }
    for name, text in helps.items():
        _add_global_flags(sub.add_parser(name, help=text), suppress=True)
    gen = sub.add_parser("generate", help="write a seeded synthetic corpus")
    _add_global_flags(gen, suppress=True)
    gen.add_argument("--products-count", type=int)
    gen.add_argument("--relations-count", type=int, default=150_000)
    gen.add_argument("--gzip", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config)
    group_by = None
    if args.group_by:
        group_by = tuple(x.strip() for x in args.group_by.split(",") if x.strip())
    return cfg.override(
        products=args.products,
        relations=args.relations,
        out_dir=args.out_dir,
        truth=args.truth,
        window_days=args.window_days,
        weights=args.weights,
        tau_days=args.tau_days,
        k=args.k,
        threshold=args.threshold,
        exact_names=args.exact_names,
        simple_only=args.simple_only,
        jobs=args.jobs,
        group_by=group_by,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        if args.command == "generate":
            return cmd_generate(cfg, args)
        return COMMANDS[args.command](cfg)
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    _entry()
