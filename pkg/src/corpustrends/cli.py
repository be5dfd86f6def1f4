"""Command-line front end.

Subcommands: ingest, extract, volcano, trends, compare, baseline, all.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 network error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baseline import BaselineError
from .chunker import ChunkerError
from .compare import CompareError
from .config import ConfigError, load_config
from .corpus import CorpusError
from .pipeline import (
    MissingArtifactError,
    PipelineError,
    cmd_all,
    cmd_baseline,
    cmd_compare,
    cmd_extract,
    cmd_ingest,
    cmd_trends,
    cmd_volcano,
)
from .trends import TrendsError
from .volcano import VolcanoError

STAGES = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "volcano": cmd_volcano,
    "trends": cmd_trends,
    "compare": cmd_compare,
    "baseline": cmd_baseline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpustrends",
        description="Extract domain-specific compound nouns from a time-stamped "
        "corpus and mine proximity-based technology trends.",
    )
    parser.add_argument("--config", type=Path, required=True, help="JSON run configuration")
    parser.add_argument("--workers", type=int, default=None, help="worker count (default from config, else 1)")
    parser.add_argument("--seed", type=int, default=None, help="subsampling seed (default from config, else 0)")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default from config)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", help="clean the corpus and build the document index")
    sub.add_parser("extract", help="extract compound-noun mentions (entity cap 100 per document)")
    sub.add_parser(
        "volcano",
        help="volcano filter: defaults p_max=0.05, fc_min=1 (>=2x enrichment), "
        "min_occ=3 occurrences",
    )
    sub.add_parser("trends", help="six-month proximity-kernel trend tables (top 5 terms per bucket)")
    sub.add_parser(
        "compare",
        help="embedding similarity, single-linkage clustering, 2D projection "
        "(subsample default 100 docs per listing)",
    )
    sub.add_parser("baseline", help="OpenAlex publication-count baseline series")
    sub.add_parser("all", help="full pipeline: ingest, extract, volcano, trends (+compare)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    if args.workers is not None:
        cfg.workers = args.workers
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    try:
        if args.command == "all":
            statuses = cmd_all(cfg)
            for stage, status in statuses.items():
                print(f"{stage}: {status}")
        else:
            status = STAGES[args.command](cfg)
            print(f"{args.command}: {status}")
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    except BaselineError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return 3
    except (
        MissingArtifactError,
        PipelineError,
        CorpusError,
        ChunkerError,
        VolcanoError,
        TrendsError,
        CompareError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
