"""Command-line front end.

    scootsafe analyze --input tracks.csv [--config run.json] [--set key=value ...] --out results/
    scootsafe generate --spec corpus.json --out tracks.csv [--seed N]
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import RunConfig
from .csvio import load_corpus, write_outputs, write_trajectories_csv
from .errors import EmptyInputError, InfeasibleSpecError, IngestError
from .pipeline import CaseResult, evaluate_case
from .report import AggregateReport, summarize
from .scenario import generate_raw, specs_from_document
from .trajectory import Dataset

log = logging.getLogger("scootsafe")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BAD_INPUT = 3
EXIT_EMPTY = 4
EXIT_OUTPUT = 5
EXIT_BAD_SPEC = 6


def summarize_by_dataset(config: RunConfig, results: Sequence[CaseResult]) -> dict[str, AggregateReport | None]:
    metrics = [r.metrics for r in results]
    out: dict[str, AggregateReport | None] = {}
    for key, members in [("all", metrics)] + [(d.value, [m for m in metrics if m.dataset is d]) for d in Dataset]:
        out[key] = summarize(members, config.mttc_bin_width, config.mttc_bins) if members else None
    return out


def run(config: RunConfig, input_path: str | Path, output_dir: str | Path) -> int:
    """Analyse every case in ``input_path`` and write the reports to ``output_dir``."""
    try:
        corpus = load_corpus(input_path, config)
    except EmptyInputError as exc:
        log.error("%s", exc)
        return EXIT_EMPTY
    except (IngestError, OSError, UnicodeDecodeError) as exc:
        log.error("cannot read %s: %s", input_path, exc)
        return EXIT_BAD_INPUT

    for rej in corpus.rejected:
        log.warning("rejected %s", rej.reason)
    if corpus.bad_rows:
        log.warning("%d malformed row(s) skipped, listed in report.json", len(corpus.bad_rows))

    results = [evaluate_case(case, config) for case in corpus.cases]
    summaries = summarize_by_dataset(config, results)
    try:
        write_outputs(output_dir, config, results, corpus, summaries)
    except OSError as exc:
        log.error("cannot write outputs to %s: %s", output_dir, exc)
        return EXIT_OUTPUT

    if not results:
        log.error("empty corpus: no case could be analysed")
        return EXIT_EMPTY
    rep = summaries["all"]
    print(
        f"{rep.n_cases} cases analysed, {len(corpus.rejected)} rejected; "
        f"potential conflicts {100 * rep.conflict_share:.1f}% ({rep.n_conflict}); "
        f"outputs in {output_dir}"
    )
    return EXIT_OK


def generate(spec_path: str | Path, out_path: str | Path, seed: int | None = None) -> int:
    try:
        with open(spec_path, encoding="utf-8") as fh:
            doc = json.load(fh)
        triples = specs_from_document(doc, seed)
    except (OSError, json.JSONDecodeError) as exc:
        log.error("cannot read generation spec %s: %s", spec_path, exc)
        return EXIT_BAD_INPUT
    except (InfeasibleSpecError, ValueError) as exc:
        log.error("invalid generation spec: %s", exc)
        return EXIT_BAD_SPEC
    try:
        n = write_trajectories_csv(out_path, ((cid, ds, *generate_raw(spec)) for cid, ds, spec in triples))
    except OSError as exc:
        log.error("cannot write %s: %s", out_path, exc)
        return EXIT_OUTPUT
    print(f"wrote {n} cases to {out_path}")
    return EXIT_OK


def _parse_overrides(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"override must look like key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scootsafe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute safety metrics and reports for a trajectory CSV")
    a.add_argument("--input", required=True, help="trajectory CSV")
    a.add_argument("--config", help="JSON run configuration")
    a.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one configuration value")
    a.add_argument("--out", required=True, help="output directory")

    g = sub.add_parser("generate", help="write a synthetic encounter corpus as trajectory CSV")
    g.add_argument("--spec", required=True, help="JSON corpus description")
    g.add_argument("--out", required=True, help="output CSV path")
    g.add_argument("--seed", type=int, help="override the corpus seed")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    if args.command == "generate":
        return generate(args.spec, args.out, args.seed)

    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        config = config.with_overrides(_parse_overrides(args.set))
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        log.error("bad configuration: %s", exc)
        return EXIT_BAD_INPUT
    return run(config, args.input, args.out)


if __name__ == "__main__":
    sys.exit(main())
