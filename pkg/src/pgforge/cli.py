"""Command-line interface: normalization, cleanup, evaluation, corpus builds.

Exit codes: 0 success, 2 input parse error, 3 validation error, 4 I/O
error. Diagnostics go to stderr; machine-readable output goes to files or,
where a flag allows it, stdout. Repeated runs on identical inputs produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .cleanup import ProvenanceLog, clean_pairs
from .greek import CanonicalizationTable, NotGreekLetter, canonicalize
from .layout import (
    DegeneratePolygon,
    MalformedXml,
    MissingCoords,
    UnknownRegionClass,
    load_page,
)
from .layout_eval import MissingScores, evaluate_layout, write_class_table_csv
from .ocr_eval import (
    EmptyCorpus,
    EmptyReference,
    evaluate_corpus,
    load_pairs_from_dirs,
    load_pairs_from_manifest,
    score_pair,
    write_confusion_csv,
)
from .vert import (
    AmbiguityRecord,
    Lexicon,
    MalformedVert,
    build_document,
    corpus_stats,
    parse_vert_many,
    write_stats_csv,
    write_vert,
)

_PARSE_ERRORS = (
    MalformedXml,
    UnknownRegionClass,
    MissingCoords,
    MalformedVert,
    json.JSONDecodeError,
    tomllib.TOMLDecodeError,
    UnicodeDecodeError,
)
_VALIDATION_ERRORS = (
    EmptyCorpus,
    EmptyReference,
    MissingScores,
    DegeneratePolygon,
    NotGreekLetter,
)


class _InputError(Exception):
    """Input file could not be parsed (exit code 2)."""


def _load_input(loader, *args):
    try:
        return loader(*args)
    except _PARSE_ERRORS + (OSError,):
        raise
    except ValueError as exc:
        raise _InputError(str(exc)) from exc


_HARD_DEFAULTS: dict[str, dict] = {
    "normalize": {"table": None},
    "clean": {"latin_threshold": 0.5, "provenance": None},
    "eval-text": {
        "ref": None,
        "hyp": None,
        "manifest": None,
        "normalize": False,
        "table": None,
        "confusion_csv": None,
        "jobs": 1,
    },
    "eval-layout": {"iou": 0.5, "csv": None},
    "build-vert": {
        "latin_threshold": 0.5,
        "table": None,
        "no_normalize": False,
        "provenance": None,
        "ambiguities": None,
        "jobs": 1,
    },
    "stats": {"csv": None, "dates": None},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgforge",
        description="Post-OCR toolkit for polytonic Greek corpora.",
    )
    parser.add_argument("--version", action="version", version=f"pgforge {__version__}")
    parser.add_argument(
        "--config", metavar="FILE", default=None,
        help="TOML file with per-subcommand option tables; flags override it",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("normalize", help="canonicalize duplicate Greek encodings in text files")
    p.add_argument("input", metavar="IN", help="input file or directory")
    p.add_argument("output", metavar="OUT", help="output file or directory")
    p.add_argument("--table", metavar="FILE", default=None,
                   help="canonicalization table TSV (default: built-in, or $PG_FORGE_TABLE)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("clean", help="dehyphenate, drop empties, and filter Latin lines")
    p.add_argument("input", metavar="IN", help="input file or directory of line-oriented text")
    p.add_argument("output", metavar="OUT", help="output file or directory")
    p.add_argument("--latin-threshold", type=float, default=None, metavar="R",
                   help="drop lines whose Latin letter share exceeds R (default 0.5)")
    p.add_argument("--provenance", metavar="FILE", default=None,
                   help="provenance JSON path (default: OUT + .provenance.json)")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("eval-text", help="CER/WER and confusion statistics for OCR output")
    p.add_argument("--ref", metavar="DIR", default=None, help="reference text directory")
    p.add_argument("--hyp", metavar="DIR", default=None, help="hypothesis text directory")
    p.add_argument("--manifest", metavar="TSV", default=None,
                   help="two-column TSV of ref/hyp paths (alternative to --ref/--hyp)")
    p.add_argument("--normalize", action="store_true", default=None,
                   help="canonicalize both sides before scoring; report raw numbers too")
    p.add_argument("--table", metavar="FILE", default=None)
    p.add_argument("--report", metavar="OUT", required=True, help="report JSON path")
    p.add_argument("--confusion-csv", metavar="FILE", default=None,
                   help="confusion CSV path (default: report path with .confusion.csv)")
    p.add_argument("--jobs", type=int, default=None, metavar="N",
                   help="parallel workers for per-document alignment")
    p.set_defaults(func=cmd_eval_text)

    p = sub.add_parser("eval-layout", help="region/line detection and reading-order scores")
    p.add_argument("--gt", metavar="DIR", required=True, help="ground-truth pages (.xml or .json)")
    p.add_argument("--pred", metavar="DIR", required=True, help="predicted pages (.json mirror)")
    p.add_argument("--iou", type=float, default=None, metavar="R", help="IoU threshold (default 0.5)")
    p.add_argument("--report", metavar="OUT", required=True, help="report JSON path")
    p.add_argument("--csv", metavar="FILE", default=None,
                   help="per-class CSV path (default: report path with .csv)")
    p.set_defaults(func=cmd_eval_layout)

    p = sub.add_parser("build-vert", help="pages to annotated vertical corpus")
    p.add_argument("--pages", metavar="DIR", required=True, help="page files (.xml or .json)")
    p.add_argument("--lexicon", metavar="FILE", required=True, help="wordform TSV lexicon")
    p.add_argument("--doc-id", required=True, metavar="ID")
    p.add_argument("--out", metavar="FILE", required=True)
    p.add_argument("--latin-threshold", type=float, default=None, metavar="R")
    p.add_argument("--table", metavar="FILE", default=None)
    p.add_argument("--no-normalize", action="store_true", default=None,
                   help="skip canonicalization of line text")
    p.add_argument("--provenance", metavar="FILE", default=None,
                   help="cleanup provenance JSON (default: OUT + .provenance.json)")
    p.add_argument("--ambiguities", metavar="FILE", default=None,
                   help="write ambiguous lexicon hits to this JSON file")
    p.add_argument("--jobs", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_build_vert)

    p = sub.add_parser("stats", help="per-document and total word counts from vert files")
    p.add_argument("vert_files", nargs="+", metavar="VERT")
    p.add_argument("--csv", metavar="OUT", default=None, help="CSV path (default: stdout)")
    p.add_argument("--dates", metavar="TSV", default=None,
                   help="optional doc_id<TAB>date_label mapping for the CSV")
    p.set_defaults(func=cmd_stats)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset options from the TOML config, then from hard defaults."""
    config: dict = {}
    if args.config:
        with open(args.config, "rb") as fh:
            config = tomllib.load(fh)
    section = config.get(args.command, {})
    section = {key.replace("-", "_"): value for key, value in section.items()}
    for key, hard_default in _HARD_DEFAULTS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, section.get(key, hard_default))


def _resolve_table(path: str | None) -> CanonicalizationTable | None:
    if path is None:
        path = os.environ.get("PG_FORGE_TABLE") or None
    if path is None:
        return None  # library default
    return _load_input(CanonicalizationTable.load, path)


def _iter_io_pairs(input_path: Path, output_path: Path) -> list[tuple[Path, Path]]:
    if input_path.is_dir():
        output_path.mkdir(parents=True, exist_ok=True)
        return [
            (p, output_path / p.name)
            for p in sorted(input_path.iterdir())
            if p.is_file()
        ]
    return [(input_path, output_path)]


def cmd_normalize(args: argparse.Namespace) -> int:
    table = _resolve_table(args.table)
    for src, dst in _iter_io_pairs(Path(args.input), Path(args.output)):
        text = src.read_text(encoding="utf-8")
        dst.write_text(canonicalize(text, table), encoding="utf-8")
        print(f"normalized {src} -> {dst}", file=sys.stderr)
    return 0


def cmd_clean(args: argparse.Namespace) -> int:
    threshold = float(args.latin_threshold)
    for src, dst in _iter_io_pairs(Path(args.input), Path(args.output)):
        lines = src.read_text(encoding="utf-8").splitlines()
        log = ProvenanceLog()
        pairs = [(f"{src.name}:{i + 1}", line) for i, line in enumerate(lines)]
        cleaned = clean_pairs(pairs, latin_threshold=threshold, log=log)
        body = "".join(text + "\n" for _, text in cleaned)
        dst.write_text(body, encoding="utf-8")
        if args.provenance and not Path(args.input).is_dir():
            prov_path = Path(args.provenance)
        else:
            prov_path = Path(str(dst) + ".provenance.json")
        log.save(prov_path)
        print(f"cleaned {src} -> {dst} ({len(log.entries)} provenance entries)", file=sys.stderr)
    return 0


def cmd_eval_text(args: argparse.Namespace) -> int:
    if args.manifest:
        pairs, ids = _load_input(load_pairs_from_manifest, args.manifest)
    elif args.ref and args.hyp:
        pairs, ids = load_pairs_from_dirs(args.ref, args.hyp)
    else:
        raise _InputError("eval-text needs --ref and --hyp directories, or --manifest")
    table = _resolve_table(args.table)

    scores = None
    if args.jobs and args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            scores = list(pool.map(score_pair, *zip(*pairs)))
    report = evaluate_corpus(
        pairs,
        normalize_first=bool(args.normalize),
        table=table,
        doc_ids=ids,
        scores=scores,
    )

    report_path = Path(args.report)
    report_path.write_text(
        json.dumps(report.to_json_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    csv_path = Path(args.confusion_csv) if args.confusion_csv else report_path.with_suffix(
        ".confusion.csv"
    )
    write_confusion_csv(report.confusion, csv_path)
    mode = "normalized" if report.normalized else "raw"
    print(
        f"eval-text: {len(pairs)} documents, {report.n_ref_chars} reference chars; "
        f"cer={report.cer:.6f} wer={report.wer:.6f} ({mode}); raw cer={report.raw_cer:.6f}",
        file=sys.stderr,
    )
    return 0


def cmd_eval_layout(args: argparse.Namespace) -> int:
    iou = float(args.iou)
    gt_dir, pred_dir = Path(args.gt), Path(args.pred)
    gt_files = sorted(
        p for p in gt_dir.iterdir() if p.suffix.lower() in (".xml", ".json")
    )
    if not gt_files:
        raise _InputError(f"no ground-truth pages in {gt_dir}")
    page_pairs = []
    for gt_path in gt_files:
        pred_path = pred_dir / (gt_path.stem + ".json")
        if not pred_path.is_file():
            raise FileNotFoundError(f"no prediction for {gt_path.name}: {pred_path}")
        page_pairs.append((load_page(gt_path), load_page(pred_path)))

    report = evaluate_layout(page_pairs, iou_threshold=iou)
    report_path = Path(args.report)
    report_path.write_text(
        json.dumps(report.to_json_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    csv_path = Path(args.csv) if args.csv else report_path.with_suffix(".csv")
    write_class_table_csv(report, csv_path)
    print(
        f"eval-layout: {len(page_pairs)} pages; map50={report.map50:.4f} "
        f"line P/R={report.line_precision:.4f}/{report.line_recall:.4f} "
        f"reading order={report.reading_order:.4f}",
        file=sys.stderr,
    )
    return 0


def cmd_build_vert(args: argparse.Namespace) -> int:
    pages_dir = Path(args.pages)
    page_files = sorted(
        p for p in pages_dir.iterdir() if p.suffix.lower() in (".xml", ".json")
    )
    if not page_files:
        raise _InputError(f"no page files in {pages_dir}")
    table = _resolve_table(args.table)
    lexicon = _load_input(Lexicon.load, args.lexicon, table)

    if args.jobs and args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            pages = list(pool.map(load_page, page_files))
    else:
        pages = [load_page(p) for p in page_files]

    log = ProvenanceLog()
    ambiguities: list[AmbiguityRecord] = []
    doc = build_document(
        args.doc_id,
        pages,
        lexicon,
        latin_threshold=float(args.latin_threshold),
        table=table,
        normalize=not args.no_normalize,
        log=log,
        ambiguities=ambiguities,
    )
    out_path = Path(args.out)
    write_vert(doc, out_path)
    prov_path = Path(args.provenance) if args.provenance else Path(str(out_path) + ".provenance.json")
    log.save(prov_path)
    if args.ambiguities:
        Path(args.ambiguities).write_text(
            json.dumps(
                [
                    {"word_id": a.word_id, "wordform": a.wordform,
                     "candidates": [list(c) for c in a.candidates]}
                    for a in ambiguities
                ],
                ensure_ascii=False, sort_keys=True, indent=2,
            ) + "\n",
            encoding="utf-8",
        )
    n_tokens = sum(
        len(line.tokens) for page in doc.pages for line in page.lines
    )
    print(
        f"build-vert: {len(pages)} pages -> {n_tokens} tokens in {out_path}",
        file=sys.stderr,
    )
    return 0


def _load_dates(path: str | None) -> dict[str, str] | None:
    if not path:
        return None
    dates: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise _InputError(f"{path}:{lineno}: expected 2 tab-separated fields")
            dates[fields[0]] = fields[1]
    return dates


def cmd_stats(args: argparse.Namespace) -> int:
    docs = []
    for path in args.vert_files:
        docs.extend(_load_input(lambda p: parse_vert_many(Path(p).read_text(encoding="utf-8")), path))
    if not docs:
        raise _InputError("no documents found in the given vert files")
    stats = corpus_stats(docs)
    dates = _load_dates(args.dates)
    if args.csv:
        write_stats_csv(stats, args.csv, dates)
        print(f"stats: {len(docs)} documents, {stats.total} words -> {args.csv}", file=sys.stderr)
    else:
        dates = dates or {}
        sys.stdout.write("doc_id,date_label,word_count\n")
        for doc_id, count in stats.per_doc:
            sys.stdout.write(f"{doc_id},{dates.get(doc_id, '')},{count}\n")
        sys.stdout.write(f"TOTAL,,{stats.total}\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help/--version (0) or usage error (2)
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        _apply_config(args)
        return args.func(args)
    except _PARSE_ERRORS as exc:
        print(f"pgforge: input parse error: {exc}", file=sys.stderr)
        return 2
    except _InputError as exc:
        print(f"pgforge: input parse error: {exc}", file=sys.stderr)
        return 2
    except _VALIDATION_ERRORS as exc:
        print(f"pgforge: validation error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"pgforge: validation error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pgforge: i/o error: {exc}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
