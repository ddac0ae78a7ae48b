"""Command-line interface: staged pipeline plus the annotation service.

Subcommands:
  ingest          reference export -> canonical corpus + reports
  extract         corpus -> candidate terms + full statistics
  rank            statistics -> ranked term list
  pipeline        ingest + extract + rank in one run
  sample          ranked list -> annotation manifest
  kappa           rater files -> Fleiss kappa report
  pak             ranking + gold -> precision@k curve
  export-lexicon  rater files (+ verification) -> gold + 4-part lexicon
  serve           HTTP service backing the annotation UI

Any flag can be preset in a key=value config file (--config); explicit
flags win. Exit codes: 0 ok, 1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import agreement, annotations, corpus, extraction, ranking, tagging
from .errors import TermlexError


class _StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


def _load_config(path) -> dict[str, str]:
    config: dict[str, str] = {}
    if path is None:
        return config
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TermlexError(f"{path}: line {line_no}: expected key=value")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


class _Options:
    """Flag-over-config-over-default resolution."""

    def __init__(self, args):
        self.args = args
        self.config = _load_config(getattr(args, "config", None))

    def get(self, name, default=None, cast=str):
        value = getattr(self.args, name, None)
        if value is None and name in self.config:
            raw = self.config[name]
            if cast is bool:
                value = raw.lower() in ("1", "true", "yes")
            else:
                value = cast(raw)
        return default if value is None else value

    def require(self, name, cast=str):
        value = self.get(name, cast=cast)
        if value is None:
            raise TermlexError(f"missing required option --{name.replace('_', '-')}")
        return value


def _parse_column_map(text: str | None) -> dict[str, str] | None:
    if not text:
        return None
    mapping = {}
    for piece in text.split(","):
        if "=" not in piece:
            raise TermlexError(f"bad column map entry {piece!r} (expected field=Column)")
        fld, column = piece.split("=", 1)
        fld = fld.strip()
        if fld not in corpus.DEFAULT_COLUMN_ALIASES:
            raise TermlexError(
                f"unknown column-map field {fld!r} "
                f"(expected one of {', '.join(corpus.DEFAULT_COLUMN_ALIASES)})"
            )
        mapping[fld] = column.strip()
    return mapping


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def _write_report(report, out_dir: Path, name: str) -> None:
    _write_json(report.to_dict(), out_dir / f"{name}.json")
    (out_dir / f"{name}.txt").write_text(report.text(), encoding="utf-8")


def _stage_ingest(opts: _Options, out_dir: Path) -> tuple[corpus.Corpus, dict]:
    input_path = opts.require("input")
    fmt = opts.get("format", default="csv")
    column_map = _parse_column_map(opts.get("column_map"))
    loaded, ingest_report = corpus.ingest_references(input_path, fmt=fmt, column_map=column_map)
    deduped, dedup_report = corpus.deduplicate(loaded)
    english, filter_report = corpus.filter_english(deduped)
    corpus.save_corpus(english, out_dir / "corpus.csv")
    _write_report(ingest_report, out_dir, "ingest_report")
    _write_report(dedup_report, out_dir, "dedup_report")
    _write_report(filter_report, out_dir, "filter_report")
    counts = {
        "rows": ingest_report.total_rows,
        "ingested": ingest_report.kept,
        "after_dedup": len(deduped),
        "after_language_filter": len(english),
    }
    return english, counts


def _stage_extract(opts: _Options, out_dir: Path, documents=None) -> tuple[extraction.CorpusStats, dict]:
    pre_tagged = opts.get("pre_tagged")
    if pre_tagged is not None:
        tagged = tagging.load_tagged(pre_tagged)
    else:
        if documents is None:
            corpus_path = opts.require("corpus")
            documents = corpus.load_corpus(corpus_path).documents
        overrides = None
        lexicon_path = opts.get("lexicon")
        if lexicon_path is not None:
            overrides = tagging.load_lexicon(lexicon_path)
        tagged = [tagging.tag_title(d.doc_id, d.title, overrides) for d in documents]

    patterns_path = opts.get("patterns")
    patterns = (
        extraction.load_patterns(patterns_path)
        if patterns_path is not None
        else extraction.DEFAULT_PATTERNS
    )
    min_freq = opts.get("min_freq", default=1, cast=int)
    workers = opts.get("workers", default=1, cast=int)
    stats = extraction.build_candidate_set(
        tagged, patterns=patterns, min_freq=min_freq, workers=workers
    )
    extraction.save_candidates(stats, out_dir / "candidates.csv")
    extraction.save_stats(stats, out_dir / "stats.json")
    if opts.get("save_tagged", default=False, cast=bool):
        tagging.save_tagged(tagged, out_dir / "tagged.tsv")
    counts = {"titles": len(tagged), "candidates": len(stats.terms)}
    return stats, counts


def _stage_rank(opts: _Options, out_dir: Path, stats=None) -> tuple[list, dict]:
    if stats is None:
        stats = extraction.load_stats(opts.require("stats"))
    epsilon = opts.get("epsilon", default=ranking.DEFAULT_EPSILON, cast=float)
    tie_break = not opts.get("no_tie_break", default=False, cast=bool)
    ranked = ranking.rank_terms(stats, epsilon=epsilon, tie_break=tie_break)
    ranking.export_ranked(ranked, out_dir / "ranked.csv")
    ranking.export_ranked(ranked, out_dir / "ranked_extended.csv", extended=True)
    return ranked, {"ranked_terms": len(ranked)}


def _out_dir(opts: _Options) -> Path:
    out = Path(opts.get("out_dir", default="."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    opts = _Options(args)
    out_dir = _out_dir(opts)
    _, counts = _stage_ingest(opts, out_dir)
    print(
        "ingest: {rows} rows -> {ingested} documents, "
        "{after_dedup} after dedup, {after_language_filter} after language filter".format(**counts)
    )
    print(f"wrote {out_dir / 'corpus.csv'}")
    return 0


def cmd_extract(args) -> int:
    opts = _Options(args)
    out_dir = _out_dir(opts)
    _, counts = _stage_extract(opts, out_dir)
    print("extract: {titles} titles -> {candidates} candidate terms".format(**counts))
    print(f"wrote {out_dir / 'candidates.csv'} and {out_dir / 'stats.json'}")
    return 0


def cmd_rank(args) -> int:
    opts = _Options(args)
    out_dir = _out_dir(opts)
    _, counts = _stage_rank(opts, out_dir)
    print("rank: {ranked_terms} terms ranked".format(**counts))
    print(f"wrote {out_dir / 'ranked.csv'} and {out_dir / 'ranked_extended.csv'}")
    return 0


def cmd_pipeline(args) -> int:
    opts = _Options(args)
    out_dir = _out_dir(opts)
    report: dict = {"stages": {}}
    started = time.perf_counter()

    def run(stage, fn, *fn_args):
        stage_start = time.perf_counter()
        try:
            result, counts = fn(*fn_args)
        except Exception as exc:
            raise _StageFailure(stage, exc) from exc
        report["stages"][stage] = dict(counts)
        report["stages"][stage]["seconds"] = round(time.perf_counter() - stage_start, 3)
        return result

    english = run("ingest", _stage_ingest, opts, out_dir)
    stats = run("extract", _stage_extract, opts, out_dir, english.documents)
    run("rank", _stage_rank, opts, out_dir, stats)

    report["wall_time_s"] = round(time.perf_counter() - started, 3)
    _write_json(report, out_dir / "run_report.json")
    for stage, counts in report["stages"].items():
        summary = ", ".join(f"{k}={v}" for k, v in counts.items())
        print(f"{stage}: {summary}")
    print(f"pipeline done in {report['wall_time_s']}s; artifacts in {out_dir}")
    return 0


def cmd_sample(args) -> int:
    opts = _Options(args)
    ranked = ranking.load_ranked(opts.require("ranking"))
    manifest = annotations.sample_terms(
        ranked,
        size=opts.require("size", cast=int),
        seed=opts.require("seed", cast=int),
        sample_id=opts.get("sample_id"),
    )
    out = opts.get("out", default="manifest.json")
    annotations.save_manifest(manifest, out)
    print(f"sampled {manifest.size} terms (seed={manifest.seed}) -> {out}")
    return 0


def _load_rater_records(opts: _Options, schema: str) -> list:
    labels = getattr(opts.args, "labels", None)
    labels_dir = opts.get("labels_dir")
    paths: list[Path] = []
    if labels:
        paths = [Path(p) for p in labels]
    elif labels_dir is not None:
        paths = sorted(Path(labels_dir).glob("*.csv"))
    if not paths:
        raise TermlexError("no annotation files: pass --labels or --labels-dir")
    records = []
    for path in paths:
        records.extend(annotations.parse_annotations(path, schema))
    return records


def cmd_kappa(args) -> int:
    opts = _Options(args)
    schema = opts.get("schema", default="V2")
    mapping = opts.require("mapping")
    manifest = annotations.load_manifest(opts.require("manifest"))
    records = _load_rater_records(opts, schema)
    matrix = annotations.merge_raters(records, manifest)
    report = agreement.agreement_for(matrix, mapping)
    print(report.text(), end="")

    payload = {"report": report.to_dict()}
    subset_size = opts.get("subset_size", cast=int)
    if subset_size is not None:
        subsets = agreement.kappa_subsets(matrix, mapping, subset_size)
        payload["subsets"] = [
            {"raters": list(raters), "kappa": kappa} for raters, kappa in subsets
        ]
        print(f"subsets of size {subset_size} (best first):")
        for raters, kappa in subsets:
            print(f"  {', '.join(raters)}: kappa = {kappa:.6f}")
    out = opts.get("out")
    if out is not None:
        _write_json(payload, out)
        print(f"wrote {out}")
    return 0


def cmd_pak(args) -> int:
    opts = _Options(args)
    ranked = ranking.load_ranked(opts.require("ranking"))
    gold = annotations.load_gold(opts.require("gold"))
    try:
        ks = [int(k) for k in opts.require("ks").split(",") if k.strip()]
    except ValueError as exc:
        raise TermlexError(f"bad --ks value: {exc}") from exc
    curve = agreement.precision_at_k(ranked, gold, ks)
    print(curve.text(), end="")
    out = opts.get("out")
    if out is not None:
        agreement.save_precision_csv(curve, out)
        print(f"wrote {out}")
    return 0


def cmd_export_lexicon(args) -> int:
    opts = _Options(args)
    out_dir = _out_dir(opts)
    manifest = annotations.load_manifest(opts.require("manifest"))
    records = _load_rater_records(opts, "V2")
    matrix = annotations.merge_raters(records, manifest)
    verification = None
    verification_path = opts.get("verification")
    if verification_path is not None:
        verification = annotations.load_gold(verification_path)
    gold = annotations.derive_gold(matrix, verification)
    annotations.save_gold(gold, out_dir / "gold.csv")
    paths = annotations.export_lexicon(gold, out_dir)
    print(f"gold lexicon: {len(gold.entries)} terms -> {out_dir / 'gold.csv'}")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


def cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    opts = _Options(args)
    raters_text = opts.get("raters")
    config = ServiceConfig(
        data_dir=Path(opts.require("data_dir")),
        schema=opts.get("schema", default="V2"),
        raters=tuple(r.strip() for r in raters_text.split(",")) if raters_text else None,
        static_dir=opts.get("static_dir"),
    )
    serve(config, host=opts.get("host", default="127.0.0.1"),
          port=opts.get("port", default=8765, cast=int))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termlex",
        description="Build and validate a specialized lexicon from bibliographic titles.",
    )
    sub = parser.add_subparsers(dest="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value config file; flags override it")
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "load, deduplicate and language-filter a reference export")
    p.add_argument("--input", help="CSV/TSV reference export")
    p.add_argument("--format", choices=("csv", "tsv"))
    p.add_argument("--column-map", dest="column_map",
                   help="field=Column[,field=Column...] header mapping")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("extract", cmd_extract, "extract candidate terms from a corpus")
    p.add_argument("--corpus", help="canonical corpus CSV (from ingest)")
    p.add_argument("--pre-tagged", dest="pre_tagged",
                   help="externally tagged corpus file (bypasses the built-in tagger)")
    p.add_argument("--patterns", help="pattern file (default: built-in inventory)")
    p.add_argument("--lexicon", help="domain lexicon override file (token<TAB>TAG)")
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--save-tagged", dest="save_tagged", action="store_const", const=True)
    p.add_argument("--out-dir", dest="out_dir")

    p = add("rank", cmd_rank, "rank candidates by the combined score")
    p.add_argument("--stats", help="stats.json from extract")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--no-tie-break", dest="no_tie_break", action="store_const", const=True)
    p.add_argument("--out-dir", dest="out_dir")

    p = add("pipeline", cmd_pipeline, "run ingest, extract and rank end to end")
    p.add_argument("--input")
    p.add_argument("--format", choices=("csv", "tsv"))
    p.add_argument("--column-map", dest="column_map")
    p.add_argument("--pre-tagged", dest="pre_tagged")
    p.add_argument("--patterns")
    p.add_argument("--lexicon")
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--save-tagged", dest="save_tagged", action="store_const", const=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--no-tie-break", dest="no_tie_break", action="store_const", const=True)
    p.add_argument("--out-dir", dest="out_dir")

    p = add("sample", cmd_sample, "sample terms from a ranking into a manifest")
    p.add_argument("--ranking", help="ranked.csv")
    p.add_argument("--size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sample-id", dest="sample_id")
    p.add_argument("--out")

    p = add("kappa", cmd_kappa, "Fleiss kappa over rater annotation files")
    p.add_argument("--manifest")
    p.add_argument("--labels", nargs="+", help="annotation CSV files (one or more)")
    p.add_argument("--labels-dir", dest="labels_dir", help="directory of *.csv rater files")
    p.add_argument("--schema", choices=annotations.SCHEMAS)
    p.add_argument("--mapping", choices=agreement.MAPPINGS)
    p.add_argument("--subset-size", dest="subset_size", type=int)
    p.add_argument("--out", help="write the JSON report here")

    p = add("pak", cmd_pak, "precision@k of a ranking against a gold lexicon")
    p.add_argument("--ranking")
    p.add_argument("--gold", help="gold CSV (term,relevance,tags)")
    p.add_argument("--ks", help="comma-separated cutoffs, e.g. 100,200,500")
    p.add_argument("--out", help="write the k,precision CSV here")

    p = add("export-lexicon", cmd_export_lexicon,
            "derive the gold lexicon and write the four-part export")
    p.add_argument("--manifest")
    p.add_argument("--labels", nargs="+")
    p.add_argument("--labels-dir", dest="labels_dir")
    p.add_argument("--verification", help="per-term override CSV (term,relevance,tags)")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("serve", cmd_serve, "serve the annotation HTTP API")
    p.add_argument("--data-dir", dest="data_dir",
                   help="directory holding manifest.json and labels/")
    p.add_argument("--schema", choices=annotations.SCHEMAS)
    p.add_argument("--raters", help="comma-separated allowlist of rater ids")
    p.add_argument("--static-dir", dest="static_dir", help="serve this directory at /")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except _StageFailure as failure:
        print(f"error: {failure}", file=sys.stderr)
        return 2 if isinstance(failure.cause, (TermlexError, OSError)) else 1
    except (TermlexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # internal error
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
