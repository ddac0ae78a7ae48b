"""Candidate term extraction over tagged titles.

Syntactic patterns (tag sequences) are matched against every contiguous
token window; all matching windows count, including nested and
overlapping ones, because the ranking stage's nested-frequency
correction needs substring counts. Aggregation produces, per candidate
form, its total frequency, document frequency, per-document counts, and
the set of longer candidates that contain it.

Per-title matching can run across worker processes; the fold over
per-title results is a commutative count merge done in stable title
order, so the outcome is independent of worker count.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import kernels
from .errors import InputFormatError, TermlexError
from .tagging import TAG_IDS, TAGSET, TaggedTitle

MAX_PATTERN_LEN = 5

_TAG_ABBREV = {
    "NOUN": "N",
    "ADJ": "A",
    "VERB": "V",
    "ADV": "R",
    "PREP": "P",
    "DET": "D",
    "CONJ": "C",
    "NUM": "M",
    "PUNCT": "U",
    "OTHER": "O",
}


@dataclass(frozen=True)
class Pattern:
    id: str
    tags: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= len(self.tags) <= MAX_PATTERN_LEN:
            raise ValueError(
                f"pattern {self.id!r}: length must be 1..{MAX_PATTERN_LEN}"
            )
        for tag in self.tags:
            if tag not in TAGSET:
                raise ValueError(f"pattern {self.id!r}: unknown tag {tag!r}")


def _pattern(tags: str) -> Pattern:
    tag_tuple = tuple(tags.split())
    return Pattern(id="".join(_TAG_ABBREV[t] for t in tag_tuple), tags=tag_tuple)


# Standard English term shapes; the single-noun pattern keeps one-word
# candidates ("mulch", "effluents") in play.
DEFAULT_PATTERNS = (
    _pattern("NOUN"),
    _pattern("NOUN NOUN"),
    _pattern("ADJ NOUN"),
    _pattern("NOUN NOUN NOUN"),
    _pattern("ADJ NOUN NOUN"),
    _pattern("ADJ ADJ NOUN"),
    _pattern("NOUN PREP NOUN"),
    _pattern("NOUN PREP DET NOUN"),
)


@dataclass(frozen=True)
class Occurrence:
    form: str
    doc_id: str
    span: tuple[int, int]  # token indices, end exclusive


@dataclass
class CandidateTerm:
    form: str
    word_count: int
    freq: int
    doc_freq: int
    nesting_parents: set[str] = field(default_factory=set)


@dataclass
class CorpusStats:
    """Everything the ranking stage needs about the candidate set."""

    doc_count: int
    terms: dict[str, CandidateTerm]
    doc_tf: dict[str, dict[str, int]]  # form -> doc_id -> occurrences

    def __contains__(self, form: str) -> bool:
        return form in self.terms


def load_patterns(path) -> list[Pattern]:
    """Read a pattern file: one pattern per line, tags space-separated."""
    path = Path(path)
    patterns: list[Pattern] = []
    seen: set[tuple[str, ...]] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tags = tuple(line.split())
            for tag in tags:
                if tag not in TAGSET:
                    raise InputFormatError(
                        f"unknown tag {tag!r}", path=path, line=line_no
                    )
            if len(tags) > MAX_PATTERN_LEN:
                raise InputFormatError(
                    f"pattern longer than {MAX_PATTERN_LEN} tags", path=path, line=line_no
                )
            if tags in seen:
                raise InputFormatError(
                    f"duplicate pattern {' '.join(tags)!r}", path=path, line=line_no
                )
            seen.add(tags)
            patterns.append(Pattern(id="".join(_TAG_ABBREV[t] for t in tags), tags=tags))
    if not patterns:
        raise InputFormatError("pattern file defines no patterns", path=path)
    return patterns


def _payload(title: TaggedTitle) -> tuple[str, list[int], list[bool], list[str]]:
    tags = [TAG_IDS[t.tag] for t in title.tokens]
    alpha = [any(ch.isalpha() for ch in t.norm) for t in title.tokens]
    norms = [t.norm for t in title.tokens]
    return title.doc_id, tags, alpha, norms


def _pattern_ids(patterns) -> list[list[int]]:
    return [[TAG_IDS[t] for t in p.tags] for p in patterns]


def match_patterns(title: TaggedTitle, patterns=DEFAULT_PATTERNS) -> list[Occurrence]:
    """Every window of the title whose tag sequence equals a pattern."""
    if not patterns:
        raise TermlexError("patterns must be non-empty")
    table = kernels.compile_patterns(_pattern_ids(patterns))
    doc_id, tags, alpha, norms = _payload(title)
    occurrences = []
    for start, length in kernels.match_spans(tags, alpha, table):
        form = " ".join(norms[start : start + length])
        occurrences.append(Occurrence(form=form, doc_id=doc_id, span=(start, start + length)))
    return occurrences


_WORKER_TABLE = None


def _init_worker(pattern_ids):
    global _WORKER_TABLE
    _WORKER_TABLE = kernels.compile_patterns(pattern_ids)


def _match_chunk(chunk):
    results = []
    for _doc_id, tags, alpha, norms in chunk:
        forms = [
            " ".join(norms[start : start + length])
            for start, length in kernels.match_spans(tags, alpha, _WORKER_TABLE)
        ]
        results.append(forms)
    return results


def _chunked(items, n_chunks):
    size = max(1, -(-len(items) // n_chunks))
    return [items[i : i + size] for i in range(0, len(items), size)]


def nesting_parents(forms) -> dict[str, set[str]]:
    """Containment structure: parents[a] = candidates whose word sequence
    strictly contains a's as a contiguous run."""
    seqs = {form: tuple(form.split(" ")) for form in forms}
    index = {seq: form for form, seq in seqs.items()}
    parents: dict[str, set[str]] = {form: set() for form in forms}
    for form, seq in seqs.items():
        n = len(seq)
        for length in range(1, n):
            for start in range(n - length + 1):
                child = index.get(seq[start : start + length])
                if child is not None:
                    parents[child].add(form)
    return parents


def build_candidate_set(
    titles: list[TaggedTitle],
    patterns=DEFAULT_PATTERNS,
    min_freq: int = 1,
    workers: int = 1,
) -> CorpusStats:
    """Aggregate pattern matches into the candidate set with statistics.

    Candidates below min_freq are dropped; nesting is computed among the
    survivors only. Output is deterministic for any worker count.
    """
    if min_freq < 1:
        raise TermlexError("min_freq must be >= 1")
    if not patterns:
        raise TermlexError("patterns must be non-empty")

    payloads = [_payload(t) for t in titles]
    pattern_ids = _pattern_ids(patterns)
    if workers <= 1 or len(payloads) < 2:
        _init_worker(pattern_ids)
        per_title = _match_chunk(payloads)
    else:
        chunks = _chunked(payloads, workers * 4)
        with multiprocessing.Pool(
            workers, initializer=_init_worker, initargs=(pattern_ids,)
        ) as pool:
            per_title = [forms for chunk in pool.map(_match_chunk, chunks) for forms in chunk]

    freq: Counter[str] = Counter()
    doc_tf: dict[str, dict[str, int]] = {}
    for (doc_id, _tags, _alpha, _norms), forms in zip(payloads, per_title):
        for form in forms:
            freq[form] += 1
            per_doc = doc_tf.setdefault(form, {})
            per_doc[doc_id] = per_doc.get(doc_id, 0) + 1

    surviving = {form for form, f in freq.items() if f >= min_freq}
    parents = nesting_parents(surviving)
    terms = {
        form: CandidateTerm(
            form=form,
            word_count=form.count(" ") + 1,
            freq=freq[form],
            doc_freq=len(doc_tf[form]),
            nesting_parents=parents[form],
        )
        for form in surviving
    }
    doc_count = len({doc_id for doc_id, _t, _a, _n in payloads})
    return CorpusStats(
        doc_count=doc_count,
        terms=terms,
        doc_tf={form: doc_tf[form] for form in surviving},
    )


def save_candidates(stats: CorpusStats, path) -> None:
    """Human-oriented candidate dump (form, word_count, freq, doc_freq)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["form", "word_count", "freq", "doc_freq"])
        for form in sorted(stats.terms):
            term = stats.terms[form]
            writer.writerow([term.form, term.word_count, term.freq, term.doc_freq])


def save_stats(stats: CorpusStats, path) -> None:
    """Full statistics dump consumed by the ranking stage."""
    obj = {
        "doc_count": stats.doc_count,
        "terms": {
            form: {
                "word_count": term.word_count,
                "freq": term.freq,
                "doc_freq": term.doc_freq,
                "nesting_parents": sorted(term.nesting_parents),
                "doc_tf": stats.doc_tf[form],
            }
            for form, term in stats.terms.items()
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=1)
        fh.write("\n")


def load_stats(path) -> CorpusStats:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON: {exc}", path=path) from exc
    try:
        terms = {}
        doc_tf = {}
        for form, entry in obj["terms"].items():
            terms[form] = CandidateTerm(
                form=form,
                word_count=entry["word_count"],
                freq=entry["freq"],
                doc_freq=entry["doc_freq"],
                nesting_parents=set(entry["nesting_parents"]),
            )
            doc_tf[form] = dict(entry["doc_tf"])
        return CorpusStats(doc_count=obj["doc_count"], terms=terms, doc_tf=doc_tf)
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"missing field: {exc}", path=path) from exc
