"""Annotation workflow: sampling, rater files, merging, gold derivation.

Two annotation guides are supported. Schema V1 records one to three
ordered categories per rater (organic-residue OWT, biotransformation TM,
agricultural-valorization AV) or the exclusive label None. Schema V2
records one pertinence class (VeryPertinent, Pertinent, Irrelevant) plus
category tags; tags are empty exactly when the class is Irrelevant.

The gold lexicon is derived from a complete V2 matrix by per-term
majority vote with ties resolved toward the more pertinent class (the
inclusive reading), then optionally patched by a per-term verification
override file which always wins.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputFormatError, TermlexError
from .ranking import RankedTerm, ranking_digest

CATEGORIES = ("OWT", "TM", "AV")
NONE_LABEL = "None"
V2_CLASSES = ("VeryPertinent", "Pertinent", "Irrelevant")
RELEVANCE_LEVELS = ("Direct", "Indirect", "Irrelevant")
CLASS_TO_RELEVANCE = {
    "VeryPertinent": "Direct",
    "Pertinent": "Indirect",
    "Irrelevant": "Irrelevant",
}
SCHEMAS = ("V1", "V2")

V1_HEADER = ("rater_id", "term", "category1", "category2", "category3")
V2_HEADER = ("rater_id", "term", "class", "tags")
GOLD_HEADER = ("term", "relevance", "tags")


def _canonical_tags(tags) -> str:
    return "+".join(sorted(tags, key=CATEGORIES.index))


@dataclass(frozen=True)
class AnnotationRecord:
    """One rater's judgment on one term under schema V1 or V2."""

    rater_id: str
    term: str
    schema: str
    v1_categories: tuple[str, ...] = ()
    v2_class: str | None = None
    v2_tags: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.rater_id:
            raise TermlexError("rater_id must be non-empty")
        if not self.term:
            raise TermlexError("term must be non-empty")
        if self.schema == "V1":
            cats = self.v1_categories
            if self.v2_class is not None or self.v2_tags:
                raise TermlexError("V1 record carries V2 fields")
            if not 1 <= len(cats) <= 3:
                raise TermlexError("V1 record needs 1 to 3 categories")
            if len(set(cats)) != len(cats):
                raise TermlexError(f"duplicate category in {cats}")
            if NONE_LABEL in cats:
                if len(cats) != 1:
                    raise TermlexError(f"{NONE_LABEL} is exclusive, got {cats}")
            else:
                for cat in cats:
                    if cat not in CATEGORIES:
                        raise TermlexError(f"unknown category {cat!r}")
        elif self.schema == "V2":
            if self.v1_categories:
                raise TermlexError("V2 record carries V1 categories")
            if self.v2_class not in V2_CLASSES:
                raise TermlexError(f"unknown pertinence class {self.v2_class!r}")
            for tag in self.v2_tags:
                if tag not in CATEGORIES:
                    raise TermlexError(f"unknown tag {tag!r}")
            if (self.v2_class == "Irrelevant") != (not self.v2_tags):
                raise TermlexError(
                    "tags must be empty exactly when the class is Irrelevant"
                )
        else:
            raise TermlexError(f"unknown schema {self.schema!r}")

    @property
    def primary_category(self) -> str:
        """V1 Category 1 (the label used for agreement mapping)."""
        if self.schema != "V1":
            raise TermlexError("primary_category applies to V1 records")
        return self.v1_categories[0]

    def is_relevant(self) -> bool:
        if self.schema == "V1":
            return self.v1_categories != (NONE_LABEL,)
        return self.v2_class != "Irrelevant"


@dataclass
class SampleManifest:
    sample_id: str
    seed: int
    size: int
    ranking_digest: str
    terms: list[str]

    def __post_init__(self):
        if len(set(self.terms)) != len(self.terms):
            raise TermlexError("manifest terms must be distinct")
        if self.size != len(self.terms):
            raise TermlexError("manifest size does not match its term list")


@dataclass
class AnnotationMatrix:
    """Complete term x rater grid of records under one schema."""

    schema: str
    terms: list[str]
    raters: list[str]
    cells: dict[tuple[str, str], AnnotationRecord]  # (term, rater_id) -> record


@dataclass(frozen=True)
class GoldEntry:
    relevance: str
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.relevance not in RELEVANCE_LEVELS:
            raise TermlexError(f"unknown relevance {self.relevance!r}")
        for tag in self.tags:
            if tag not in CATEGORIES:
                raise TermlexError(f"unknown tag {tag!r}")
        if self.relevance == "Irrelevant" and self.tags:
            raise TermlexError("Irrelevant entries carry no tags")
        if self.relevance == "Direct" and not self.tags:
            raise TermlexError("Direct entries need at least one tag")


@dataclass
class GoldLexicon:
    entries: dict[str, GoldEntry] = field(default_factory=dict)

    def __contains__(self, term: str) -> bool:
        return term in self.entries

    def relevant_terms(self) -> set[str]:
        return {
            t for t, e in self.entries.items() if e.relevance in ("Direct", "Indirect")
        }

    def digest(self) -> str:
        payload = json.dumps(
            {
                t: [e.relevance, sorted(e.tags)]
                for t, e in sorted(self.entries.items())
            },
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def sample_terms(
    ranked: list[RankedTerm],
    size: int,
    seed: int,
    sample_id: str | None = None,
    digest: str | None = None,
) -> SampleManifest:
    """Uniform sample without replacement from the ranked terms.

    Deterministic: a Mersenne-Twister generator seeded with `seed` drives
    a partial Fisher-Yates shuffle, so the same (ranking, size, seed)
    always yields the same manifest.
    """
    forms = [t.form for t in ranked]
    if len(set(forms)) != len(forms):
        raise TermlexError("ranking contains duplicate forms")
    if not 1 <= size <= len(forms):
        raise TermlexError(f"sample size {size} out of range 1..{len(forms)}")
    rng = random.Random(seed)
    pool = list(forms)
    for i in range(size):
        j = rng.randrange(i, len(pool))
        pool[i], pool[j] = pool[j], pool[i]
    return SampleManifest(
        sample_id=sample_id or f"s{size}-{seed}",
        seed=seed,
        size=size,
        ranking_digest=digest or ranking_digest(ranked),
        terms=pool[:size],
    )


def save_manifest(manifest: SampleManifest, path) -> None:
    obj = {
        "sample_id": manifest.sample_id,
        "seed": manifest.seed,
        "size": manifest.size,
        "ranking_digest": manifest.ranking_digest,
        "terms": manifest.terms,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_manifest(path) -> SampleManifest:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON: {exc}", path=path) from exc
    try:
        return SampleManifest(
            sample_id=obj["sample_id"],
            seed=obj["seed"],
            size=obj["size"],
            ranking_digest=obj["ranking_digest"],
            terms=list(obj["terms"]),
        )
    except KeyError as exc:
        raise InputFormatError(f"missing field {exc}", path=path) from exc


def parse_annotations(path, schema: str) -> list[AnnotationRecord]:
    """Read one annotation CSV; every invariant violation is a hard error
    carrying the line number."""
    if schema not in SCHEMAS:
        raise TermlexError(f"unknown schema {schema!r}")
    path = Path(path)
    expected_header = V1_HEADER if schema == "V1" else V2_HEADER
    records: list[AnnotationRecord] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != expected_header:
            raise InputFormatError(
                f"expected header {','.join(expected_header)}", path=path
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise InputFormatError(
                    f"expected {len(expected_header)} cells, found {len(row)}",
                    path=path,
                    line=line_no,
                )
            rater_id, term = row[0].strip(), row[1].strip()
            try:
                if schema == "V1":
                    cats = tuple(c.strip() for c in row[2:5] if c.strip())
                    if NONE_LABEL in cats and row[2].strip() != NONE_LABEL:
                        raise TermlexError(f"{NONE_LABEL} is allowed in category1 only")
                    record = AnnotationRecord(
                        rater_id=rater_id, term=term, schema="V1", v1_categories=cats
                    )
                else:
                    tags = frozenset(t for t in row[3].split("+") if t)
                    record = AnnotationRecord(
                        rater_id=rater_id,
                        term=term,
                        schema="V2",
                        v2_class=row[2].strip(),
                        v2_tags=tags,
                    )
            except TermlexError as exc:
                raise InputFormatError(str(exc), path=path, line=line_no) from exc
            key = (record.rater_id, record.term)
            if key in seen:
                raise InputFormatError(
                    f"duplicate (rater, term) pair {key}", path=path, line=line_no
                )
            seen.add(key)
            records.append(record)
    return records


def serialize_annotations(records: list[AnnotationRecord], path, schema: str | None = None) -> None:
    """Write records in the format parse_annotations reads back."""
    if schema is None:
        if not records:
            raise TermlexError("cannot infer schema from an empty record list")
        schema = records[0].schema
    for record in records:
        if record.schema != schema:
            raise TermlexError(
                f"mixed schemas: {record.schema} record in a {schema} file"
            )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if schema == "V1":
            writer.writerow(V1_HEADER)
            for record in records:
                cats = list(record.v1_categories) + [""] * (3 - len(record.v1_categories))
                writer.writerow([record.rater_id, record.term, *cats])
        else:
            writer.writerow(V2_HEADER)
            for record in records:
                writer.writerow(
                    [
                        record.rater_id,
                        record.term,
                        record.v2_class,
                        _canonical_tags(record.v2_tags),
                    ]
                )


def append_annotation(record: AnnotationRecord, path) -> None:
    """Durably append one record to a rater file (header written on create).

    The file is flushed and fsynced before returning, so a submission
    acknowledged by the service survives a crash or restart.
    """
    import io
    import os

    path = Path(path)
    new_file = not path.exists()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if new_file:
        writer.writerow(V1_HEADER if record.schema == "V1" else V2_HEADER)
    if record.schema == "V1":
        cats = list(record.v1_categories) + [""] * (3 - len(record.v1_categories))
        writer.writerow([record.rater_id, record.term, *cats])
    else:
        writer.writerow(
            [record.rater_id, record.term, record.v2_class, _canonical_tags(record.v2_tags)]
        )
    with open(path, "a", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
        fh.flush()
        os.fsync(fh.fileno())


def merge_raters(records, manifest: SampleManifest) -> AnnotationMatrix:
    """Assemble a complete matrix: every rater rated every manifest term.

    Missing cells are reported exhaustively; fewer than two raters, a
    term outside the manifest, or mixed schemas are errors.
    """
    records = list(records)
    if not records:
        raise TermlexError("no annotation records given")
    schema = records[0].schema
    manifest_terms = set(manifest.terms)
    cells: dict[tuple[str, str], AnnotationRecord] = {}
    raters: set[str] = set()
    for record in records:
        if record.schema != schema:
            raise TermlexError("records mix schemas V1 and V2")
        if record.term not in manifest_terms:
            raise TermlexError(f"term {record.term!r} is not in the manifest")
        key = (record.term, record.rater_id)
        if key in cells:
            raise TermlexError(f"duplicate rating for {key}")
        cells[key] = record
        raters.add(record.rater_id)
    if len(raters) < 2:
        raise TermlexError("at least 2 raters are required")
    rater_order = sorted(raters)
    missing = [
        (term, rater)
        for term in manifest.terms
        for rater in rater_order
        if (term, rater) not in cells
    ]
    if missing:
        listing = ", ".join(f"({t!r}, {r!r})" for t, r in missing)
        raise TermlexError(f"incomplete matrix; missing cells: {listing}")
    return AnnotationMatrix(
        schema=schema, terms=list(manifest.terms), raters=rater_order, cells=cells
    )


def derive_gold(
    matrix: AnnotationMatrix, verification: GoldLexicon | None = None
) -> GoldLexicon:
    """Majority-vote consensus per term, tie-broken toward pertinence.

    Tags are the union over the raters who voted the consensus class.
    Verification entries replace derived ones unconditionally; extra
    verification terms (beyond the matrix) are included as given.
    """
    if matrix.schema != "V2":
        raise TermlexError("gold derivation needs a V2 matrix")
    entries: dict[str, GoldEntry] = {}
    for term in matrix.terms:
        votes = [matrix.cells[(term, rater)] for rater in matrix.raters]
        counts = {cls: 0 for cls in V2_CLASSES}
        for vote in votes:
            counts[vote.v2_class] += 1
        top = max(counts.values())
        consensus = next(cls for cls in V2_CLASSES if counts[cls] == top)
        tags: set[str] = set()
        for vote in votes:
            if vote.v2_class == consensus:
                tags |= vote.v2_tags
        relevance = CLASS_TO_RELEVANCE[consensus]
        entries[term] = GoldEntry(
            relevance=relevance,
            tags=frozenset(tags) if relevance != "Irrelevant" else frozenset(),
        )
    if verification is not None:
        entries.update(verification.entries)
    return GoldLexicon(entries)


def save_gold(gold: GoldLexicon, path) -> None:
    """Full gold table (term, relevance, tags), sorted by term."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GOLD_HEADER)
        for term in sorted(gold.entries):
            entry = gold.entries[term]
            writer.writerow([term, entry.relevance, _canonical_tags(entry.tags)])


def load_gold(path) -> GoldLexicon:
    path = Path(path)
    entries: dict[str, GoldEntry] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != GOLD_HEADER:
            raise InputFormatError(
                f"expected header {','.join(GOLD_HEADER)}", path=path
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise InputFormatError(
                    f"expected 3 cells, found {len(row)}", path=path, line=line_no
                )
            term = row[0]
            if term in entries:
                raise InputFormatError(
                    f"duplicate term {term!r}", path=path, line=line_no
                )
            try:
                entries[term] = GoldEntry(
                    relevance=row[1],
                    tags=frozenset(t for t in row[2].split("+") if t),
                )
            except TermlexError as exc:
                raise InputFormatError(str(exc), path=path, line=line_no) from exc
    return GoldLexicon(entries)


LEXICON_PARTS = (
    ("part1_indirect", "Indirect", None),
    ("part2_direct_owt", "Direct", "OWT"),
    ("part3_direct_tm", "Direct", "TM"),
    ("part4_direct_av", "Direct", "AV"),
)


def export_lexicon(gold: GoldLexicon, out_dir) -> dict[str, Path]:
    """Write the four-part pertinent-terms lexicon.

    Part 1 holds Indirect terms; parts 2-4 hold Direct terms tagged OWT,
    TM, AV respectively (a multi-tag Direct term appears in every
    matching part). Irrelevant terms are excluded entirely.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    for name, relevance, tag in LEXICON_PARTS:
        path = out_dir / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["term", "tags"])
            for term in sorted(gold.entries):
                entry = gold.entries[term]
                if entry.relevance != relevance:
                    continue
                if tag is not None and tag not in entry.tags:
                    continue
                writer.writerow([term, _canonical_tags(entry.tags)])
        paths[name] = path
    return paths
