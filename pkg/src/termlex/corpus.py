"""Bibliographic corpus ingestion.

Loads reference exports (CSV/TSV with a header row), deduplicates them by
DOI and by normalized title, and keeps English-language references only.
Titles of the surviving documents are the text analyzed by the extraction
stages; everything else is carried along as metadata.

All three steps are pure transformations over the stable input order, so
their outputs are deterministic and each step reports exactly what it
dropped or merged.
"""

from __future__ import annotations

import csv
import re
import unicodedata
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import InputFormatError, TermlexError
from .wordlists import ENGLISH_STOPWORDS, FRENCH_SPANISH_STOPWORDS

DOC_TYPES = ("article", "report", "book_section", "thesis", "other")
LANGUAGES = ("english", "other", "unknown")

CORPUS_COLUMNS = ("doc_id", "title", "authors", "year", "doi", "url", "doc_type", "language")

# Header names recognized for each field (lowercased, whitespace-collapsed).
# A user column map overrides these per field.
DEFAULT_COLUMN_ALIASES = {
    "doc_id": ("doc_id", "id", "record id"),
    "title": ("title", "document title", "article title", "ti"),
    "authors": ("authors", "author", "au"),
    "year": ("year", "publication year", "py"),
    "doi": ("doi",),
    "url": ("url", "link"),
    "doc_type": ("doc_type", "type", "document type", "publication type"),
}

_DOC_TYPE_SYNONYMS = {
    "article": "article",
    "journal article": "article",
    "report": "report",
    "book section": "book_section",
    "book_section": "book_section",
    "book chapter": "book_section",
    "chapter": "book_section",
    "thesis": "thesis",
    "student thesis": "thesis",
    "phd thesis": "thesis",
}

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Characters stripped from the ends of a title during dedup normalization.
_EDGE_PUNCT = "".join(
    [".,;:!?'\"()[]{}<>", "‘’“”–—-/\\|*+~^"]
)


@dataclass
class Document:
    """One bibliographic reference; its title is the analyzed text."""

    doc_id: str
    title: str
    authors: list[str] = field(default_factory=list)
    year: int | None = None
    doi: str | None = None
    url: str | None = None
    doc_type: str = "other"
    language: str = "unknown"


@dataclass
class Corpus:
    documents: list[Document]
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)


@dataclass
class IngestReport:
    source: str
    total_rows: int = 0
    kept: int = 0
    dropped_empty_title: int = 0
    skipped_malformed: list[tuple[int, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["skipped_malformed"] = [
            {"line": line, "reason": reason} for line, reason in self.skipped_malformed
        ]
        return d

    def text(self) -> str:
        lines = [
            f"ingestion of {self.source}",
            f"  data rows:          {self.total_rows}",
            f"  documents kept:     {self.kept}",
            f"  dropped (no title): {self.dropped_empty_title}",
            f"  skipped (malformed): {len(self.skipped_malformed)}",
        ]
        for line_no, reason in self.skipped_malformed:
            lines.append(f"    line {line_no}: {reason}")
        lines.extend(f"  warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"


@dataclass
class DedupReport:
    merges: list[tuple[str, list[str]]] = field(default_factory=list)

    @property
    def removed_count(self) -> int:
        return sum(len(removed) for _, removed in self.merges)

    def to_dict(self) -> dict:
        return {
            "merges": [
                {"kept_id": kept, "removed_ids": removed} for kept, removed in self.merges
            ],
            "removed_count": self.removed_count,
        }

    def text(self) -> str:
        lines = [f"deduplication: {self.removed_count} duplicate(s) removed"]
        for kept, removed in self.merges:
            lines.append(f"  kept {kept} <- removed {', '.join(removed)}")
        return "\n".join(lines) + "\n"


@dataclass
class FilterReport:
    retained: int = 0
    removed: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"retained": self.retained, "removed": self.removed}

    def text(self) -> str:
        lines = [
            f"language filter: {self.retained} retained, {len(self.removed)} removed"
        ]
        for entry in self.removed:
            lines.append(
                "  {doc_id}: english={english_hits} other={other_hits} "
                "ratio={english_ratio:.3f}".format(**entry)
            )
        return "\n".join(lines) + "\n"


def normalized_title(title: str) -> str:
    """Title key used for duplicate detection.

    Lowercase, Unicode NFC, internal whitespace collapsed, leading and
    trailing punctuation stripped (which covers the trailing period).
    All-punctuation titles keep their collapsed form so they never
    collapse onto one empty key.
    """
    t = unicodedata.normalize("NFC", title).lower()
    t = " ".join(t.split())
    return t.strip(_EDGE_PUNCT + " ") or t


def _normalized_doi(doi: str | None) -> str | None:
    if doi is None:
        return None
    d = doi.strip().lower()
    for prefix in ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "doi:"):
        if d.startswith(prefix):
            d = d[len(prefix):]
    return d or None


def _clean_cell(value) -> str:
    return value.strip() if isinstance(value, str) else ""


def _resolve_columns(header: list[str], column_map: dict | None) -> dict[str, int]:
    positions = {}
    normalized = [" ".join(h.split()).lower() for h in header]
    explicit = {k: v.lower() for k, v in (column_map or {}).items()}
    for fld, aliases in DEFAULT_COLUMN_ALIASES.items():
        wanted = (explicit[fld],) if fld in explicit else aliases
        for name in wanted:
            if name in normalized:
                positions[fld] = normalized.index(name)
                break
    if "title" not in positions:
        raise InputFormatError(
            "no title column found (header: %s); use a column map to name it"
            % ", ".join(header)
        )
    return positions


def ingest_references(
    path, fmt: str = "csv", column_map: dict | None = None
) -> tuple[Corpus, IngestReport]:
    """Read a CSV/TSV reference export into a Corpus.

    One Document per data row. Rows without a title are dropped and
    counted; structurally malformed rows (wrong cell count, duplicate
    explicit id) are skipped with their line number and ingestion
    continues. When the file has no id column, the data-row ordinal
    (1-based) becomes the doc_id.
    """
    path = Path(path)
    if fmt not in ("csv", "tsv"):
        raise TermlexError(f"unsupported format {fmt!r} (expected csv or tsv)")
    try:
        fh = open(path, encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise TermlexError(f"cannot read {path}: {exc}") from exc

    delimiter = "," if fmt == "csv" else "\t"
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader, None)
        if not header:
            raise InputFormatError("empty file: missing header row", path=path)
        positions = _resolve_columns(header, column_map)
        report = IngestReport(source=path.name)
        documents: list[Document] = []
        seen_ids: set[str] = set()
        rows = [(reader.line_num, row) for row in reader]

    for line_no, row in rows:
        if not row:  # a truly empty line is not a data row
            continue
        report.total_rows += 1
        if len(row) != len(header):
            report.skipped_malformed.append(
                (line_no, f"expected {len(header)} cells, found {len(row)}")
            )
            continue

        def cell(fld: str) -> str:
            pos = positions.get(fld)
            return _clean_cell(row[pos]) if pos is not None else ""

        title = " ".join(cell("title").split())
        if not title:
            report.dropped_empty_title += 1
            continue

        doc_id = cell("doc_id") or str(report.total_rows)
        if doc_id in seen_ids:
            report.skipped_malformed.append((line_no, f"duplicate doc_id {doc_id!r}"))
            continue
        seen_ids.add(doc_id)

        year: int | None = None
        year_text = cell("year")
        if year_text:
            try:
                year = int(year_text)
            except ValueError:
                report.warnings.append(
                    f"line {line_no}: unparseable year {year_text!r} treated as absent"
                )
            else:
                if not 1800 <= year <= 2100:
                    report.warnings.append(
                        f"line {line_no}: year {year} outside [1800, 2100] treated as absent"
                    )
                    year = None

        authors = [a.strip() for a in cell("authors").split(";") if a.strip()]
        doc_type = _DOC_TYPE_SYNONYMS.get(cell("doc_type").lower(), "other")
        documents.append(
            Document(
                doc_id=doc_id,
                title=title,
                authors=authors,
                year=year,
                doi=_normalized_doi(cell("doi") or None),
                url=cell("url") or None,
                doc_type=doc_type,
            )
        )

    report.kept = len(documents)
    provenance = {
        "sources": [path.name],
        "ingested_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return Corpus(documents, provenance), report


def deduplicate(corpus: Corpus) -> tuple[Corpus, DedupReport]:
    """Merge documents sharing a DOI or a normalized title.

    The earliest document survives. A DOI match takes precedence over a
    title match when both point at different survivors. Keys of merged
    documents are re-registered to their survivor, so chains of
    duplicates collapse transitively and the result is idempotent.
    """
    by_doi: dict[str, Document] = {}
    by_title: dict[str, Document] = {}
    merged: dict[str, list[str]] = {}
    kept: list[Document] = []

    for doc in corpus.documents:
        doi_key = _normalized_doi(doc.doi)
        title_key = normalized_title(doc.title)
        survivor = None
        if doi_key is not None and doi_key in by_doi:
            survivor = by_doi[doi_key]
        elif title_key in by_title:
            survivor = by_title[title_key]

        if survivor is None:
            kept.append(doc)
            if doi_key is not None:
                by_doi[doi_key] = doc
            by_title[title_key] = doc
        else:
            merged.setdefault(survivor.doc_id, []).append(doc.doc_id)
            if doi_key is not None and doi_key not in by_doi:
                by_doi[doi_key] = survivor
            if title_key not in by_title:
                by_title[title_key] = survivor

    report = DedupReport(
        merges=[(doc.doc_id, merged[doc.doc_id]) for doc in kept if doc.doc_id in merged]
    )
    return Corpus(kept, dict(corpus.provenance)), report


def classify_language(title: str) -> tuple[str, int, int, float]:
    """Stopword-ratio language heuristic for one title.

    Returns (language, english_hits, other_hits, english_ratio). Titles
    with fewer than 3 word tokens are 'unknown' (retained on doubt);
    otherwise 'english' when english hits >= french/spanish hits and the
    english ratio is at least 0.10, else 'other'.
    """
    tokens = [t.lower() for t in _WORD_RE.findall(title)]
    if len(tokens) < 3:
        return "unknown", 0, 0, 0.0
    english = sum(1 for t in tokens if t in ENGLISH_STOPWORDS)
    other = sum(1 for t in tokens if t in FRENCH_SPANISH_STOPWORDS)
    ratio = english / len(tokens)
    if english >= other and ratio >= 0.10:
        return "english", english, other, ratio
    return "other", english, other, ratio


def filter_english(corpus: Corpus) -> tuple[Corpus, FilterReport]:
    """Keep documents classified english or unknown; report the removed ones."""
    kept: list[Document] = []
    report = FilterReport()
    for doc in corpus.documents:
        language, english, other, ratio = classify_language(doc.title)
        doc.language = language
        if language == "other":
            report.removed.append(
                {
                    "doc_id": doc.doc_id,
                    "english_hits": english,
                    "other_hits": other,
                    "english_ratio": round(ratio, 6),
                }
            )
        else:
            kept.append(doc)
    report.retained = len(kept)
    return Corpus(kept, dict(corpus.provenance)), report


def save_corpus(corpus: Corpus, path) -> None:
    """Write the canonical corpus CSV (stable column order, LF endings)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CORPUS_COLUMNS)
        for doc in corpus.documents:
            writer.writerow(
                [
                    doc.doc_id,
                    doc.title,
                    "; ".join(doc.authors),
                    "" if doc.year is None else str(doc.year),
                    doc.doi or "",
                    doc.url or "",
                    doc.doc_type,
                    doc.language,
                ]
            )


def load_corpus(path) -> Corpus:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CORPUS_COLUMNS:
            raise InputFormatError(
                f"not a canonical corpus file (expected header {','.join(CORPUS_COLUMNS)})",
                path=path,
            )
        documents = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(CORPUS_COLUMNS):
                raise InputFormatError(
                    f"expected {len(CORPUS_COLUMNS)} cells, found {len(row)}",
                    path=path,
                    line=line_no,
                )
            doc_id, title, authors, year, doi, url, doc_type, language = row
            documents.append(
                Document(
                    doc_id=doc_id,
                    title=title,
                    authors=[a.strip() for a in authors.split(";") if a.strip()],
                    year=int(year) if year else None,
                    doi=doi or None,
                    url=url or None,
                    doc_type=doc_type if doc_type in DOC_TYPES else "other",
                    language=language if language in LANGUAGES else "unknown",
                )
            )
    return Corpus(documents, {"sources": [path.name]})
