"""Inter-rater agreement (Fleiss kappa) and ranking precision (P@k).

Fleiss kappa over an N x k count matrix (N subjects, k categories, each
row summing to the rater count n):

    P_i   = (sum_j n_ij^2 - n) / (n (n - 1))      per-subject agreement
    P_bar = mean_i P_i                             observed agreement
    p_j   = sum_i n_ij / (N n)                     category marginals
    P_e   = sum_j p_j^2                            chance agreement
    kappa = (P_bar - P_e) / (1 - P_e)

When every rating lands in a single category, P_e = 1 and the quotient
degenerates; that limit is perfect agreement, so kappa is defined as 1
there (and anything else in that situation is an error).

Multi-label annotation records are reduced to one nominal label per cell
by an explicit mapping; the reduction is switchable because it is a
modeling choice, not a property of the data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations

from .annotations import NONE_LABEL, V2_CLASSES, AnnotationMatrix, GoldLexicon
from .errors import DegenerateMarginalsError, TermlexError
from .ranking import RankedTerm, ranking_digest

MAPPINGS = ("V1_primary_category", "V2_three_class", "binary_relevance")

_MAPPING_CATEGORIES = {
    "V1_primary_category": ("OWT", "TM", "AV", NONE_LABEL),
    "V2_three_class": V2_CLASSES,
    "binary_relevance": ("Relevant", "Irrelevant"),
}

_MAPPING_SCHEMA = {"V1_primary_category": "V1", "V2_three_class": "V2"}


@dataclass
class LabelCounts:
    """N x k category-count matrix derived from a matrix + mapping."""

    mapping: str
    terms: list[str]
    categories: tuple[str, ...]
    rows: list[list[int]]


@dataclass
class AgreementReport:
    kappa: float
    mean_agreement: float  # P_bar
    expected_agreement: float  # P_e
    per_subject_agreement: list[float]  # P_i
    counts: list[list[int]]
    n_subjects: int
    n_raters: int
    n_categories: int
    categories: tuple[str, ...] | None = None
    mapping: str | None = None
    rater_subset: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "mean_agreement": self.mean_agreement,
            "expected_agreement": self.expected_agreement,
            "per_subject_agreement": self.per_subject_agreement,
            "counts": self.counts,
            "subjects": self.n_subjects,
            "raters": self.n_raters,
            "categories": list(self.categories) if self.categories else None,
            "mapping": self.mapping,
            "rater_subset": list(self.rater_subset) if self.rater_subset else None,
        }

    def text(self) -> str:
        lines = ["Fleiss kappa"]
        if self.mapping:
            lines.append(f"  mapping:    {self.mapping}")
        if self.rater_subset:
            lines.append(f"  raters:     {', '.join(self.rater_subset)}")
        lines.append(
            f"  subjects={self.n_subjects}  raters={self.n_raters}"
            f"  categories={self.n_categories}"
        )
        if self.categories:
            lines.append(f"  labels:     {', '.join(self.categories)}")
        lines.append(f"  observed agreement P_bar = {self.mean_agreement:.6f}")
        lines.append(f"  expected agreement P_e  = {self.expected_agreement:.6f}")
        lines.append(f"  kappa = {self.kappa:.6f}")
        return "\n".join(lines) + "\n"


def _label_of(record, mapping: str) -> str:
    if mapping == "V1_primary_category":
        return record.primary_category
    if mapping == "V2_three_class":
        return record.v2_class
    if mapping == "binary_relevance":
        return "Relevant" if record.is_relevant() else "Irrelevant"
    raise TermlexError(f"unknown mapping {mapping!r}")


def _counts(matrix: AnnotationMatrix, mapping: str, raters) -> list[list[int]]:
    categories = _MAPPING_CATEGORIES[mapping]
    index = {c: i for i, c in enumerate(categories)}
    rows = []
    for term in matrix.terms:
        row = [0] * len(categories)
        for rater in raters:
            row[index[_label_of(matrix.cells[(term, rater)], mapping)]] += 1
        rows.append(row)
    return rows


def map_labels(matrix: AnnotationMatrix, mapping: str) -> LabelCounts:
    """Reduce the annotation matrix to an N x k count matrix."""
    if mapping not in MAPPINGS:
        raise TermlexError(f"unknown mapping {mapping!r} (expected one of {MAPPINGS})")
    required = _MAPPING_SCHEMA.get(mapping)
    if required is not None and matrix.schema != required:
        raise TermlexError(
            f"mapping {mapping} requires schema {required}, matrix is {matrix.schema}"
        )
    return LabelCounts(
        mapping=mapping,
        terms=list(matrix.terms),
        categories=tuple(_MAPPING_CATEGORIES[mapping]),
        rows=_counts(matrix, mapping, matrix.raters),
    )


def fleiss_kappa(
    counts: list[list[int]],
    categories: tuple[str, ...] | None = None,
    mapping: str | None = None,
    rater_subset: tuple[str, ...] | None = None,
) -> AgreementReport:
    """Fleiss kappa over a count matrix; see the module docstring."""
    n_subjects = len(counts)
    if n_subjects < 2:
        raise TermlexError("kappa needs at least 2 subjects")
    k = len(counts[0])
    for row in counts:
        if len(row) != k:
            raise TermlexError("ragged count matrix")
        for cell in row:
            if not isinstance(cell, int) or cell < 0:
                raise TermlexError(f"counts must be non-negative integers, got {cell!r}")
    n = sum(counts[0])
    for row in counts:
        if sum(row) != n:
            raise TermlexError("every subject must have the same number of ratings")
    if n < 2:
        raise TermlexError("kappa needs at least 2 raters")

    per_subject = [
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in counts
    ]
    mean_agreement = sum(per_subject) / n_subjects
    marginals = [sum(row[j] for row in counts) / (n_subjects * n) for j in range(k)]
    expected = sum(p * p for p in marginals)
    if expected >= 1.0:
        if mean_agreement >= 1.0:
            kappa = 1.0
        else:
            raise DegenerateMarginalsError(
                "all ratings share one category but subjects disagree"
            )
    else:
        kappa = (mean_agreement - expected) / (1.0 - expected)
    return AgreementReport(
        kappa=kappa,
        mean_agreement=mean_agreement,
        expected_agreement=expected,
        per_subject_agreement=per_subject,
        counts=[list(row) for row in counts],
        n_subjects=n_subjects,
        n_raters=n,
        n_categories=k,
        categories=categories,
        mapping=mapping,
        rater_subset=rater_subset,
    )


def agreement_for(
    matrix: AnnotationMatrix, mapping: str, raters=None
) -> AgreementReport:
    """Kappa for the full matrix or a rater subset, with trace metadata."""
    raters = tuple(raters) if raters is not None else tuple(matrix.raters)
    for rater in raters:
        if rater not in matrix.raters:
            raise TermlexError(f"unknown rater {rater!r}")
    if mapping not in MAPPINGS:
        raise TermlexError(f"unknown mapping {mapping!r}")
    required = _MAPPING_SCHEMA.get(mapping)
    if required is not None and matrix.schema != required:
        raise TermlexError(
            f"mapping {mapping} requires schema {required}, matrix is {matrix.schema}"
        )
    return fleiss_kappa(
        _counts(matrix, mapping, raters),
        categories=tuple(_MAPPING_CATEGORIES[mapping]),
        mapping=mapping,
        rater_subset=raters,
    )


def kappa_subsets(
    matrix: AnnotationMatrix, mapping: str, subset_size: int
) -> list[tuple[tuple[str, ...], float]]:
    """Kappa for every rater subset of the given size, best first.

    Ties sort by rater ids so the output order is total; the first entry
    is the argmax subset.
    """
    if not 2 <= subset_size <= len(matrix.raters):
        raise TermlexError(
            f"subset size {subset_size} out of range 2..{len(matrix.raters)}"
        )
    results = []
    for subset in combinations(matrix.raters, subset_size):
        report = agreement_for(matrix, mapping, raters=subset)
        results.append((subset, report.kappa))
    results.sort(key=lambda item: (-item[1], item[0]))
    return results


@dataclass
class PrecisionCurve:
    points: list[tuple[int, float]]
    gold_digest: str
    ranking_digest: str

    def to_dict(self) -> dict:
        return {
            "points": [{"k": k, "precision": p} for k, p in self.points],
            "gold_digest": self.gold_digest,
            "ranking_digest": self.ranking_digest,
        }

    def text(self) -> str:
        lines = ["P@k", "  k        precision"]
        for k, p in self.points:
            lines.append(f"  {k:<8d} {p:.4f}")
        return "\n".join(lines) + "\n"


def precision_at_k(
    ranked: list[RankedTerm], gold: GoldLexicon, ks: list[int]
) -> PrecisionCurve:
    """Fraction of the top-k terms whose gold relevance is Direct or Indirect.

    Every term in the evaluated prefix must be present in the gold
    lexicon; silently treating unknown terms as irrelevant would corrupt
    the numbers, so absence is an error.
    """
    if not ks:
        raise TermlexError("ks must be non-empty")
    if any(k < 1 for k in ks):
        raise TermlexError("every k must be >= 1")
    if list(ks) != sorted(set(ks)):
        raise TermlexError("ks must be strictly increasing")
    ordered = sorted(ranked, key=lambda t: t.rank)
    if ks[-1] > len(ordered):
        raise TermlexError(
            f"k={ks[-1]} exceeds ranking length {len(ordered)}"
        )
    prefix = [t.form for t in ordered[: ks[-1]]]
    missing = [form for form in prefix if form not in gold]
    if missing:
        raise TermlexError(
            "terms missing from gold lexicon: " + ", ".join(repr(m) for m in missing)
        )
    relevant = gold.relevant_terms()
    points = []
    hits = 0
    next_k = 0
    for position, form in enumerate(prefix, start=1):
        if form in relevant:
            hits += 1
        if next_k < len(ks) and position == ks[next_k]:
            points.append((position, hits / position))
            next_k += 1
    return PrecisionCurve(
        points=points,
        gold_digest=gold.digest(),
        ranking_digest=ranking_digest(ranked),
    )


def save_precision_csv(curve: PrecisionCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "precision"])
        for k, precision in curve.points:
            writer.writerow([k, repr(precision)])
