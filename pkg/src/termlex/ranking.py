"""Candidate scoring and ranking.

Two per-candidate scores are combined into the final ranking:

- a termhood score ("c_value" here): L(a) * f(a) for candidates not
  contained in any longer candidate, and
  L(a) * (f(a) - mean frequency of the containing candidates) otherwise,
  with L(a) = log2(word_count + 1). The +1 keeps single-word candidates
  at positive weight while longer candidates still score higher per
  occurrence. The raw value can go negative when the containment mass
  exceeds f(a); it is clamped at zero only when the scores are combined.

- a discriminativeness score: document-summed TF-IDF, which collapses to
  f(a) * ln(N / df(a)) because idf is constant per candidate.

Both scores are min-max normalized into [eps, 1] and combined by their
harmonic mean, so a candidate must do well on both to rank high. Ties
are broken by higher frequency, then lexicographic form, making the
ranking a total, permutation-independent order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import InputFormatError, TermlexError
from .extraction import CandidateTerm, CorpusStats

DEFAULT_EPSILON = 1e-9

_BASIC_HEADER = ("index", "term", "rank")
_EXTENDED_HEADER = ("index", "term", "rank", "c_value", "tfidf", "f_tfidf_c")


@dataclass
class RankedTerm:
    form: str
    c_value: float
    tfidf: float
    f_tfidf_c: float
    rank: int


def _term(stats: CorpusStats, candidate) -> CandidateTerm:
    form = candidate.form if isinstance(candidate, CandidateTerm) else candidate
    try:
        return stats.terms[form]
    except KeyError:
        raise TermlexError(f"unknown candidate {form!r}") from None


def c_value(candidate, stats: CorpusStats) -> float:
    """Raw termhood score of one candidate (may be negative when nested)."""
    term = _term(stats, candidate)
    weight = math.log2(term.word_count + 1)
    if not term.nesting_parents:
        return weight * term.freq
    nested = 0
    for parent in term.nesting_parents:
        nested += _term(stats, parent).freq
    return weight * (term.freq - nested / len(term.nesting_parents))


def tfidf(candidate, stats: CorpusStats) -> float:
    """Document-summed TF-IDF: f(a) * ln(doc_count / doc_freq)."""
    term = _term(stats, candidate)
    if stats.doc_count < 1:
        raise TermlexError("doc_count must be >= 1")
    if term.doc_freq > stats.doc_count:
        raise TermlexError(
            f"candidate {term.form!r}: doc_freq {term.doc_freq} exceeds doc_count {stats.doc_count}"
        )
    return term.freq * math.log(stats.doc_count / term.doc_freq)


def _minmax(values: list[float], epsilon: float) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    scale = (1.0 - epsilon) / (hi - lo)
    return [epsilon + (v - lo) * scale for v in values]


def combine_scores(
    raw_c_values: list[float], raw_tfidfs: list[float], epsilon: float = DEFAULT_EPSILON
) -> list[float]:
    """Combined score in [epsilon, 1]: harmonic mean of the min-max
    normalized clamped c_value and tfidf columns. Degenerate columns
    (all values equal) normalize to 1."""
    if len(raw_c_values) != len(raw_tfidfs):
        raise TermlexError("score columns differ in length")
    if not 0.0 < epsilon < 1.0:
        raise TermlexError("epsilon must be in (0, 1)")
    cv_hat = _minmax([max(0.0, v) for v in raw_c_values], epsilon)
    tfidf_hat = _minmax(raw_tfidfs, epsilon)
    return [2.0 * c * t / (c + t) for c, t in zip(cv_hat, tfidf_hat)]


def rank_terms(
    stats: CorpusStats, epsilon: float = DEFAULT_EPSILON, tie_break: bool = True
) -> list[RankedTerm]:
    """Score every candidate and assign ranks 1..M.

    With tie_break disabled (experiments only), equal combined scores
    fall back directly to lexicographic form order instead of frequency.
    """
    if not stats.terms:
        raise TermlexError("empty candidate set")

    forms = sorted(stats.terms)
    raw_cv = [c_value(f, stats) for f in forms]
    raw_tfidf = [tfidf(f, stats) for f in forms]
    combined = combine_scores(raw_cv, raw_tfidf, epsilon)

    indexed = list(range(len(forms)))
    if tie_break:
        indexed.sort(key=lambda i: (-combined[i], -stats.terms[forms[i]].freq, forms[i]))
    else:
        indexed.sort(key=lambda i: (-combined[i], forms[i]))

    return [
        RankedTerm(
            form=forms[i],
            c_value=raw_cv[i],
            tfidf=raw_tfidf[i],
            f_tfidf_c=combined[i],
            rank=position,
        )
        for position, i in enumerate(indexed, start=1)
    ]


def _check_ranks(terms: list[RankedTerm]) -> list[RankedTerm]:
    if sorted(t.rank for t in terms) != list(range(1, len(terms) + 1)):
        raise TermlexError("ranks are not a permutation of 1..M")
    return sorted(terms, key=lambda t: t.rank)


def _write_rows(writer, terms: list[RankedTerm], extended: bool) -> None:
    writer.writerow(_EXTENDED_HEADER if extended else _BASIC_HEADER)
    for index, term in enumerate(_check_ranks(terms), start=1):
        row = [index, term.form, term.rank]
        if extended:
            row += [repr(term.c_value), repr(term.tfidf), repr(term.f_tfidf_c)]
        writer.writerow(row)


def export_ranked(terms: list[RankedTerm], path, extended: bool = False) -> None:
    """Write the ranked list as CSV, ordered by rank.

    The basic layout is index,term,rank; the extended one appends the
    raw c_value, tfidf and combined score columns.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(csv.writer(fh, lineterminator="\n"), terms, extended)


def ranking_digest(terms: list[RankedTerm]) -> str:
    """sha256 over the canonical basic CSV serialization of the ranking."""
    buf = io.StringIO()
    _write_rows(csv.writer(buf, lineterminator="\n"), terms, extended=False)
    return hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()


def load_ranked(path) -> list[RankedTerm]:
    """Read a basic or extended ranked CSV back into RankedTerm objects.

    Basic files carry no scores; those fields load as 0.0.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header == _BASIC_HEADER:
            extended = False
        elif header == _EXTENDED_HEADER:
            extended = True
        else:
            raise InputFormatError(
                "not a ranked CSV (unexpected header)", path=path
            )
        terms = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InputFormatError(
                    f"expected {len(header)} cells, found {len(row)}",
                    path=path,
                    line=line_no,
                )
            try:
                terms.append(
                    RankedTerm(
                        form=row[1],
                        c_value=float(row[3]) if extended else 0.0,
                        tfidf=float(row[4]) if extended else 0.0,
                        f_tfidf_c=float(row[5]) if extended else 0.0,
                        rank=int(row[2]),
                    )
                )
            except ValueError as exc:
                raise InputFormatError(str(exc), path=path, line=line_no) from exc
    if sorted(t.rank for t in terms) != list(range(1, len(terms) + 1)):
        raise InputFormatError("ranks are not a permutation of 1..M", path=path)
    return terms
