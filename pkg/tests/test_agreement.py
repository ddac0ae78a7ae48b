import json
import random

import pytest

from termlex.agreement import (
    AgreementReport,
    agreement_for,
    fleiss_kappa,
    kappa_subsets,
    map_labels,
    precision_at_k,
    save_precision_csv,
)
from termlex.annotations import (
    AnnotationRecord,
    GoldEntry,
    GoldLexicon,
    SampleManifest,
    merge_raters,
)
from termlex.errors import DegenerateMarginalsError, TermlexError
from termlex.ranking import RankedTerm

from oracles import fleiss_kappa_direct

# Five expert judgments on five example terms (ordered categories per
# rater; the first category is the primary label used for kappa).
EXAMPLE_V1_ROWS = {
    "manure": [("OWT", "TM", "AV"), ("OWT",), ("OWT",), ("OWT", "AV"), ("OWT",)],
    "anaerobic digestion": [("TM",), ("TM",), ("TM",), ("TM",), ("TM",)],
    "biogas": [("TM",), ("TM",), ("None",), ("None",), ("TM",)],
    "rice": [("AV",), ("OWT", "AV"), ("OWT",), ("None",), ("AV", "OWT")],
    "nitrogen": [("OWT", "TM", "AV"), ("OWT", "TM", "AV"), ("None",), ("None",), ("AV", "TM")],
}

EXPECTED_V1_COUNTS = {  # columns: OWT, TM, AV, None
    "manure": [5, 0, 0, 0],
    "anaerobic digestion": [0, 5, 0, 0],
    "biogas": [0, 3, 0, 2],
    "rice": [2, 0, 2, 1],
    "nitrogen": [2, 0, 1, 2],
}


def example_v1_matrix():
    terms = list(EXAMPLE_V1_ROWS)
    manifest = SampleManifest(
        sample_id="ex", seed=0, size=len(terms), ranking_digest="x", terms=terms
    )
    records = []
    for term, per_rater in EXAMPLE_V1_ROWS.items():
        for i, cats in enumerate(per_rater, start=1):
            records.append(
                AnnotationRecord(
                    rater_id=f"r{i}", term=term, schema="V1", v1_categories=cats
                )
            )
    return merge_raters(records, manifest)


def v2_matrix(assignments):
    """assignments: term -> list of (class, tags) in rater order r1..rn."""
    terms = list(assignments)
    manifest = SampleManifest(
        sample_id="m", seed=0, size=len(terms), ranking_digest="x", terms=terms
    )
    records = []
    for term, votes in assignments.items():
        for i, (cls, tags) in enumerate(votes, start=1):
            records.append(
                AnnotationRecord(
                    rater_id=f"r{i}",
                    term=term,
                    schema="V2",
                    v2_class=cls,
                    v2_tags=frozenset(tags),
                )
            )
    return merge_raters(records, manifest)


class TestMapLabels:
    def test_v1_primary_category_counts(self):
        counts = map_labels(example_v1_matrix(), "V1_primary_category")
        assert counts.categories == ("OWT", "TM", "AV", "None")
        by_term = dict(zip(counts.terms, counts.rows))
        for term, expected in EXPECTED_V1_COUNTS.items():
            assert by_term[term] == expected, term

    def test_binary_mapping_v2(self):
        matrix = v2_matrix({"x": [("Irrelevant", []), ("Irrelevant", []), ("Irrelevant", [])],
                            "y": [("VeryPertinent", ["TM"]), ("Pertinent", ["AV"]), ("Irrelevant", [])]})
        counts = map_labels(matrix, "binary_relevance")
        by_term = dict(zip(counts.terms, counts.rows))
        assert by_term["x"] == [0, 3]
        assert by_term["y"] == [2, 1]

    def test_mapping_schema_mismatch(self):
        with pytest.raises(TermlexError):
            map_labels(example_v1_matrix(), "V2_three_class")


class TestFleissKappa:
    def test_perfect_agreement(self):
        report = fleiss_kappa([[3, 0], [0, 3], [3, 0]])
        assert report.kappa == pytest.approx(1.0, abs=1e-12)

    def test_full_disagreement_two_by_two(self):
        report = fleiss_kappa([[1, 1], [1, 1]])
        assert report.kappa == pytest.approx(-1.0, abs=1e-12)

    def test_hand_evaluated_fixture(self):
        report = fleiss_kappa([[3, 0], [2, 1], [0, 3]])
        assert report.mean_agreement == pytest.approx(7 / 9, abs=1e-12)
        assert report.expected_agreement == pytest.approx(41 / 81, abs=1e-12)
        assert report.kappa == pytest.approx(0.55, abs=1e-12)

    def test_report_trace_invariants(self):
        report = fleiss_kappa([[3, 0], [2, 1], [0, 3]])
        for row, p_i in zip(report.counts, report.per_subject_agreement):
            n = report.n_raters
            assert p_i == pytest.approx((sum(c * c for c in row) - n) / (n * (n - 1)))
        assert -1.0 <= report.kappa <= 1.0

    def test_degenerate_unanimous_single_category(self):
        report = fleiss_kappa([[4, 0], [4, 0], [4, 0]])
        assert report.kappa == 1.0

    def test_errors(self):
        with pytest.raises(TermlexError):
            fleiss_kappa([[2, 0]])  # N < 2
        with pytest.raises(TermlexError):
            fleiss_kappa([[1, 0], [1, 0]])  # n < 2
        with pytest.raises(TermlexError):
            fleiss_kappa([[2, 0], [1, 0]])  # unequal row sums
        with pytest.raises(TermlexError):
            fleiss_kappa([[2, 0], [1, 1, 0]])  # ragged

    def test_matches_direct_oracle_sample(self):
        rng = random.Random(99)
        for _ in range(50):
            n_subjects = rng.randint(2, 30)
            k = rng.randint(2, 5)
            n = rng.randint(2, 6)
            rows = []
            for _ in range(n_subjects):
                row = [0] * k
                for _ in range(n):
                    row[rng.randrange(k)] += 1
                rows.append(row)
            expected = fleiss_kappa_direct(rows)
            assert fleiss_kappa(rows).kappa == pytest.approx(expected, abs=1e-12)

    def test_subject_and_category_permutation_invariance(self):
        rows = [[3, 1, 0], [0, 2, 2], [1, 1, 2], [4, 0, 0]]
        base = fleiss_kappa(rows).kappa
        assert fleiss_kappa(list(reversed(rows))).kappa == pytest.approx(base, abs=1e-12)
        permuted = [[row[2], row[0], row[1]] for row in rows]
        assert fleiss_kappa(permuted).kappa == pytest.approx(base, abs=1e-12)


class TestKappaSubsets:
    def clones_matrix(self):
        rng = random.Random(5)
        assignments = {}
        classes = ("VeryPertinent", "Pertinent", "Irrelevant")
        for i in range(12):
            term = f"t{i}"
            clone_class = classes[i % 3]
            clone_tags = ["TM"] if clone_class != "Irrelevant" else []
            votes = [(clone_class, clone_tags)] * 3
            for _ in ("r4", "r5"):
                cls = classes[(i + rng.randint(1, 2)) % 3]
                votes.append((cls, ["AV"] if cls != "Irrelevant" else []))
            assignments[term] = votes
        return v2_matrix(assignments)

    def test_full_size_subset_is_identity(self):
        matrix = self.clones_matrix()
        (subset, kappa), = kappa_subsets(matrix, "V2_three_class", 5)
        assert subset == tuple(matrix.raters)
        assert kappa == pytest.approx(
            agreement_for(matrix, "V2_three_class").kappa, abs=1e-12
        )

    def test_enumerates_ten_subsets_of_three(self):
        results = kappa_subsets(self.clones_matrix(), "V2_three_class", 3)
        assert len(results) == 10
        kappas = [k for _, k in results]
        assert kappas == sorted(kappas, reverse=True)

    def test_clone_subset_is_argmax_with_kappa_one(self):
        results = kappa_subsets(self.clones_matrix(), "V2_three_class", 3)
        best_subset, best_kappa = results[0]
        assert best_subset == ("r1", "r2", "r3")
        assert best_kappa == 1.0
        assert all(k < 1.0 for _, k in results[1:])


class TestPrecisionAtK:
    def ranked(self, n):
        return [
            RankedTerm(form=f"t{i}", c_value=0, tfidf=0, f_tfidf_c=0, rank=i)
            for i in range(1, n + 1)
        ]

    def gold_with_relevant(self, n, relevant_ranks):
        entries = {}
        for i in range(1, n + 1):
            if i in relevant_ranks:
                entries[f"t{i}"] = GoldEntry("Direct", frozenset({"TM"}))
            else:
                entries[f"t{i}"] = GoldEntry("Irrelevant", frozenset())
        return GoldLexicon(entries)

    def test_all_relevant_top5(self):
        curve = precision_at_k(self.ranked(10), self.gold_with_relevant(10, set(range(1, 11))), [5])
        assert curve.points == [(5, 1.0)]

    def test_hand_counted(self):
        curve = precision_at_k(self.ranked(10), self.gold_with_relevant(10, {1, 2, 5}), [5])
        assert curve.points == [(5, 0.6)]

    def test_indirect_counts_as_relevant(self):
        gold = GoldLexicon(
            {
                "t1": GoldEntry("Indirect", frozenset()),
                "t2": GoldEntry("Irrelevant", frozenset()),
            }
        )
        curve = precision_at_k(self.ranked(2), gold, [1, 2])
        assert curve.points == [(1, 1.0), (2, 0.5)]

    def test_missing_gold_term_is_error(self):
        gold = self.gold_with_relevant(3, {1})
        del gold.entries["t2"]
        with pytest.raises(TermlexError, match="t2"):
            precision_at_k(self.ranked(3), gold, [3])

    def test_k_beyond_ranking_is_error(self):
        with pytest.raises(TermlexError):
            precision_at_k(self.ranked(3), self.gold_with_relevant(3, set()), [4])

    def test_ks_must_increase(self):
        gold = self.gold_with_relevant(5, {1})
        with pytest.raises(TermlexError):
            precision_at_k(self.ranked(5), gold, [3, 3])
        with pytest.raises(TermlexError):
            precision_at_k(self.ranked(5), gold, [3, 2])

    def test_relabeling_below_k_does_not_change_pk(self):
        ranked = self.ranked(10)
        gold_a = self.gold_with_relevant(10, {1, 3, 9})
        gold_b = self.gold_with_relevant(10, {1, 3, 10})
        a = precision_at_k(ranked, gold_a, [5]).points
        b = precision_at_k(ranked, gold_b, [5]).points
        assert a == b

    def test_csv_output(self, tmp_path):
        curve = precision_at_k(self.ranked(10), self.gold_with_relevant(10, {1, 2, 5}), [5, 10])
        path = tmp_path / "curve.csv"
        save_precision_csv(curve, path)
        assert path.read_text(encoding="utf-8") == "k,precision\n5,0.6\n10,0.3\n"


def test_report_json_serializable():
    report = fleiss_kappa([[3, 0], [2, 1], [0, 3]], categories=("A", "B"))
    payload = json.loads(json.dumps(report.to_dict()))
    assert payload["kappa"] == pytest.approx(0.55)
    assert payload["counts"] == [[3, 0], [2, 1], [0, 3]]
