import pytest

from termlex.annotations import (
    AnnotationRecord,
    GoldEntry,
    GoldLexicon,
    append_annotation,
    derive_gold,
    export_lexicon,
    load_gold,
    load_manifest,
    merge_raters,
    parse_annotations,
    sample_terms,
    save_gold,
    save_manifest,
    serialize_annotations,
)
from termlex.errors import InputFormatError, TermlexError
from termlex.ranking import RankedTerm


def ranked_list(n):
    return [
        RankedTerm(form=f"term {i:03d}", c_value=0.0, tfidf=0.0, f_tfidf_c=0.0, rank=i)
        for i in range(1, n + 1)
    ]


def v1(rater, term, *cats):
    return AnnotationRecord(rater_id=rater, term=term, schema="V1", v1_categories=cats)


def v2(rater, term, cls, *tags):
    return AnnotationRecord(
        rater_id=rater, term=term, schema="V2", v2_class=cls, v2_tags=frozenset(tags)
    )


class TestSampling:
    def test_exhaustive_sample_lists_all(self):
        ranked = ranked_list(7)
        manifest = sample_terms(ranked, size=7, seed=1)
        assert sorted(manifest.terms) == sorted(t.form for t in ranked)

    def test_same_seed_same_manifest(self):
        ranked = ranked_list(50)
        a = sample_terms(ranked, size=10, seed=42)
        b = sample_terms(ranked, size=10, seed=42)
        assert a == b

    def test_different_seeds_differ(self):
        ranked = ranked_list(200)
        a = sample_terms(ranked, size=20, seed=1)
        b = sample_terms(ranked, size=20, seed=2)
        assert a.terms != b.terms

    def test_sample_membership_and_distinctness(self):
        ranked = ranked_list(500)
        manifest = sample_terms(ranked, size=200, seed=42)
        forms = {t.form for t in ranked}
        assert len(set(manifest.terms)) == 200
        assert set(manifest.terms) <= forms

    def test_size_too_large(self):
        with pytest.raises(TermlexError):
            sample_terms(ranked_list(5), size=6, seed=0)

    def test_manifest_roundtrip(self, tmp_path):
        manifest = sample_terms(ranked_list(30), size=5, seed=9)
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        loaded = load_manifest(path)
        assert loaded == manifest
        save_manifest(loaded, tmp_path / "again.json")
        assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


class TestRecords:
    def test_v1_multi_category(self):
        record = v1("e1", "manure", "OWT", "TM", "AV")
        assert record.primary_category == "OWT"
        assert record.is_relevant()

    def test_v1_none_exclusive(self):
        record = v1("e3", "biogas", "None")
        assert not record.is_relevant()
        with pytest.raises(TermlexError, match="exclusive"):
            v1("e1", "x", "None", "TM")

    def test_v1_duplicates_rejected(self):
        with pytest.raises(TermlexError, match="duplicate"):
            v1("e1", "x", "TM", "TM")

    def test_v2_tags_iff_not_irrelevant(self):
        v2("e1", "x", "VeryPertinent", "TM")
        v2("e1", "x", "Irrelevant")
        with pytest.raises(TermlexError):
            v2("e1", "x", "Irrelevant", "TM")
        with pytest.raises(TermlexError):
            v2("e1", "x", "Pertinent")

    def test_unknown_labels(self):
        with pytest.raises(TermlexError):
            v1("e1", "x", "XYZ")
        with pytest.raises(TermlexError):
            v2("e1", "x", "Maybe", "TM")


class TestParsing:
    def test_parse_v1(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "rater_id,term,category1,category2,category3\n"
            "e1,manure,OWT,TM,AV\n"
            "e3,biogas,None,,\n",
            encoding="utf-8",
        )
        records = parse_annotations(path, "V1")
        assert records[0].v1_categories == ("OWT", "TM", "AV")
        assert records[1].v1_categories == ("None",)

    def test_parse_v1_none_position(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "rater_id,term,category1,category2,category3\ne1,x,TM,None,\n",
            encoding="utf-8",
        )
        with pytest.raises(InputFormatError, match="category1"):
            parse_annotations(path, "V1")

    def test_parse_v1_none_with_category(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "rater_id,term,category1,category2,category3\ne1,x,None,TM,\n",
            encoding="utf-8",
        )
        with pytest.raises(InputFormatError, match="line 2"):
            parse_annotations(path, "V1")

    def test_parse_duplicate_pair(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "rater_id,term,class,tags\ne1,x,Irrelevant,\ne1,x,Irrelevant,\n",
            encoding="utf-8",
        )
        with pytest.raises(InputFormatError, match="duplicate"):
            parse_annotations(path, "V2")

    def test_parse_v2(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "rater_id,term,class,tags\ne1,manure,VeryPertinent,OWT+TM\n",
            encoding="utf-8",
        )
        (record,) = parse_annotations(path, "V2")
        assert record.v2_class == "VeryPertinent"
        assert record.v2_tags == frozenset({"OWT", "TM"})

    def test_serialize_parse_serialize_bytes(self, tmp_path):
        v1_records = [v1("e1", "manure", "OWT", "TM"), v1("e2", "biogas", "None")]
        v2_records = [v2("e1", "manure", "VeryPertinent", "TM", "OWT"),
                      v2("e2", "slag", "Irrelevant")]
        for records, schema in ((v1_records, "V1"), (v2_records, "V2")):
            first = tmp_path / f"{schema}.csv"
            second = tmp_path / f"{schema}_again.csv"
            serialize_annotations(records, first)
            reparsed = parse_annotations(first, schema)
            assert reparsed == records
            serialize_annotations(reparsed, second)
            assert second.read_bytes() == first.read_bytes()

    def test_append_matches_serialize(self, tmp_path):
        records = [v2("e1", "manure", "VeryPertinent", "TM"), v2("e1", "slag", "Irrelevant")]
        whole = tmp_path / "whole.csv"
        serialize_annotations(records, whole)
        appended = tmp_path / "appended.csv"
        for record in records:
            append_annotation(record, appended)
        assert appended.read_bytes() == whole.read_bytes()


def manifest_of(*terms):
    from termlex.annotations import SampleManifest

    return SampleManifest(
        sample_id="t", seed=0, size=len(terms), ranking_digest="x", terms=list(terms)
    )


class TestMerge:
    def test_complete_matrix(self):
        manifest = manifest_of("a", "b")
        records = [
            v2("r2", "a", "Pertinent", "TM"), v2("r2", "b", "Irrelevant"),
            v2("r1", "b", "Irrelevant"), v2("r1", "a", "VeryPertinent", "TM"),
        ]
        matrix = merge_raters(records, manifest)
        assert matrix.raters == ["r1", "r2"]  # lexicographic
        assert matrix.terms == ["a", "b"]  # manifest order
        assert matrix.cells[("a", "r1")].v2_class == "VeryPertinent"

    def test_missing_cell_listed(self):
        manifest = manifest_of("a", "b")
        records = [
            v2("r1", "a", "Pertinent", "TM"), v2("r1", "b", "Irrelevant"),
            v2("r2", "a", "Pertinent", "TM"),
        ]
        with pytest.raises(TermlexError, match=r"\('b', 'r2'\)"):
            merge_raters(records, manifest)

    def test_single_rater_rejected(self):
        manifest = manifest_of("a")
        with pytest.raises(TermlexError, match="2 raters"):
            merge_raters([v2("r1", "a", "Irrelevant")], manifest)

    def test_term_not_in_manifest(self):
        manifest = manifest_of("a")
        with pytest.raises(TermlexError, match="manifest"):
            merge_raters([v2("r1", "zz", "Irrelevant")], manifest)

    def test_matrix_survives_file_roundtrip(self, tmp_path):
        manifest = manifest_of("a", "b")
        records = [
            v2("r1", "a", "VeryPertinent", "TM"), v2("r1", "b", "Irrelevant"),
            v2("r2", "a", "Pertinent", "AV"), v2("r2", "b", "Pertinent", "OWT"),
        ]
        matrix = merge_raters(records, manifest)
        reparsed = []
        for rater in matrix.raters:
            path = tmp_path / f"{rater}.csv"
            serialize_annotations(
                [matrix.cells[(t, rater)] for t in matrix.terms], path
            )
            reparsed.extend(parse_annotations(path, "V2"))
        assert merge_raters(reparsed, manifest) == matrix


class TestGold:
    def matrix(self, votes):
        manifest = manifest_of(*votes.keys())
        records = []
        for term, vote_list in votes.items():
            for i, (cls, tags) in enumerate(vote_list, start=1):
                records.append(v2(f"r{i}", term, cls, *tags))
        return merge_raters(records, manifest)

    def test_unanimity(self):
        matrix = self.matrix({"x": [("VeryPertinent", ["TM"])] * 3})
        gold = derive_gold(matrix)
        assert gold.entries["x"] == GoldEntry("Direct", frozenset({"TM"}))

    def test_three_way_tie_goes_pertinent(self):
        matrix = self.matrix(
            {"x": [("VeryPertinent", ["TM"]), ("Pertinent", ["AV"]), ("Irrelevant", [])]}
        )
        gold = derive_gold(matrix)
        assert gold.entries["x"].relevance == "Direct"
        assert gold.entries["x"].tags == frozenset({"TM"})  # consensus voters only

    def test_majority_beats_pertinence(self):
        matrix = self.matrix(
            {"x": [("Irrelevant", []), ("Irrelevant", []), ("VeryPertinent", ["TM"])]}
        )
        assert derive_gold(matrix).entries["x"].relevance == "Irrelevant"

    def test_verification_override_wins(self):
        matrix = self.matrix({"x": [("Irrelevant", [])] * 3})
        override = GoldLexicon({"x": GoldEntry("Indirect", frozenset({"AV"}))})
        gold = derive_gold(matrix, verification=override)
        assert gold.entries["x"] == GoldEntry("Indirect", frozenset({"AV"}))

    def test_rater_order_invariance(self):
        manifest = manifest_of("x", "y")
        records = [
            v2("r1", "x", "VeryPertinent", "OWT"), v2("r1", "y", "Irrelevant"),
            v2("r2", "x", "Pertinent", "TM"), v2("r2", "y", "Pertinent", "AV"),
            v2("r3", "x", "VeryPertinent", "AV"), v2("r3", "y", "Irrelevant"),
        ]
        gold_fwd = derive_gold(merge_raters(records, manifest))
        gold_rev = derive_gold(merge_raters(list(reversed(records)), manifest))
        assert gold_fwd == gold_rev

    def test_requires_v2(self):
        manifest = manifest_of("a")
        records = [v1("r1", "a", "TM"), v1("r2", "a", "TM")]
        matrix = merge_raters(records, manifest)
        with pytest.raises(TermlexError):
            derive_gold(matrix)


class TestLexiconExport:
    def test_routing(self, tmp_path):
        gold = GoldLexicon(
            {
                "sludge": GoldEntry("Direct", frozenset({"OWT"})),
                "anaerobic digestion": GoldEntry("Direct", frozenset({"TM"})),
                "nutrient recovery": GoldEntry("Indirect", frozenset()),
                "gray": GoldEntry("Irrelevant", frozenset()),
            }
        )
        paths = export_lexicon(gold, tmp_path)
        content = {name: path.read_text(encoding="utf-8") for name, path in paths.items()}
        assert "sludge" in content["part2_direct_owt"]
        assert "sludge" not in content["part3_direct_tm"]
        assert "anaerobic digestion" in content["part3_direct_tm"]
        assert "nutrient recovery" in content["part1_indirect"]
        for name in paths:
            assert "gray" not in content[name]

    def test_multi_tag_duplicated(self, tmp_path):
        gold = GoldLexicon({"manure": GoldEntry("Direct", frozenset({"OWT", "AV"}))})
        paths = export_lexicon(gold, tmp_path)
        assert "manure" in paths["part2_direct_owt"].read_text(encoding="utf-8")
        assert "manure" in paths["part4_direct_av"].read_text(encoding="utf-8")
        assert "manure" not in paths["part3_direct_tm"].read_text(encoding="utf-8")

    def test_partition_property(self, tmp_path):
        import csv as csv_mod
        import random

        rng = random.Random(7)
        entries = {}
        for i in range(100):
            relevance = rng.choice(["Direct", "Indirect", "Irrelevant"])
            tags = frozenset(rng.sample(["OWT", "TM", "AV"], rng.randint(1, 3)))
            if relevance == "Irrelevant":
                tags = frozenset()
            if relevance == "Indirect" and rng.random() < 0.5:
                tags = frozenset()
            entries[f"t{i}"] = GoldEntry(relevance, tags)
        gold = GoldLexicon(entries)
        paths = export_lexicon(gold, tmp_path)

        def terms_of(name):
            with open(paths[name], encoding="utf-8", newline="") as fh:
                rows = list(csv_mod.reader(fh))[1:]
            return {row[0] for row in rows}

        part1 = terms_of("part1_indirect")
        direct = terms_of("part2_direct_owt") | terms_of("part3_direct_tm") | terms_of(
            "part4_direct_av"
        )
        assert not part1 & direct
        exported = part1 | direct
        for term, entry in entries.items():
            assert (term in exported) == (entry.relevance != "Irrelevant")

    def test_gold_roundtrip(self, tmp_path):
        gold = GoldLexicon(
            {
                "a": GoldEntry("Direct", frozenset({"TM", "OWT"})),
                "b": GoldEntry("Indirect", frozenset()),
                "c": GoldEntry("Irrelevant", frozenset()),
            }
        )
        path = tmp_path / "gold.csv"
        save_gold(gold, path)
        assert load_gold(path) == gold
        save_gold(load_gold(path), tmp_path / "again.csv")
        assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()
