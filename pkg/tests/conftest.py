"""Shared fixtures: deterministic synthetic corpora."""

from __future__ import annotations

import csv
import random

import pytest

ADJECTIVES = [
    "anaerobic", "organic", "agricultural", "microbial", "thermal",
    "rural", "sustainable", "chemical", "biological", "solid",
]
NOUNS = [
    "compost", "manure", "digestion", "straw", "rice", "soil", "biogas",
    "sludge", "residue", "biomass", "nitrogen", "yield", "waste",
    "bagasse", "mulch", "effluent", "fertilizer", "recovery", "nutrient",
    "maize", "cattle", "slurry", "vermicompost", "husk", "litter",
]
PREPS = ["of", "in", "on", "for", "with"]
NOISE = [", a review", ": case study", "( 2021 )", "- part 2"]


def synth_title(rng: random.Random, noisy: bool = False) -> str:
    parts = []
    for _ in range(rng.randint(2, 4)):
        words = []
        if rng.random() < 0.5:
            words.append(rng.choice(ADJECTIVES))
        for _ in range(rng.randint(1, 2)):
            words.append(rng.choice(NOUNS))
        parts.append(" ".join(words))
    title = parts[0]
    for part in parts[1:]:
        title += f" {rng.choice(PREPS)} {part}"
    if rng.random() < 0.3:
        title = "The " + title
    if noisy and rng.random() < 0.4:
        title += rng.choice(NOISE)
    return title[0].upper() + title[1:]


def synth_corpus(n_titles: int, seed: int, noisy: bool = False) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    return [(f"d{i + 1}", synth_title(rng, noisy=noisy)) for i in range(n_titles)]


def write_reference_csv(path, rows: list[tuple[str, str]], seed: int = 0) -> None:
    """Reference-export CSV with title/authors/year/doi/type columns."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["title", "authors", "year", "doi", "url", "type"])
        for i, (_doc_id, title) in enumerate(rows):
            doi = f"10.1000/synth.{i}" if rng.random() < 0.6 else ""
            writer.writerow(
                [title, "Doe, J.; Roe, R.", str(rng.randint(1990, 2021)), doi, "", "article"]
            )


@pytest.fixture
def small_corpus_rows():
    return synth_corpus(40, seed=11, noisy=True)
