#!/usr/bin/env python3
"""Benchmark the compiled matching kernel against the pure-Python fallback.

Usage:
  python benchmarks/bench_kernels.py [--titles 20000] [--repeats 3] [--seed 7]

Generates a synthetic tagged corpus once, then times window matching over
all titles with each kernel implementation and reports the speedup. Both
kernels must produce identical span lists; the benchmark asserts that.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from termlex import _match_py  # noqa: E402
from termlex.extraction import DEFAULT_PATTERNS, _pattern_ids  # noqa: E402
from termlex.tagging import TAG_IDS, tag_title  # noqa: E402

try:
    from termlex import _match_cy
except ImportError:
    _match_cy = None


def build_corpus(n_titles: int, seed: int):
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
    from conftest import synth_corpus

    payloads = []
    for doc_id, title in synth_corpus(n_titles, seed=seed, noisy=True):
        tagged = tag_title(doc_id, title)
        tags = [TAG_IDS[t.tag] for t in tagged.tokens]
        alpha = [any(ch.isalpha() for ch in t.norm) for t in tagged.tokens]
        payloads.append((tags, alpha))
    return payloads


def run(impl, payloads, repeats: int):
    table = impl.compile_patterns(_pattern_ids(DEFAULT_PATTERNS))
    times = []
    spans_total = 0
    for _ in range(repeats):
        start = time.perf_counter()
        spans_total = 0
        for tags, alpha in payloads:
            spans_total += len(impl.match_spans(tags, alpha, table))
        times.append(time.perf_counter() - start)
    return min(times), statistics.mean(times), spans_total


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--titles", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    print(f"building corpus: {args.titles} titles (seed={args.seed}) ...")
    payloads = build_corpus(args.titles, args.seed)
    n_tokens = sum(len(tags) for tags, _ in payloads)
    print(f"  {n_tokens} tokens total")

    results = {}
    py_best, py_mean, py_spans = run(_match_py, payloads, args.repeats)
    results["python"] = (py_best, py_mean, py_spans)
    if _match_cy is not None:
        cy_best, cy_mean, cy_spans = run(_match_cy, payloads, args.repeats)
        results["cython"] = (cy_best, cy_mean, cy_spans)
        assert cy_spans == py_spans, "kernels disagree on span count"
        # spot-check full parity on a slice
        table_py = _match_py.compile_patterns(_pattern_ids(DEFAULT_PATTERNS))
        table_cy = _match_cy.compile_patterns(_pattern_ids(DEFAULT_PATTERNS))
        for tags, alpha in payloads[:500]:
            assert _match_py.match_spans(tags, alpha, table_py) == _match_cy.match_spans(
                tags, alpha, table_cy
            )

    print(f"\n{'kernel':<8} {'best (s)':>10} {'mean (s)':>10} {'spans':>10}")
    for name, (best, mean, spans) in results.items():
        print(f"{name:<8} {best:>10.4f} {mean:>10.4f} {spans:>10d}")
    if "cython" in results:
        speedup = results["python"][0] / results["cython"][0]
        print(f"\nspeedup (best-over-best): {speedup:.1f}x")
    else:
        print("\ncompiled kernel not available; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
