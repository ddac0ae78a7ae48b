"""Pure-Python window-matching kernel (fallback for the compiled twin).

Patterns are packed into integers, 4 bits per tag id, grouped by length.
match_spans reports every window of the tag sequence equal to a pattern,
skipping windows that include a token without alphabetic characters.
Spans come back ordered by (start, length); both kernel implementations
must return identical lists.
"""

IMPLEMENTATION = "python"


def compile_patterns(patterns):
    """Pre-pack a pattern inventory (lists of tag ids, each id < 16)."""
    if not patterns:
        raise ValueError("patterns must be non-empty")
    max_len = max(len(p) for p in patterns)
    by_len = [set() for _ in range(max_len + 1)]
    for pattern in patterns:
        key = 0
        for i, tag_id in enumerate(pattern):
            key |= tag_id << (4 * i)
        by_len[len(pattern)].add(key)
    return max_len, tuple(frozenset(s) for s in by_len)


def match_spans(tags, alpha, table):
    """All (start, length) windows of `tags` matching a compiled pattern.

    `alpha[i]` marks tokens carrying at least one alphabetic character;
    a window must consist solely of such tokens.
    """
    max_len, by_len = table
    n = len(tags)
    spans = []
    for start in range(n):
        if not alpha[start]:
            continue
        key = 0
        limit = min(max_len, n - start)
        for length in range(1, limit + 1):
            pos = start + length - 1
            if not alpha[pos]:
                break
            key |= tags[pos] << (4 * (length - 1))
            if key in by_len[length]:
                spans.append((start, length))
    return spans
