# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled window-matching kernel. Reference semantics live in _match_py;
the two implementations must return identical span lists."""

from libc.stdlib cimport free, malloc

IMPLEMENTATION = "cython"


cdef class PatternTable:
    """Pattern inventory packed into C arrays, keys grouped by length."""

    cdef long long *keys
    cdef int *offsets
    cdef public int max_len

    def __cinit__(self, patterns):
        if not patterns:
            raise ValueError("patterns must be non-empty")
        cdef int max_len = 0
        for p in patterns:
            if len(p) > max_len:
                max_len = len(p)
        self.max_len = max_len

        groups = [[] for _ in range(max_len + 1)]
        cdef long long key
        cdef int i
        for p in patterns:
            key = 0
            for i, tag_id in enumerate(p):
                key |= (<long long> tag_id) << (4 * i)
            groups[len(p)].append(key)
        for g in groups:
            g.sort()

        cdef int total = 0
        for g in groups:
            total += len(g)
        self.keys = <long long *> malloc(total * sizeof(long long))
        self.offsets = <int *> malloc((max_len + 2) * sizeof(int))
        if self.keys == NULL or self.offsets == NULL:
            raise MemoryError()
        cdef int pos = 0
        cdef int length
        for length in range(max_len + 1):
            self.offsets[length] = pos
            for k in groups[length]:
                self.keys[pos] = k
                pos += 1
        self.offsets[max_len + 1] = pos

    def __dealloc__(self):
        if self.keys != NULL:
            free(self.keys)
        if self.offsets != NULL:
            free(self.offsets)


def compile_patterns(patterns):
    return PatternTable(patterns)


def match_spans(tags, alpha, PatternTable table):
    cdef int n = len(tags)
    if n == 0:
        return []
    cdef int *ctags = <int *> malloc(n * sizeof(int))
    cdef unsigned char *calpha = <unsigned char *> malloc(n * sizeof(unsigned char))
    if ctags == NULL or calpha == NULL:
        if ctags != NULL:
            free(ctags)
        if calpha != NULL:
            free(calpha)
        raise MemoryError()

    spans = []
    cdef int start, length, pos, i, j, lo, hi, limit
    cdef int max_len = table.max_len
    cdef long long key
    try:
        for i in range(n):
            ctags[i] = tags[i]
            calpha[i] = 1 if alpha[i] else 0
        for start in range(n):
            if not calpha[start]:
                continue
            key = 0
            limit = n - start
            if max_len < limit:
                limit = max_len
            for length in range(1, limit + 1):
                pos = start + length - 1
                if not calpha[pos]:
                    break
                key |= (<long long> ctags[pos]) << (4 * (length - 1))
                lo = table.offsets[length]
                hi = table.offsets[length + 1]
                for j in range(lo, hi):
                    if table.keys[j] == key:
                        spans.append((start, length))
                        break
    finally:
        free(ctags)
        free(calpha)
    return spans
