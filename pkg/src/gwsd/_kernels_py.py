"""Pure-Python prime factorization kernel.

Operates on an integer code matrix given as a flat row-major sequence.  Codes
are dense per column and ordered so that the default pivot rule (least column,
then least code) is deterministic.  Returns the factor partition of the
column indices.
"""
from __future__ import annotations

from collections import Counter

BACKEND = "python"


def _proj(rows, cols):
    return {tuple(r[c] for c in cols) for r in rows}


def pivot_candidates(rows, live):
    n = len(rows)
    out = []
    for c in live:
        cnt = Counter(r[c] for r in rows)
        out.extend((c, v) for v in sorted(cnt) if 2 * cnt[v] <= n)
    return out


def _default_pivot(rows, live):
    n = len(rows)
    for c in live:
        cnt = Counter(r[c] for r in rows)
        for v in sorted(cnt):
            if 2 * cnt[v] <= n:
                return c, v
    raise AssertionError("no admissible pivot")


def _factor(rows, cols, pivot):
    out, live = [], []
    first = rows[0]
    for c in cols:
        v = first[c]
        if all(r[c] == v for r in rows):
            out.append([c])
        else:
            live.append(c)
    if not live:
        return out
    if pivot is None:
        a, v = _default_pivot(rows, live)
    else:
        a, v = pivot(pivot_candidates(rows, live))
    q = [r for r in rows if r[a] == v]
    n = len(rows)
    used = set()
    for f in _factor(q, live, pivot):
        if a in f:
            continue
        pf = _proj(rows, f)
        if pf != _proj(q, f):
            continue
        rest = [c for c in live if c not in f]
        if len(pf) * len(_proj(rows, rest)) == n:
            out.append(f)
            used.update(f)
    out.append([c for c in live if c not in used])
    return out


def prime_partition(codes, nrows: int, ncols: int, pivot=None) -> list:
    if nrows == 0 or ncols == 0:
        return [list(range(ncols))] if ncols else []
    rows = [tuple(codes[i * ncols:(i + 1) * ncols]) for i in range(nrows)]
    return _factor(rows, list(range(ncols)), pivot)
