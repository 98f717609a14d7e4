"""Brute-force reference implementations, independent of the library.

These deliberately avoid numpy and the library's own ranking code so they
can serve as an oracle for it.
"""

import math


def brute_ranks(values):
    """Rank by explicit enumeration of 1-based sorted positions."""
    ordered = sorted(values)
    out = []
    for v in values:
        positions = [i + 1 for i, s in enumerate(ordered) if s == v]
        out.append(sum(positions) / len(positions))
    return out


def brute_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = math.sqrt(sum((a - mx) ** 2 for a in x))
    dy = math.sqrt(sum((b - my) ** 2 for b in y))
    return num / (dx * dy)


def brute_spearman(x, y):
    return brute_pearson(brute_ranks(x), brute_ranks(y))
