"""Shared fixtures and independent oracles.

The oracles here recompute expected values by brute force (coefficient
enumeration over prime fields, powerset scans) so the tests never trust
the code paths they are checking.
"""

from __future__ import annotations

from itertools import combinations, product

import pytest

from flatgeom import corpus


def brute_span(q: int, columns, subset) -> frozenset[int]:
    """Span membership over GF(q) by enumerating all coefficient tuples."""
    vecs = [columns[e] for e in sorted(subset)]
    dim = len(columns[0]) if columns else 0
    reachable = set()
    for coeffs in product(range(q), repeat=len(vecs)):
        acc = tuple(
            sum(c * v[i] for c, v in zip(coeffs, vecs)) % q for i in range(dim)
        )
        reachable.add(acc)
    return frozenset(
        e for e, col in enumerate(columns) if tuple(col) in reachable
    )


def brute_rank(q: int, columns, subset) -> int:
    """Rank by scanning all subsets for the largest coefficient-free one."""
    elems = sorted(subset)
    best = 0
    for r in range(len(elems), 0, -1):
        for combo in combinations(elems, r):
            if _brute_independent(q, columns, combo):
                return r
    return best


def _brute_independent(q, columns, combo) -> bool:
    vecs = [columns[e] for e in combo]
    dim = len(columns[0])
    for coeffs in product(range(q), repeat=len(vecs)):
        if all(c == 0 for c in coeffs):
            continue
        if all(
            sum(c * v[i] for c, v in zip(coeffs, vecs)) % q == 0
            for i in range(dim)
        ):
            return False
    return True


def powerset(iterable, min_size=0, max_size=None):
    items = list(iterable)
    if max_size is None:
        max_size = len(items)
    for size in range(min_size, max_size + 1):
        yield from combinations(items, size)


GF2_COLS = [
    (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1),
]


@pytest.fixture(scope="session")
def gf2():
    return corpus.gf2_3()


@pytest.fixture(scope="session")
def gf3():
    return corpus.gf3_3()


@pytest.fixture(scope="session")
def small_corpus():
    """Matroids small enough for exhaustive property scans."""
    names = [
        "gf2_3", "uniform_2_3", "uniform_2_4", "uniform_3_4", "uniform_3_5",
        "free_3", "u23_plus_2_free", "ct_u23", "three_planes", "pps_chain",
        "gf3_2",
    ]
    return {name: corpus.MATROIDS[name]() for name in names}
