"""Inclusion-exclusion over collections of flats and flatness verdicts.

``delta`` computes the alternating sum of dimensions of all intersections
of a collection of flats.  ``check_flat`` searches collections for a
violation of delta >= dim(union); because the search is bounded, a clean
result is reported as "flat up to the bound" unless every collection of
every flat was enumerated, in which case it is "flat (exhaustive)".
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import EmptyCollection, GroundTooLarge, MatroidContractError
from .matroid import DEFAULT_VERIFY_BOUND, Flat, Matroid, canon

#: Default cap on |Sigma| in the violation search; the classic violations
#: need four flats.
DEFAULT_MAX_SIGMA = 4

#: Rough work budget for the collection search (number of subset terms);
#: beyond it the caller must sample.
DEFAULT_WORK_CAP = 5_000_000


def _as_flat_sets(m: Matroid, sigma: Iterable) -> list[frozenset[int]]:
    """Normalise a collection to distinct frozensets, canonically sorted."""
    sets = set()
    for member in sigma:
        if isinstance(member, Flat):
            sets.add(member.as_set())
        else:
            sets.add(frozenset(member))
    return sorted(sets, key=lambda s: (len(s), tuple(sorted(s))))


@dataclass(frozen=True)
class FlatCollection:
    """A set of distinct flats of one matroid, stored canonically."""

    flats: tuple[Flat, ...]

    @classmethod
    def of(cls, m: Matroid, sets: Iterable[Iterable[int]]) -> "FlatCollection":
        members = []
        for s in _as_flat_sets(m, sets):
            cl = m.closure(s)
            if cl != s:
                raise MatroidContractError(
                    f"{sorted(s)} is not closed (closure adds {sorted(cl - s)})"
                )
            members.append(Flat(canon(s), m.rank(s)))
        return cls(tuple(members))

    def __len__(self) -> int:
        return len(self.flats)

    def sets(self) -> list[frozenset[int]]:
        return [f.as_set() for f in self.flats]


@dataclass(frozen=True)
class FlatnessVerdict:
    """Outcome of the bounded flatness search.

    kind is one of "disintegrated", "not-flat", "flat-up-to",
    "flat-exhaustive".  For "not-flat" the witness collection and its
    delta / union dimension are included; for the flat verdicts ``bound``
    records how large the searched collections were.
    """

    kind: str
    bound: Optional[int] = None
    witness: Optional[FlatCollection] = None
    delta: Optional[int] = None
    union_dim: Optional[int] = None


def delta(m: Matroid, sigma: Iterable) -> int:
    """Alternating inclusion-exclusion sum of dimensions over ``sigma``.

    Duplicates are removed first (a collection is a set of flats); the
    result is permutation invariant by construction.
    """
    sets = _as_flat_sets(m, sigma)
    if not sets:
        raise EmptyCollection("delta needs at least one flat")
    k = len(sets)
    total = 0

    def rec(start: int, inter: Optional[frozenset[int]], size: int):
        nonlocal total
        for i in range(start, k):
            nxt = sets[i] if inter is None else inter & sets[i]
            sign = 1 if (size + 1) % 2 == 1 else -1
            total += sign * m.rank(nxt)
            rec(i + 1, nxt, size + 1)

    rec(0, None, 0)
    return total


def is_disintegrated(
    m: Matroid,
    max_ground: int = DEFAULT_VERIFY_BOUND,
    sample: Optional[int] = None,
    seed: int = 0,
) -> bool:
    """True iff closure of every set is the union of singleton closures.

    Computed both from the definition and from the absence of circuits of
    size >= 3; the two must agree on a valid matroid.
    """
    n = len(m.ground)
    elems = m.ground.elements
    cl_empty = m.closure(())
    singles = {e: m.closure((e,)) for e in elems}

    if n > max_ground:
        if sample is None:
            raise GroundTooLarge(f"ground has {n} elements; pass sample=")
        rng = random.Random(seed)
        universe = [
            frozenset(e for e in elems if rng.random() < 0.5) for _ in range(sample)
        ]
    else:
        universe = [
            frozenset(c)
            for size in range(n + 1)
            for c in combinations(elems, size)
        ]

    by_definition = True
    for a_set in universe:
        union = frozenset(cl_empty).union(*(singles[a] for a in a_set))
        if m.closure(a_set) != union:
            by_definition = False
            break

    by_circuits = not any(
        c.size >= 3 for c in m.circuits(min(len(elems), m.full_rank + 1))
    )
    if not sample and by_definition != by_circuits:
        raise MatroidContractError(
            "disintegration by definition and by circuit criterion disagree"
        )
    return by_definition


def check_flat(
    m: Matroid,
    max_collection_size: int = DEFAULT_MAX_SIGMA,
    exhaustive: bool = False,
    work_cap: int = DEFAULT_WORK_CAP,
    max_ground: int = DEFAULT_VERIFY_BOUND,
    sample: Optional[int] = None,
    seed: int = 0,
) -> FlatnessVerdict:
    """Search flat collections for a violation of delta >= dim(union).

    Returns "disintegrated" when the geometry is disintegrated, otherwise
    the lexicographically least violating collection (sizes ascending,
    flats in canonical order) or a flat verdict.  ``exhaustive`` widens the
    search to every collection of every flat; if the estimated work
    exceeds ``work_cap`` and no ``sample`` count is given, GroundTooLarge
    is raised.
    """
    if max_collection_size < 1:
        raise EmptyCollection("max_collection_size must be >= 1")
    if is_disintegrated(m, max_ground=max_ground, sample=sample, seed=seed):
        return FlatnessVerdict("disintegrated")

    flats = [f.as_set() for f in m.flats()]
    flats.sort(key=lambda s: tuple(sorted(s)))
    nflats = len(flats)
    top = nflats if exhaustive else min(max_collection_size, nflats)

    work = sum(comb(nflats, s) * (1 << s) for s in range(1, top + 1))
    if work > work_cap and sample is None:
        raise GroundTooLarge(
            f"{nflats} flats -> ~{work} subset terms exceeds work cap; "
            "pass sample= or lower the bound"
        )

    def violation(sigma: Sequence[frozenset[int]]) -> Optional[tuple[int, int]]:
        d = delta(m, sigma)
        u = m.rank(frozenset().union(*sigma))
        return (d, u) if d < u else None

    if work > work_cap:
        rng = random.Random(seed)
        for _ in range(sample):
            size = rng.randint(1, top)
            sigma = rng.sample(flats, min(size, nflats))
            hit = violation(sigma)
            if hit:
                return FlatnessVerdict(
                    "not-flat",
                    bound=top,
                    witness=FlatCollection.of(m, sigma),
                    delta=hit[0],
                    union_dim=hit[1],
                )
        return FlatnessVerdict("flat-up-to", bound=top)

    for size in range(1, top + 1):
        for sigma in combinations(flats, size):
            hit = violation(sigma)
            if hit:
                return FlatnessVerdict(
                    "not-flat",
                    bound=top,
                    witness=FlatCollection.of(m, sigma),
                    delta=hit[0],
                    union_dim=hit[1],
                )
    kind = "flat-exhaustive" if exhaustive else "flat-up-to"
    return FlatnessVerdict(kind, bound=top)
