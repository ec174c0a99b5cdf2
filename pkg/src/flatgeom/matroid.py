"""Finite pregeometries (matroids) behind a rank/closure oracle.

A matroid is given by a ground set of small integer ids plus one of three
oracle families:

* ``LinearOracle`` - elements are column vectors over a prime field GF(q);
  rank is computed by Gaussian elimination and closure by span membership.
* ``UniformOracle`` - rank of A is min(|A|, k); closure of A is A itself
  while |A| < k and the whole ground set otherwise.
* ``ClosureTableOracle`` - an explicit, complete map from subsets to their
  closures.  Rank is recovered greedily from the closure operator.

All set-valued results are canonical (sorted tuples); "least" always means
least element id.  Every operation is a pure function of immutable inputs,
so instances are safe to share across threads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    GroundTooLarge,
    InvalidElement,
    InvalidStructure,
    NoLargeCircuit,
    NotIndependent,
)

#: Exhaustive axiom checks refuse ground sets bigger than this unless the
#: caller opts into sampling.  2**12 subsets is still desk scale.
DEFAULT_VERIFY_BOUND = 12


def canon(elements: Iterable[int]) -> tuple[int, ...]:
    """Canonical form of a subset: strictly increasing tuple of ids."""
    return tuple(sorted(set(elements)))


def _rank_mod_p(vectors: Sequence[Sequence[int]], q: int) -> int:
    """Rank of a list of vectors over GF(q) by Gaussian elimination."""
    rows = [[v % q for v in vec] for vec in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while col < ncols and rank < len(rows):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], q - 2, q)
        rows[rank] = [(x * inv) % q for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [(a - factor * b) % q for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class GroundSet:
    """Ordered ground set of distinct element ids.

    The id order is the total order used for all least-element
    tie-breaking.
    """

    elements: tuple[int, ...]
    labels: Optional[Mapping[int, str]] = None

    def __post_init__(self):
        elems = tuple(self.elements)
        if len(set(elems)) != len(elems):
            raise InvalidStructure("ground set ids must be distinct")
        if any(e < 0 for e in elems):
            raise InvalidStructure("ground set ids must be non-negative")
        object.__setattr__(self, "elements", tuple(sorted(elems)))

    def __contains__(self, e: int) -> bool:
        return e in set(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class LinearOracle:
    """Column vectors over the prime field GF(q), one per element id.

    Element ids are 0..len(columns)-1 in column order.
    """

    field: int
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not _is_prime(self.field):
            raise InvalidStructure(f"field order {self.field} is not prime")
        cols = tuple(tuple(c % self.field for c in col) for col in self.columns)
        if cols and len({len(c) for c in cols}) != 1:
            raise InvalidStructure("all columns must have the same length")
        object.__setattr__(self, "columns", cols)

    def rank(self, subset: frozenset[int]) -> int:
        return _rank_mod_p([self.columns[e] for e in subset], self.field)


@dataclass(frozen=True)
class UniformOracle:
    """Uniform matroid of the given rank: every k-subset is a basis."""

    rank_bound: int

    def __post_init__(self):
        if self.rank_bound < 0:
            raise InvalidStructure("uniform rank must be non-negative")


@dataclass(frozen=True)
class ClosureTableOracle:
    """Complete explicit closure table, keyed by canonical subsets.

    The table must contain an entry for every subset of the ground set;
    validity of the axioms is *not* assumed (``verify_pregeometry`` exists
    to check it), but lookups on missing keys are an input error.
    """

    table: Mapping[frozenset[int], frozenset[int]]

    def closure(self, subset: frozenset[int]) -> frozenset[int]:
        try:
            return self.table[subset]
        except KeyError:
            raise InvalidStructure(
                f"closure table has no entry for {sorted(subset)}"
            ) from None


Oracle = LinearOracle | UniformOracle | ClosureTableOracle


@dataclass(frozen=True)
class Flat:
    """A closed subset together with its dimension."""

    elements: tuple[int, ...]
    dim: int

    def as_set(self) -> frozenset[int]:
        return frozenset(self.elements)


@dataclass(frozen=True)
class Circuit:
    """A minimal dependent set: every proper subset is independent."""

    elements: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Violation:
    """First witness of a failed pregeometry axiom.

    ``a`` and ``b`` are the elements involved (``None`` where the axiom
    has fewer moving parts) and ``subset`` the base set A.
    """

    kind: str
    a: Optional[int]
    b: Optional[int]
    subset: tuple[int, ...]


@dataclass(frozen=True)
class PregeometryReport:
    ok: bool
    violation: Optional[Violation]
    subsets_checked: int
    sampled: bool


class Matroid:
    """Ground set plus oracle, with memoised rank and closure."""

    def __init__(self, ground: GroundSet, oracle: Oracle):
        self.ground = ground
        self.oracle = oracle
        self._ground_set = frozenset(ground.elements)
        self._rank_cache: dict[frozenset[int], int] = {}
        self._closure_cache: dict[frozenset[int], frozenset[int]] = {}
        if isinstance(oracle, LinearOracle):
            if len(oracle.columns) != len(ground.elements) or tuple(
                range(len(oracle.columns))
            ) != ground.elements:
                raise InvalidStructure(
                    "linear oracle requires ids 0..n-1, one column per element"
                )
        if isinstance(oracle, ClosureTableOracle):
            want = 1 << len(ground.elements)
            if len(oracle.table) != want:
                raise InvalidStructure(
                    f"closure table must list all {want} subsets, got {len(oracle.table)}"
                )

    # -- basic queries ---------------------------------------------------

    def _check(self, subset: Iterable[int]) -> frozenset[int]:
        s = frozenset(subset)
        bad = s - self._ground_set
        if bad:
            raise InvalidElement(f"element ids {sorted(bad)} not in ground set")
        return s

    def rank(self, subset: Iterable[int]) -> int:
        """Cardinality of any maximal independent subset of ``subset``."""
        s = self._check(subset)
        hit = self._rank_cache.get(s)
        if hit is not None:
            return hit
        oracle = self.oracle
        if isinstance(oracle, LinearOracle):
            r = oracle.rank(s)
        elif isinstance(oracle, UniformOracle):
            r = min(len(s), oracle.rank_bound)
        else:
            # Greedy basis extraction through the closure operator; valid
            # whenever the table satisfies the axioms.
            basis: list[int] = []
            for e in sorted(s):
                if e not in self.closure(basis):
                    basis.append(e)
            r = len(basis)
        self._rank_cache[s] = r
        return r

    def closure(self, subset: Iterable[int]) -> frozenset[int]:
        """The least closed set containing ``subset``."""
        s = self._check(subset)
        hit = self._closure_cache.get(s)
        if hit is not None:
            return hit
        oracle = self.oracle
        if isinstance(oracle, UniformOracle):
            cl = s if len(s) < oracle.rank_bound else self._ground_set
        elif isinstance(oracle, ClosureTableOracle):
            cl = frozenset(oracle.closure(s))
        else:
            r = self.rank(s)
            cl = frozenset(
                e for e in self.ground.elements if self.rank(s | {e}) == r
            )
        self._closure_cache[s] = cl
        return cl

    def closure_flat(self, subset: Iterable[int]) -> Flat:
        cl = self.closure(subset)
        return Flat(canon(cl), self.rank(cl))

    def dim(self, subset: Iterable[int]) -> int:
        return self.rank(subset)

    def is_independent(self, subset: Iterable[int]) -> bool:
        s = self._check(subset)
        return self.rank(s) == len(s)

    def independent_over(self, subset: Iterable[int], base: Iterable[int]) -> bool:
        """True iff every a in ``subset`` avoids cl(base + (subset - a))."""
        s = self._check(subset)
        b = self._check(base)
        return all(a not in self.closure((s - {a}) | b) for a in s)

    @property
    def full_rank(self) -> int:
        return self.rank(self._ground_set)

    # -- flats and circuits ----------------------------------------------

    def flats(self) -> list[Flat]:
        """All closed subsets, as closures of independent sets.

        Sorted by (size, elements); deterministic.
        """
        seen: set[frozenset[int]] = set()
        r = self.full_rank
        for size in range(r + 1):
            for combo in combinations(self.ground.elements, size):
                if self.is_independent(combo):
                    seen.add(self.closure(combo))
        flats = [Flat(canon(s), self.rank(s)) for s in seen]
        flats.sort(key=lambda f: (len(f.elements), f.elements))
        return flats

    def circuits(self, max_size: int) -> list[Circuit]:
        """All circuits of size <= max_size, in (size, lex) order."""
        if max_size < 1:
            raise InvalidStructure("max_size must be >= 1")
        found: list[Circuit] = []
        for size in range(1, max_size + 1):
            for combo in combinations(self.ground.elements, size):
                s = frozenset(combo)
                if self.is_independent(s):
                    continue
                if all(
                    self.is_independent(s - {e}) for e in combo
                ):
                    found.append(Circuit(canon(combo)))
        return found

    def smallest_circuit_param(self) -> tuple[int, int]:
        """(m, n) with m the size of the smallest circuit of size > 2 and
        n = m - 1.  Raises NoLargeCircuit when no such circuit exists."""
        limit = min(len(self.ground), self.full_rank + 1)
        for size in range(3, limit + 1):
            for combo in combinations(self.ground.elements, size):
                s = frozenset(combo)
                if not self.is_independent(s) and all(
                    self.is_independent(s - {e}) for e in combo
                ):
                    return size, size - 1
        raise NoLargeCircuit("all circuits have size <= 2")

    def carousel_check(
        self, abar: Iterable[int], bs: Sequence[int]
    ) -> bool:
        """Whether the closures of abar plus all-but-one of bs intersect in
        exactly cl(abar).

        ``bs`` must be independent over ``abar`` (checked; NotIndependent
        otherwise).  Holds on every valid pregeometry; exposed so it can be
        property-tested.
        """
        base = self._check(abar)
        tup = tuple(bs)
        if len(set(tup)) != len(tup):
            raise NotIndependent("bs contains repeats")
        if not self.independent_over(tup, base):
            raise NotIndependent("bs is not independent over abar")
        if not tup:
            return True
        inter: Optional[frozenset[int]] = None
        for i in range(len(tup)):
            dropped = base | (frozenset(tup) - {tup[i]})
            cl = self.closure(dropped)
            inter = cl if inter is None else inter & cl
        return inter == self.closure(base)

    # -- axiom verification ----------------------------------------------

    def verify_pregeometry(
        self,
        max_ground: int = DEFAULT_VERIFY_BOUND,
        sample: Optional[int] = None,
        seed: int = 0,
    ) -> PregeometryReport:
        """Exhaustively check extensivity, monotonicity, idempotence and
        exchange over all subsets.

        Grounds larger than ``max_ground`` require ``sample`` (number of
        random subsets to test) or GroundTooLarge is raised.  Returns the
        first violation found, in a deterministic scan order.
        """
        n = len(self.ground)
        elems = self.ground.elements
        sampled = False
        if n > max_ground:
            if sample is None:
                raise GroundTooLarge(
                    f"ground has {n} elements (> {max_ground}); pass sample="
                )
            rng = random.Random(seed)
            universe = [
                frozenset(e for e in elems if rng.random() < 0.5)
                for _ in range(sample)
            ]
            sampled = True
        else:
            universe = [
                frozenset(c)
                for size in range(n + 1)
                for c in combinations(elems, size)
            ]

        checked = 0
        for a_set in universe:
            checked += 1
            cl_a = self.closure(a_set)
            if not a_set <= cl_a:
                miss = min(a_set - cl_a)
                return PregeometryReport(
                    False, Violation("extensivity", miss, None, canon(a_set)), checked, sampled
                )
            cl_cl = self.closure(cl_a)
            if cl_cl != cl_a:
                wit = min(cl_cl ^ cl_a)
                return PregeometryReport(
                    False, Violation("idempotence", wit, None, canon(a_set)), checked, sampled
                )
            for b in elems:
                if b in a_set:
                    continue
                cl_ab = self.closure(a_set | {b})
                if not cl_a <= cl_ab:
                    wit = min(cl_a - cl_ab)
                    return PregeometryReport(
                        False, Violation("monotonicity", wit, b, canon(a_set)), checked, sampled
                    )
                for a in cl_ab - cl_a:
                    if a == b:
                        continue
                    if b not in self.closure(a_set | {a}):
                        return PregeometryReport(
                            False, Violation("exchange", a, b, canon(a_set)), checked, sampled
                        )
        return PregeometryReport(True, None, checked, sampled)


# -- convenience constructors ---------------------------------------------


def linear_matroid(
    field: int,
    columns: Sequence[Sequence[int]],
    labels: Optional[Mapping[int, str]] = None,
) -> Matroid:
    cols = tuple(tuple(c) for c in columns)
    ground = GroundSet(tuple(range(len(cols))), labels)
    return Matroid(ground, LinearOracle(field, cols))


def uniform_matroid(rank: int, size: int) -> Matroid:
    return Matroid(GroundSet(tuple(range(size))), UniformOracle(rank))


def free_matroid(size: int) -> Matroid:
    return uniform_matroid(size, size)


def closure_table_matroid(
    size: int, table: Mapping[frozenset[int], frozenset[int]]
) -> Matroid:
    return Matroid(
        GroundSet(tuple(range(size))),
        ClosureTableOracle(dict(table)),
    )


def table_from_matroid(m: Matroid) -> dict[frozenset[int], frozenset[int]]:
    """Materialise any (small) matroid as a complete closure table."""
    n = len(m.ground)
    if n > DEFAULT_VERIFY_BOUND:
        raise GroundTooLarge(f"refusing to tabulate 2**{n} subsets")
    out: dict[frozenset[int], frozenset[int]] = {}
    for size in range(n + 1):
        for combo in combinations(m.ground.elements, size):
            s = frozenset(combo)
            out[s] = m.closure(s)
    return out


def sparse_paving_matroid(
    size: int, rank: int, nonbases: Iterable[Iterable[int]]
) -> Matroid:
    """Rank-r sparse paving matroid on ids 0..size-1.

    ``nonbases`` are r-sets declared dependent (circuit-hyperplanes); any
    two must intersect in at most r-2 elements.  Every other set of size
    <= r is independent.  Returned as an explicit closure table.
    """
    nb = [frozenset(s) for s in nonbases]
    for s in nb:
        if len(s) != rank:
            raise InvalidStructure("nonbases must have exactly `rank` elements")
    for i in range(len(nb)):
        for j in range(i + 1, len(nb)):
            if len(nb[i] & nb[j]) > rank - 2:
                raise InvalidStructure(
                    "sparse paving requires pairwise nonbasis intersections <= rank-2"
                )
    ground = tuple(range(size))

    def rk(s: frozenset[int]) -> int:
        if len(s) < rank:
            return len(s)
        if len(s) == rank:
            return rank - 1 if s in set(nb) else rank
        return rank

    table: dict[frozenset[int], frozenset[int]] = {}
    for sz in range(size + 1):
        for combo in combinations(ground, sz):
            s = frozenset(combo)
            r = rk(s)
            table[s] = frozenset(e for e in ground if rk(s | {e}) == r)
    return closure_table_matroid(size, table)
