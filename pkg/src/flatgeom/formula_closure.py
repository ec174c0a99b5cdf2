"""Formula-closures over structures carrying a compatible matroid.

A ``GeometricStructure`` is a finite universe with a matroid and one
designated m-ary relation phi whose tuples are circuits of size m; every
fiber of phi (fix all coordinates but one) has size below a declared
uniform bound K.  The closure of a set X under phi is built by repeatedly
adding every element completing an (m-1)-tuple from the current set to a
phi-tuple, in any coordinate position.

``EnumeratedStructure`` is the staged view: phi-tuples are revealed
monotonically stage by stage, and an exact count oracle says how many
members each fiber has in the limit.  A closure is *certified finite* at a
stage only when a fixpoint is reached with every queried fiber fully
revealed (revealed count equals oracle count); a fiber whose oracle count
exceeds everything revealed by the final stage is the scenario's contract
that growth continues beyond the horizon.  Divergence itself is declared
ground truth: the scenario lists seed sets whose closure is infinite in
the intended limit, and a set counts as divergent when its revealed-data
closure covers a seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvalidStructure, NotIndependent
from .matroid import Matroid

FiberKey = tuple[int, tuple[int, ...]]


def fiber_key(position: int, rest: Sequence[int]) -> FiberKey:
    return (position, tuple(rest))


@dataclass(frozen=True)
class GeometricStructure:
    """Finite structure: matroid + designated circuit relation + bound K."""

    matroid: Matroid
    phi: frozenset[tuple[int, ...]]
    arity: int
    fiber_bound: int

    @classmethod
    def of(
        cls,
        matroid: Matroid,
        phi: Iterable[Sequence[int]],
        fiber_bound: int,
    ) -> "GeometricStructure":
        tuples = frozenset(tuple(t) for t in phi)
        if not tuples:
            raise InvalidStructure("phi must be nonempty")
        arities = {len(t) for t in tuples}
        if len(arities) != 1:
            raise InvalidStructure("phi tuples must share one arity")
        g = cls(matroid, tuples, arities.pop(), fiber_bound)
        g.validate()
        return g

    @property
    def universe(self) -> tuple[int, ...]:
        return self.matroid.ground.elements

    @property
    def circuit_dim(self) -> int:
        """One less than the arity: the dimension of each phi-circuit."""
        return self.arity - 1

    def validate(self) -> None:
        if self.fiber_bound < 1:
            raise InvalidStructure("fiber bound K must be positive")
        m = self.arity
        ground = set(self.universe)
        for t in self.phi:
            if not set(t) <= ground:
                raise InvalidStructure(f"phi tuple {t} leaves the universe")
            s = frozenset(t)
            if len(s) != m:
                raise InvalidStructure(f"phi tuple {t} has repeated entries")
            if self.matroid.is_independent(s) or not all(
                self.matroid.is_independent(s - {e}) for e in s
            ):
                raise InvalidStructure(f"phi tuple {t} is not a circuit")
        for key, count in self.fiber_sizes().items():
            if count >= self.fiber_bound:
                raise InvalidStructure(
                    f"fiber {key} has {count} members, not below K={self.fiber_bound}"
                )

    def fiber_sizes(self) -> dict[FiberKey, int]:
        cached = getattr(self, "_fiber_sizes", None)
        if cached is not None:
            return cached
        sizes: dict[FiberKey, int] = {}
        for t in self.phi:
            for j in range(self.arity):
                key = fiber_key(j, t[:j] + t[j + 1 :])
                sizes[key] = sizes.get(key, 0) + 1
        object.__setattr__(self, "_fiber_sizes", sizes)
        return sizes


@dataclass(frozen=True)
class LambdaResult:
    """Strictly increasing chain of iterates plus how it ended.

    status "fixpoint" with index i means the i-th iterate equals the next
    one; "diverging" means the iteration budget ran out while still
    growing (possible only with a budget below the universe size, since
    the chain is monotone and bounded by the universe).
    """

    chain: tuple[frozenset[int], ...]
    status: str
    fixpoint_index: Optional[int] = None
    budget: Optional[int] = None

    @property
    def closure(self) -> frozenset[int]:
        return self.chain[-1]

    @property
    def growth_trace(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.chain)


def lambda_step(g: GeometricStructure, xi: Iterable[int]) -> frozenset[int]:
    """One closure step: add every phi-fiber member whose remaining
    coordinates all lie in ``xi``."""
    cur = frozenset(xi)
    out = set(cur)
    for t in g.phi:
        for j in range(g.arity):
            if all(t[l] in cur for l in range(g.arity) if l != j):
                out.add(t[j])
    return frozenset(out)


def lambda_closure(
    g: GeometricStructure, x: Iterable[int], budget: Optional[int] = None
) -> LambdaResult:
    """Iterate ``lambda_step`` to a fixpoint or to the budget.

    The default budget is the universe size: each non-final step adds at
    least one element and the chain is monotone, so a finite structure
    always reaches its fixpoint within that many steps.
    """
    if budget is None:
        budget = len(g.universe)
    if budget < 1:
        raise InvalidStructure("budget must be >= 1")
    chain = [frozenset(x)]
    for i in range(budget):
        nxt = lambda_step(g, chain[-1])
        if nxt == chain[-1]:
            return LambdaResult(tuple(chain), "fixpoint", fixpoint_index=i)
        chain.append(nxt)
    return LambdaResult(tuple(chain), "diverging", budget=budget)


# -- staged (enumerated) structures ----------------------------------------


@dataclass(frozen=True)
class EnumeratedStructure:
    """Staged revelation of a geometric structure with a count oracle.

    ``stages[s]`` is the cumulative set of phi-tuples revealed by stage
    s+1 (stages are 1-based externally); the final stage reveals exactly
    ``structure.phi``.  ``counts`` overrides the oracle for selected
    fibers; an override above the final revealed count is the contract
    that the fiber keeps growing beyond the horizon.  ``infinite_seeds``
    declares the ground truth: the limit closure of X is infinite exactly
    when the revealed-data closure of X contains one of the seeds.
    """

    structure: GeometricStructure
    stages: tuple[frozenset[tuple[int, ...]], ...]
    counts: Mapping[FiberKey, int] = field(default_factory=dict)
    infinite_seeds: tuple[frozenset[int], ...] = ()

    @classmethod
    def of(
        cls,
        structure: GeometricStructure,
        reveal: Sequence[Iterable[Sequence[int]]],
        counts: Optional[Mapping[FiberKey, int]] = None,
        infinite_seeds: Iterable[Iterable[int]] = (),
    ) -> "EnumeratedStructure":
        cumulative = []
        acc: frozenset[tuple[int, ...]] = frozenset()
        for batch in reveal:
            acc = acc | frozenset(tuple(t) for t in batch)
            cumulative.append(acc)
        g = cls(
            structure,
            tuple(cumulative),
            dict(counts or {}),
            tuple(frozenset(s) for s in infinite_seeds),
        )
        g.validate()
        return g

    @classmethod
    def complete(cls, structure: GeometricStructure) -> "EnumeratedStructure":
        """Wrap a finite structure as a single fully revealed stage with a
        truthful count oracle (no growth anywhere)."""
        return cls.of(structure, [sorted(structure.phi)])

    @property
    def final_stage(self) -> int:
        return len(self.stages)

    def validate(self) -> None:
        if not self.stages:
            raise InvalidStructure("at least one stage is required")
        for earlier, later in zip(self.stages, self.stages[1:]):
            if not earlier <= later:
                raise InvalidStructure("stage reveals must be monotone")
        if self.stages[-1] != self.structure.phi:
            raise InvalidStructure("final stage must reveal exactly phi")
        final_sizes = self.structure.fiber_sizes()
        for key, count in self.counts.items():
            revealed = final_sizes.get(key, 0)
            if count < revealed:
                raise InvalidStructure(
                    f"count override {key} below its revealed size"
                )
            if count >= self.structure.fiber_bound:
                raise InvalidStructure(
                    f"count override {key} violates the fiber bound"
                )

    def revealed(self, stage: int) -> frozenset[tuple[int, ...]]:
        if not 1 <= stage <= self.final_stage:
            raise InvalidStructure(f"stage {stage} out of range")
        return self.stages[stage - 1]

    def fiber_count(self, key: FiberKey) -> int:
        """Exact limit size of the fiber, per the count oracle."""
        override = self.counts.get(key)
        if override is not None:
            return override
        return self.structure.fiber_sizes().get(key, 0)

    def declared_infinite(self, x: Iterable[int]) -> bool:
        if not self.infinite_seeds:
            return False
        reach = revealed_closure(self, x, self.final_stage)
        return any(seed <= reach for seed in self.infinite_seeds)


def revealed_closure(
    enum: EnumeratedStructure, x: Iterable[int], stage: int
) -> frozenset[int]:
    """Plain fixpoint over the tuples revealed by the stage, with no
    completeness certification."""
    g = enum.structure
    revealed = enum.revealed(stage)
    cur = frozenset(x)
    while True:
        nxt = set(cur)
        for t in revealed:
            for j in range(g.arity):
                if all(t[l] in cur for l in range(g.arity) if l != j):
                    nxt.add(t[j])
        nxt = frozenset(nxt)
        if nxt == cur:
            return cur
        cur = nxt


@dataclass(frozen=True)
class CertifiedLambda:
    """Closure iteration against revealed data only.

    status "finite": a fixpoint was reached with every queried fiber fully
    revealed, so the closure is certified complete.  status "pending": an
    incomplete fiber blocks certification (more members are still to come
    at this stage, or forever if the stage is final).  status "budget":
    the iteration cap was hit while still growing.
    """

    status: str
    chain: tuple[frozenset[int], ...]
    blocking: tuple[FiberKey, ...] = ()


def certified_lambda(
    enum: EnumeratedStructure, x: Iterable[int], stage: int, budget: int
) -> CertifiedLambda:
    g = enum.structure
    revealed = enum.revealed(stage)
    rev_sizes: dict[FiberKey, int] = {}
    for t in revealed:
        for j in range(g.arity):
            key = fiber_key(j, t[:j] + t[j + 1 :])
            rev_sizes[key] = rev_sizes.get(key, 0) + 1
    limit_sizes = g.fiber_sizes()

    def limit_count(key: FiberKey) -> int:
        override = enum.counts.get(key)
        return override if override is not None else limit_sizes.get(key, 0)

    chain = [frozenset(x)]
    for _ in range(budget):
        cur = chain[-1]
        blocking = []
        for rest in product(sorted(cur), repeat=g.arity - 1):
            for j in range(g.arity):
                key = fiber_key(j, rest)
                if rev_sizes.get(key, 0) != limit_count(key):
                    blocking.append(key)
        if blocking:
            return CertifiedLambda("pending", tuple(chain), tuple(sorted(set(blocking))))
        nxt = set(cur)
        for t in revealed:
            for j in range(g.arity):
                if all(t[l] in cur for l in range(g.arity) if l != j):
                    nxt.add(t[j])
        nxt = frozenset(nxt)
        if nxt == cur:
            return CertifiedLambda("finite", tuple(chain))
        chain.append(nxt)
    return CertifiedLambda("budget", tuple(chain))


@dataclass(frozen=True)
class AclEnumeration:
    """Stagewise emission of elements certified algebraic over the base."""

    emitted: tuple[tuple[int, int], ...]  # (element, stage)
    status: str  # "complete" | "budget-exceeded"

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(e for e, _ in self.emitted)


def acl_enumerate_via_lambda(
    enum: EnumeratedStructure, bbar: Iterable[int], budget: int
) -> AclEnumeration:
    """Emit a at the first stage where the closure of bbar + {a} is
    certified finite by the count oracle.

    The emitted set is monotone in the stage by construction.  ``bbar``
    must be an independent tuple of size equal to the circuit dimension.
    """
    g = enum.structure
    base = frozenset(bbar)
    if len(base) != g.circuit_dim:
        raise InvalidStructure(
            f"bbar must have {g.circuit_dim} elements, got {len(base)}"
        )
    if not g.matroid.is_independent(base):
        raise NotIndependent("bbar must be independent")

    last = min(enum.final_stage, budget)
    iter_budget = len(g.universe)
    emitted: list[tuple[int, int]] = []
    done: set[int] = set()
    for stage in range(1, last + 1):
        for a in g.universe:
            if a in done:
                continue
            res = certified_lambda(enum, base | {a}, stage, iter_budget)
            if res.status == "finite":
                emitted.append((a, stage))
                done.add(a)
    status = "complete" if last == enum.final_stage else "budget-exceeded"
    return AclEnumeration(tuple(emitted), status)


@dataclass(frozen=True)
class IldEstimate:
    """Least dimension whose closure is certified to grow without bound.

    value None is the finite marker: every examined closure is certified
    finite.  certainty "certified" means the verdict rests on the count
    oracle plus the scenario's declared ground truth; "lower-bound-only"
    means the iteration budget cut the search short at that dimension.
    """

    value: Optional[int]
    certainty: str


def ild_estimate(
    enum: EnumeratedStructure,
    budget: Optional[int] = None,
    max_tuple_size: Optional[int] = None,
) -> IldEstimate:
    """Search sets by increasing matroid dimension for a certified-infinite
    closure.

    Sets of size up to ``max_tuple_size`` (default: the relation arity,
    which covers the independent seeds that drive growth) are bucketed by
    dimension and scanned in (size, lex) order.
    """
    g = enum.structure
    matroid = g.matroid
    if budget is None:
        budget = len(g.universe)
    cap = max_tuple_size if max_tuple_size is not None else g.arity

    buckets: dict[int, list[tuple[int, ...]]] = {}
    for size in range(cap + 1):
        for combo in combinations(g.universe, size):
            buckets.setdefault(matroid.rank(combo), []).append(combo)

    for dim in sorted(buckets):
        saw_budget = False
        for combo in buckets[dim]:
            res = certified_lambda(enum, combo, enum.final_stage, budget)
            if res.status == "pending" and enum.declared_infinite(combo):
                return IldEstimate(dim, "certified")
            if res.status == "budget":
                saw_budget = True
        if saw_budget:
            return IldEstimate(dim, "lower-bound-only")
    return IldEstimate(None, "certified")


# -- declared witness relations ---------------------------------------------


@dataclass(frozen=True)
class PsiRelation:
    """Explicit witness relation on z-tuples and w-tuples.

    ``isolates`` is a scenario declaration (the isolation property is not
    computable from the extension alone); the checker only confirms the
    designated pair actually satisfies the relation.
    """

    z_arity: int
    w_arity: int
    tuples: frozenset[tuple[int, ...]]
    fiber_bound: int
    isolates: bool = False

    def witnesses(self, z: Sequence[int]) -> list[tuple[int, ...]]:
        z = tuple(z)
        k = self.z_arity
        return sorted(t[k:] for t in self.tuples if t[:k] == z)


@dataclass(frozen=True)
class PsiReport:
    total: bool
    bounded: bool
    isolation_declared: bool
    holds_on_designated: bool
    first_total_violation: Optional[tuple[int, ...]] = None
    first_bound_violation: Optional[tuple[int, ...]] = None

    @property
    def ok(self) -> bool:
        return self.total and self.bounded and self.holds_on_designated


def psi_witness_check(
    g: GeometricStructure,
    psi: PsiRelation,
    xbar0: Sequence[int],
    xbar1: Sequence[int],
) -> PsiReport:
    """Validate a declared witness relation at finite scale.

    Checks totality (every z-tuple over the universe has a witness),
    boundedness (every fiber is below the declared bound), and that the
    designated pair satisfies psi.  Report-style; never raises.
    """
    for t in psi.tuples:
        if len(t) != psi.z_arity + psi.w_arity:
            raise InvalidStructure(f"psi tuple {t} has the wrong arity")

    total = True
    first_total = None
    bounded = True
    first_bound = None
    for z in product(g.universe, repeat=psi.z_arity):
        wits = psi.witnesses(z)
        if not wits:
            if total:
                total, first_total = False, z
        if len(wits) >= psi.fiber_bound:
            if bounded:
                bounded, first_bound = False, z
    designated = tuple(xbar0) + tuple(xbar1)
    holds = designated in psi.tuples
    return PsiReport(total, bounded, psi.isolates, holds, first_total, first_bound)
