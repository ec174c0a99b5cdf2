"""Stage-faithful simulation of the recursive-copy construction.

The simulator builds a copy B of a target subset M of a finite relational
structure N, guided by a stagewise membership approximation M_s (each
element flips finitely often, the limit is M) and a monotone enumeration
A_s of a designated subset A of M.  At each stage, if every copied image
currently looks like a member of M, the least uncopied apparent member is
copied and one more signature symbol is revealed; otherwise the run waits
until either the approximation changes on the copied range, or an element
of A plus a replacement tuple lets the offending images be remapped while
preserving every atomic fact committed so far.

Committed facts are permanent: they are pulled back from N when an element
or symbol is added, and any later remap must respect them.  That is what
makes the limit map an isomorphism onto the substructure on M.

A run that reaches the horizon with an unresolved wait reports "stuck";
it is a diagnostic that the scenario broke its witness contract, not a
tool error.
"""

from __future__ import annotations

from collections.abc import Mapping as MappingABC
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import IncoherentSchedule, InvalidStructure, MatroidContractError, NotExtendable
from .matroid import Matroid, canon


@dataclass(frozen=True)
class Relation:
    arity: int
    tuples: frozenset[tuple[int, ...]]

    def holds(self, args: Sequence[int]) -> bool:
        return tuple(args) in self.tuples


@dataclass(frozen=True)
class RelationalStructure:
    universe: tuple[int, ...]
    relations: Mapping[str, Relation]

    def __post_init__(self):
        ground = set(self.universe)
        for name, rel in self.relations.items():
            for t in rel.tuples:
                if len(t) != rel.arity:
                    raise InvalidStructure(f"{name} tuple {t} has wrong arity")
                if not set(t) <= ground:
                    raise InvalidStructure(f"{name} tuple {t} leaves the universe")

    @classmethod
    def of(
        cls, universe: Iterable[int], relations: Mapping[str, tuple[int, Iterable[Sequence[int]]]]
    ) -> "RelationalStructure":
        rels = {
            name: Relation(arity, frozenset(tuple(t) for t in tuples))
            for name, (arity, tuples) in relations.items()
        }
        return cls(canon(universe), rels)


@dataclass(frozen=True)
class StagewisePresentation:
    """Structure plus the order in which its symbols are revealed.

    ``matroid`` is the geometric view when one exists (needed by the
    closure-approximation generator); plain relational scenarios leave it
    unset.
    """

    structure: RelationalStructure
    signature_order: tuple[str, ...]
    matroid: Optional[Matroid] = None

    def __post_init__(self):
        if sorted(self.signature_order) != sorted(self.structure.relations):
            raise InvalidStructure("signature order must list each symbol once")


@dataclass(frozen=True)
class FlipEvent:
    elem: int
    stage: int
    value: bool  # membership after the flip


@dataclass(frozen=True)
class Delta2Schedule:
    """Stagewise approximation of a target set.

    Before its first event an element's membership is the opposite of that
    event's value; with no events it is the limit membership.  The last
    event of each element must agree with the target.
    """

    target: frozenset[int]
    flips: tuple[FlipEvent, ...]
    max_flips_per_element: int = 3

    def validate(self) -> None:
        per_elem: dict[int, list[FlipEvent]] = {}
        for ev in self.flips:
            if ev.stage < 1:
                raise IncoherentSchedule("flip stages start at 1")
            per_elem.setdefault(ev.elem, []).append(ev)
        for elem, events in per_elem.items():
            stages = [ev.stage for ev in events]
            if len(set(stages)) != len(stages) or stages != sorted(stages):
                raise IncoherentSchedule(f"element {elem} flips out of order")
            if len(events) > self.max_flips_per_element:
                raise IncoherentSchedule(
                    f"element {elem} exceeds its flip budget"
                )
            for prev, nxt in zip(events, events[1:]):
                if prev.value == nxt.value:
                    raise IncoherentSchedule(
                        f"element {elem} has consecutive flips to the same state"
                    )
            if events[-1].value != (elem in self.target):
                raise IncoherentSchedule(
                    f"element {elem} does not settle on its target membership"
                )

    def last_flip_stage(self) -> int:
        return max((ev.stage for ev in self.flips), default=0)

    def member_at(self, elem: int, stage: int) -> bool:
        state = None
        first = None
        for ev in self.flips:
            if ev.elem != elem:
                continue
            if first is None:
                first = ev
            if ev.stage <= stage:
                state = ev.value
        if state is not None:
            return state
        if first is not None:
            return not first.value
        return elem in self.target


@dataclass(frozen=True)
class Sigma1Schedule:
    """Monotone stagewise enumeration of a subset A."""

    entries: tuple[tuple[int, int], ...]  # (element, entry stage)

    @classmethod
    def of(cls, staged: Mapping[int, int] | Iterable[tuple[int, int]]) -> "Sigma1Schedule":
        items = staged.items() if isinstance(staged, MappingABC) else staged
        entries = sorted(((int(e), int(s)) for e, s in items), key=lambda p: (p[1], p[0]))
        return cls(tuple(entries))

    def validate(self) -> None:
        elems = [e for e, _ in self.entries]
        if len(set(elems)) != len(elems):
            raise IncoherentSchedule("an element enters A twice")
        if any(s < 1 for _, s in self.entries):
            raise IncoherentSchedule("A stages start at 1")

    @property
    def target(self) -> frozenset[int]:
        return frozenset(e for e, _ in self.entries)

    def last_stage(self) -> int:
        return max((s for _, s in self.entries), default=0)

    def at(self, stage: int) -> list[int]:
        """Elements enumerated by the stage, in enumeration order."""
        return [e for e, s in self.entries if s <= stage]


@dataclass(frozen=True)
class StageRecord:
    stage: int
    event: str  # "extend" | "wait" | "outcome1" | "outcome2"
    b_size: int
    symbols: tuple[str, ...]
    images: tuple[int, ...]  # f_s(x) for x = 0..b_size-1, post-stage
    copied: Optional[int] = None  # extend: the copied N-element
    witness: Optional[int] = None  # outcome2: the A-element used
    replacements: tuple[int, ...] = ()  # outcome2: images given to the rest


@dataclass(frozen=True)
class ConstructionTrace:
    presentation: StagewisePresentation
    membership: Delta2Schedule
    enumeration: Sigma1Schedule
    horizon: int
    records: tuple[StageRecord, ...]
    status: str  # "completed" | "stuck"
    stuck_stage: Optional[int] = None
    facts: Mapping[tuple[str, tuple[int, ...]], bool] = field(default_factory=dict)
    limit_map: tuple[int, ...] = ()
    stabilization: tuple[int, ...] = ()  # last stage each image changed
    longest_wait: int = 0

    def corrected_member(self, elem: int, stage: int) -> bool:
        """Membership after forcing enumerated A-elements in."""
        if any(e == elem and s <= stage for e, s in self.enumeration.entries):
            return True
        return self.membership.member_at(elem, stage)


def _corrected_members(
    universe: Sequence[int],
    membership: Delta2Schedule,
    enumeration: Sigma1Schedule,
    stage: int,
) -> frozenset[int]:
    in_a = set(enumeration.at(stage))
    return frozenset(
        e for e in universe if e in in_a or membership.member_at(e, stage)
    )


def going_down_run(
    presentation: StagewisePresentation,
    membership: Delta2Schedule,
    enumeration: Sigma1Schedule,
    horizon: int,
) -> ConstructionTrace:
    """Execute the construction for ``horizon`` stages and return the trace.

    Schedules are validated and made coherent first: an element counts as
    a member from the stage it enters A onward.  The horizon must lie past
    the last scripted flip and the last A entry.
    """
    membership.validate()
    enumeration.validate()
    structure = presentation.structure
    universe = structure.universe
    if not enumeration.target <= membership.target:
        raise IncoherentSchedule("A must be a subset of the target set")
    if not membership.target <= set(universe):
        raise IncoherentSchedule("target leaves the universe")
    if horizon <= max(membership.last_flip_stage(), enumeration.last_stage()):
        raise IncoherentSchedule("horizon must lie past all scripted events")
    if len(presentation.signature_order) > len(membership.target):
        raise IncoherentSchedule(
            "signature has more symbols than extension steps available"
        )

    m_at = {
        s: _corrected_members(universe, membership, enumeration, s)
        for s in range(1, horizon + 1)
    }

    images: list[int] = []  # images[b] = f(b)
    symbols: list[str] = []
    facts: dict[tuple[str, tuple[int, ...]], bool] = {}
    records: list[StageRecord] = []
    last_change: dict[int, int] = {}

    waiting = False
    wait_from = 0
    ref_ran: frozenset[int] = frozenset()
    ref_inter: frozenset[int] = frozenset()
    z = -1
    out_pre: list[int] = []  # preimages of the dropped elements, z's first
    longest_wait = 0

    def commit_new_symbol(sym: str) -> None:
        rel = structure.relations[sym]
        size = len(images)
        for tup in product(range(size), repeat=rel.arity):
            facts[(sym, tup)] = rel.holds(tuple(images[b] for b in tup))

    def commit_new_element(new_b: int) -> None:
        for sym in symbols:
            rel = structure.relations[sym]
            for tup in product(range(len(images)), repeat=rel.arity):
                if new_b in tup and (sym, tup) not in facts:
                    facts[(sym, tup)] = rel.holds(tuple(images[b] for b in tup))

    def embedding_ok(candidate: Sequence[int]) -> bool:
        if len(set(candidate)) != len(candidate):
            return False
        for (sym, tup), val in facts.items():
            rel = structure.relations[sym]
            if rel.holds(tuple(candidate[b] for b in tup)) != val:
                return False
        return True

    def try_outcome2(stage: int) -> Optional[tuple[int, tuple[int, ...]]]:
        kept = [images[b] for b in range(len(images)) if b not in out_pre]
        a_pool = [a for a in enumeration.at(stage) if a not in kept]
        rest_pre = out_pre[1:]
        for a in a_pool:
            for repl in product(universe, repeat=len(rest_pre)):
                candidate = list(images)
                candidate[out_pre[0]] = a
                for b, y in zip(rest_pre, repl):
                    candidate[b] = y
                if embedding_ok(candidate):
                    return a, tuple(repl)
        return None

    def apply_outcome2(stage: int, a: int, repl: tuple[int, ...]) -> None:
        images[out_pre[0]] = a
        last_change[out_pre[0]] = stage
        for b, y in zip(out_pre[1:], repl):
            images[b] = y
            last_change[b] = stage
        records.append(
            StageRecord(
                stage, "outcome2", len(images), tuple(symbols), tuple(images),
                witness=a, replacements=repl,
            )
        )

    for stage in range(1, horizon + 1):
        members = m_at[stage]
        if waiting:
            if frozenset(ref_ran) & members != ref_inter:
                waiting = False
                longest_wait = max(longest_wait, stage - wait_from)
                records.append(
                    StageRecord(stage, "outcome1", len(images), tuple(symbols), tuple(images))
                )
                continue
            hit = try_outcome2(stage)
            if hit is not None:
                waiting = False
                longest_wait = max(longest_wait, stage - wait_from)
                apply_outcome2(stage, *hit)
                continue
            records.append(
                StageRecord(stage, "wait", len(images), tuple(symbols), tuple(images))
            )
            continue

        ran = set(images)
        if ran <= members:
            fresh = sorted(members - ran)
            if not fresh:
                records.append(
                    StageRecord(stage, "wait", len(images), tuple(symbols), tuple(images))
                )
                continue
            y = fresh[0]
            new_b = len(images)
            images.append(y)
            last_change[new_b] = stage
            if len(symbols) < len(presentation.signature_order):
                sym = presentation.signature_order[len(symbols)]
                symbols.append(sym)
                commit_new_symbol(sym)
            commit_new_element(new_b)
            records.append(
                StageRecord(
                    stage, "extend", len(images), tuple(symbols), tuple(images), copied=y
                )
            )
            continue

        # Some image dropped out of the approximation: freeze and wait.
        dropped = sorted(ran - members)
        z = dropped[0]
        out_set = set(dropped)
        out_pre = sorted(
            (b for b in range(len(images)) if images[b] in out_set),
            key=lambda b: (images[b] != z, images[b]),
        )
        ref_ran = frozenset(ran)
        ref_inter = frozenset(ran) & members
        waiting = True
        wait_from = stage
        hit = try_outcome2(stage)
        if hit is not None:
            waiting = False
            apply_outcome2(stage, *hit)
        else:
            records.append(
                StageRecord(stage, "wait", len(images), tuple(symbols), tuple(images))
            )

    status = "stuck" if waiting else "completed"
    return ConstructionTrace(
        presentation=presentation,
        membership=membership,
        enumeration=enumeration,
        horizon=horizon,
        records=tuple(records),
        status=status,
        stuck_stage=wait_from if waiting else None,
        facts=facts,
        limit_map=tuple(images),
        stabilization=tuple(last_change[b] for b in range(len(images))),
        longest_wait=longest_wait,
    )


@dataclass(frozen=True)
class TraceReport:
    stabilized: bool
    permanence: bool
    isomorphism: bool
    surjective: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.stabilized and self.permanence and self.isomorphism and self.surjective


def trace_verify(trace: ConstructionTrace, target: Iterable[int]) -> TraceReport:
    """Check a completed trace against the intended limit set.

    (a) every image stabilized on a member of the target, (b) an image
    never moves after landing in A, (c) the committed atomic diagram
    matches the induced substructure on the target under the limit map,
    over the full signature, (d) the limit map is onto the target.
    """
    m_set = frozenset(target)
    structure = trace.presentation.structure
    if trace.status != "completed":
        return TraceReport(False, False, False, False, f"run {trace.status}")

    stabilized = all(y in m_set for y in trace.limit_map)
    detail = "" if stabilized else "an image settled outside the target"

    permanence = True
    prev: Optional[StageRecord] = None
    for rec in trace.records:
        if prev is not None:
            entered = {
                e for e, s in trace.enumeration.entries if s <= prev.stage
            }
            for b in range(prev.b_size):
                if prev.images[b] in entered and rec.images[b] != prev.images[b]:
                    permanence = False
                    detail = detail or f"image of {b} moved after joining A at stage {rec.stage}"
        prev = rec

    injective = len(set(trace.limit_map)) == len(trace.limit_map)
    symbols_done = (
        len(trace.records) > 0
        and set(trace.records[-1].symbols) == set(trace.presentation.signature_order)
    )
    diagram_ok = True
    for (sym, tup), val in trace.facts.items():
        rel = structure.relations[sym]
        if rel.holds(tuple(trace.limit_map[b] for b in tup)) != val:
            diagram_ok = False
            detail = detail or f"fact {sym}{tup} disagrees under the limit map"
            break
    isomorphism = injective and symbols_done and diagram_ok
    if not symbols_done:
        detail = detail or "signature was not fully revealed"

    surjective = frozenset(trace.limit_map) == m_set
    if not surjective:
        detail = detail or "limit map is not onto the target"
    return TraceReport(stabilized, permanence, isomorphism, surjective, detail)


def delta2_acl_schedule(
    presentation: StagewisePresentation,
    bbar: Iterable[int],
    delay_script: Mapping[int, Sequence[int]] | None = None,
    max_flips_per_element: int = 3,
) -> Delta2Schedule:
    """Build a membership approximation whose limit is the closure of bbar.

    Membership truth is computed twice: directly, and through the exchange
    characterisation against a basis extension c_1..c_k (x belongs iff no
    c_i falls into the closure of bbar + x + earlier c's); the two must
    agree.  The delay script only schedules flip stages per element; the
    limit is script-independent.  An element with r scripted stages
    toggles r times and starts on the opposite parity, so it always
    settles on the truth.
    """
    m = presentation.matroid
    if m is None:
        raise InvalidStructure("presentation carries no matroid")
    base = frozenset(bbar)
    if not m.is_independent(base):
        raise NotExtendable("bbar is dependent, cannot extend to a basis")

    cs: list[int] = []
    for e in m.ground.elements:
        if e not in m.closure(base | frozenset(cs)):
            cs.append(e)

    target = m.closure(base)
    for x in m.ground.elements:
        direct = x in target
        via_exchange = all(
            cs[i] not in m.closure(base | {x} | frozenset(cs[:i]))
            for i in range(len(cs))
        )
        if direct != via_exchange:
            raise MatroidContractError(
                "closure membership and exchange characterisation disagree"
            )

    flips: list[FlipEvent] = []
    script = delay_script or {}
    for x, stages in sorted(script.items()):
        stages = sorted(stages)
        if len(stages) != len(set(stages)):
            raise IncoherentSchedule(f"element {x} has duplicate script stages")
        truth = x in target
        for i, s in enumerate(stages):
            # Last flip lands on the truth; earlier ones alternate back.
            value = truth if (len(stages) - 1 - i) % 2 == 0 else not truth
            flips.append(FlipEvent(x, s, value))
    flips.sort(key=lambda ev: (ev.stage, ev.elem))
    sched = Delta2Schedule(target, tuple(flips), max_flips_per_element)
    sched.validate()
    return sched
