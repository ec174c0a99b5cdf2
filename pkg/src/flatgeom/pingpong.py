"""Ping-pong sequences: generation, verification and cycle search.

A configuration is a net X, two paddles a1, a2 independent over X, and a
start t1 outside cl(X + {a1, a2}).  Step i extends the sequence by some
t inside cl(X + {a_j, t_i}) but outside cl(X + {a_j}), distinct from t_i,
where the paddle alternates with the parity of i (step 1 uses a1).

In a flat geometry such sequences never repeat an element, so in a finite
flat geometry they terminate; a repeat (cycle) certifies non-flatness.
The element choices are made explicit here: the "least" strategy always
takes the smallest candidate id, "all-branches" explores the whole tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .errors import InvalidConfig, InvalidElement, InvalidSequence
from .matroid import Matroid, canon


@dataclass(frozen=True)
class PPSConfig:
    """Net, paddles and starting element of a ping-pong sequence."""

    net: tuple[int, ...]
    a1: int
    a2: int
    t1: int

    @classmethod
    def of(cls, net: Iterable[int], a1: int, a2: int, t1: int) -> "PPSConfig":
        return cls(canon(net), a1, a2, t1)

    def validate(self, m: Matroid) -> None:
        x = frozenset(self.net)
        if self.a1 == self.a2:
            raise InvalidConfig("paddles must be distinct")
        if not m.independent_over((self.a1, self.a2), x):
            raise InvalidConfig("paddles are not independent over the net")
        if self.t1 in m.closure(x | {self.a1, self.a2}):
            raise InvalidConfig("t1 lies in the closure of net and paddles")

    def paddle(self, i: int) -> int:
        """Element used at step i (1-based); step 1 hits with a1."""
        return self.a1 if i % 2 == 1 else self.a2


@dataclass(frozen=True)
class PPSSequence:
    config: PPSConfig
    ts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ts)


@dataclass(frozen=True)
class PPSRun:
    """A maximal sequence plus how it stopped.

    status is "terminated" (no legal successor), "cycle" (the chosen
    successor equals an earlier element; it is still appended, and
    ``repeat_index`` is the 1-based position of the earlier occurrence),
    or "budget" (length cap reached with candidates remaining).
    """

    sequence: PPSSequence
    status: str
    repeat_index: Optional[int] = None

    @property
    def cycle_length(self) -> Optional[int]:
        if self.status != "cycle":
            return None
        return len(self.sequence.ts) - self.repeat_index


@dataclass(frozen=True)
class PPSReport:
    config_valid: bool
    steps_valid: bool
    outside_paddle_span: bool
    injective: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return (
            self.config_valid
            and self.steps_valid
            and self.outside_paddle_span
            and self.injective
        )


@dataclass(frozen=True)
class CycleSearch:
    """Result of the exhaustive cycle hunt.

    status "found" carries the least witness under the documented search
    order; "none" means the search space was exhausted; "budget-exceeded"
    means some branch hit the length cap, so absence is not certified.
    """

    status: str
    run: Optional[PPSRun] = None
    configs_searched: int = 0


def _cl_x(m: Matroid, net: frozenset[int], extra: Iterable[int]) -> frozenset[int]:
    return m.closure(net | frozenset(extra))


def pps_candidates(m: Matroid, seq: PPSSequence) -> list[int]:
    """All legal next elements, ascending; empty means the PPS terminates."""
    _validate_steps(m, seq)
    cfg = seq.config
    net = frozenset(cfg.net)
    i = len(seq.ts)
    a = cfg.paddle(i)
    t = seq.ts[-1]
    pool = _cl_x(m, net, (a, t)) - _cl_x(m, net, (a,)) - {t}
    return sorted(pool)


def _validate_steps(m: Matroid, seq: PPSSequence) -> None:
    cfg = seq.config
    cfg.validate(m)
    if not seq.ts:
        raise InvalidSequence("sequence must contain t1")
    if seq.ts[0] != cfg.t1:
        raise InvalidSequence("sequence does not start at the configured t1")
    net = frozenset(cfg.net)
    for i in range(1, len(seq.ts)):
        a = cfg.paddle(i)
        prev, cur = seq.ts[i - 1], seq.ts[i]
        if cur == prev:
            raise InvalidSequence(f"step {i} repeats its predecessor")
        if cur not in _cl_x(m, net, (a, prev)) or cur in _cl_x(m, net, (a,)):
            raise InvalidSequence(f"step {i} violates the ping-pong rule")


def iter_runs(m: Matroid, config: PPSConfig, strategy: str = "least", budget: int = 64):
    """Yield maximal runs lazily, depth-first in candidate order."""
    if budget < 1:
        raise InvalidSequence("budget must be >= 1")
    config.validate(m)
    if strategy not in ("least", "all-branches"):
        raise InvalidSequence(f"unknown strategy {strategy!r}")

    net = frozenset(config.net)

    def step_candidates(ts: tuple[int, ...]) -> list[int]:
        a = config.paddle(len(ts))
        t = ts[-1]
        return sorted(_cl_x(m, net, (a, t)) - _cl_x(m, net, (a,)) - {t})

    def explore(ts: tuple[int, ...]):
        cands = step_candidates(ts)
        if not cands:
            yield PPSRun(PPSSequence(config, ts), "terminated")
            return
        if len(ts) >= budget:
            yield PPSRun(PPSSequence(config, ts), "budget")
            return
        pick = cands[:1] if strategy == "least" else cands
        for c in pick:
            if c in ts:
                yield PPSRun(PPSSequence(config, ts + (c,)), "cycle", ts.index(c) + 1)
            else:
                yield from explore(ts + (c,))

    yield from explore((config.t1,))


def pps_run(
    m: Matroid, config: PPSConfig, strategy: str = "least", budget: int = 64
) -> list[PPSRun]:
    """Run the generation procedure.

    "least" returns the single greedy run; "all-branches" returns every
    maximal sequence of the full candidate tree, in depth-first (lexicographic)
    order.  ``budget`` caps sequence length, t1 included.
    """
    return list(iter_runs(m, config, strategy, budget))


def pps_verify(m: Matroid, seq: PPSSequence) -> PPSReport:
    """Report step-validity, the outside-the-paddle-span property, and
    injectivity of a sequence.  Never raises; failures land in the report."""
    cfg = seq.config
    try:
        cfg.validate(m)
        config_valid = True
    except (InvalidConfig, InvalidElement) as e:
        return PPSReport(False, False, False, False, str(e))

    try:
        _validate_steps(m, seq)
        steps_valid = True
        detail = ""
    except (InvalidSequence, InvalidElement) as e:
        steps_valid = False
        detail = str(e)

    net = frozenset(cfg.net)
    span = _cl_x(m, net, (cfg.a1, cfg.a2))
    outside = all(t not in span for t in seq.ts)
    injective = len(set(seq.ts)) == len(seq.ts)
    return PPSReport(config_valid, steps_valid, outside, injective, detail)


def _candidate_nets(m: Matroid) -> list[frozenset[int]]:
    """Nets worth searching: closed sets of rank <= rank(ground) - 3.

    A configuration depends on its net only through the net's closure, and
    any valid configuration forces rank(net) + 3 <= rank(ground), so
    searching these flats covers every configuration up to equivalence.
    """
    budget_rank = m.full_rank - 3
    if budget_rank < 0:
        return []
    seen: set[frozenset[int]] = set()
    for size in range(budget_rank + 1):
        for combo in combinations(m.ground.elements, size):
            if m.is_independent(combo):
                seen.add(m.closure(combo))
    return sorted(seen, key=lambda s: (len(s), tuple(sorted(s))))


def pps_find_cycle(m: Matroid, budget: int = 64) -> CycleSearch:
    """Search every configuration (nets as in ``_candidate_nets``, ordered
    paddle pairs and starts ascending) and every branch for a cyclic PPS.

    The first cycle in this fixed order is returned as the least witness.
    """
    exhausted = True
    searched = 0
    for net in _candidate_nets(m):
        for a1 in m.ground.elements:
            for a2 in m.ground.elements:
                if a1 == a2:
                    continue
                if not m.independent_over((a1, a2), net):
                    continue
                span = m.closure(net | {a1, a2})
                for t1 in m.ground.elements:
                    if t1 in span:
                        continue
                    cfg = PPSConfig(canon(net), a1, a2, t1)
                    searched += 1
                    for run in iter_runs(m, cfg, "all-branches", budget):
                        if run.status == "cycle":
                            return CycleSearch("found", run, searched)
                        if run.status == "budget":
                            exhausted = False
    return CycleSearch("none" if exhausted else "budget-exceeded", None, searched)
