"""
Decoding chains with skipped messages, and the adversarial skip count L*.

A run starts from the empty chain. While the chain C is a present receiver
it grows by D(C); when C is an absent receiver the run either skips some
message outside C, or takes D(B) for a present B strictly inside C with
D(B) outside C. L* is the largest number of skips a decoding choice D can
force on every run.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import networkx as nx

from scripts.core import chain_heights, longest_nested_chain, search_cap
from scripts.lookahead import look_ahead_case, union_of
from scripts.models import (
    CapExceededError,
    ChainError,
    ChainStep,
    ChainTrace,
    DecodingChoice,
    PliableInstance,
    bit,
    members_of,
    smallest_missing,
)

logger = logging.getLogger(__name__)

L_STAR_MAX_M = 12  # cap for the exact adversarial search
L_STAR_MAX_WORK = 50_000_000  # run states, subset checks and nogood scans over all skip targets
NOGOOD_LIMIT = 4096


def proper_subsets(mask: int):
    """Yield every strict subset of *mask*, largest bitmask first, ending with 0."""
    sub = mask
    while sub:
        sub = (sub - 1) & mask
        yield sub


@lru_cache(maxsize=64)
def height_table(inst: PliableInstance) -> tuple[int, ...]:
    """h(C) for every C: longest nested absent chain of supersets of C."""
    up = chain_heights(inst)
    table = [0] * (inst.full + 1)
    for mask in range(inst.full, -1, -1):
        value = up.get(mask, 0)
        for j in range(inst.m):
            if not mask >> j & 1:
                value = max(value, table[mask | (1 << j)])
        table[mask] = value
    return tuple(table)


def skip_candidates(inst: PliableInstance, chain: int, merge_orbits: bool = False) -> list[int]:
    """Messages a run may skip at *chain*.

    With *merge_orbits*, messages lying in exactly the same absent strict
    supersets of *chain* are represented by the smallest of them. This only
    removes options from the minimizing side, so values computed with it are
    still achievable skip counts.
    """
    free = [a for a in range(1, inst.m + 1) if not chain & bit(a)]
    if not merge_orbits:
        return free
    supers = [h for h in inst.absent if h & chain == chain and h != chain]
    seen: set[frozenset] = set()
    out = []
    for a in free:
        signature = frozenset(h for h in supers if h & bit(a))
        if signature not in seen:
            seen.add(signature)
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

class ChainPolicy:
    """Chooses the step a run takes when its chain is an absent receiver."""

    name = "base"

    def on_absent(self, inst: PliableInstance, chain: int, D: DecodingChoice) -> ChainStep:
        raise NotImplementedError


class SkipSmallestPolicy(ChainPolicy):
    """Always Option 1, skipping the smallest message outside the chain."""

    name = "option1"

    def on_absent(self, inst, chain, D):
        return ChainStep("skip", smallest_missing(chain))


class LookAheadPolicy(ChainPolicy):
    """Option 2 whenever some B qualifies; otherwise skip by looking ahead.

    The skip is chosen from the case analysis over the absent strict
    supersets of the chain: a message outside their union when they do not
    cover [1:m], otherwise a private message of a superset that cannot
    contain D(T) for the present intersection T. With no applicable case the
    skip minimizing the remaining nested height is taken.
    """

    name = "lookahead"

    def on_absent(self, inst, chain, D):
        for sub in sorted(proper_subsets(chain)):
            if not inst.is_present(sub):
                continue
            x = D.get(sub)
            if x is not None and not chain & bit(x):
                return ChainStep("avoid", x, sub)
        return ChainStep("skip", self._look_ahead_skip(inst, chain, D))

    def _look_ahead_skip(self, inst, chain, D) -> int:
        supers = sorted(h for h in inst.absent if h & chain == chain and h != chain)
        case = look_ahead_case(inst, chain, supers)
        if case.kind == "case1":
            return smallest_missing(chain | union_of(supers))
        if case.kind in ("case2", "case3"):
            x = D.get(case.pivot)
            if x is not None:
                for target in case.candidates:
                    if not target & bit(x):
                        others = union_of(h for h in supers if h != target)
                        private = target & ~others & ~chain
                        return members_of(private)[0]
        heights = height_table(inst)
        return min(
            skip_candidates(inst, chain),
            key=lambda a: (heights[chain | bit(a)], a),
        )


class ScriptedPolicy(ChainPolicy):
    """A fixed table of steps keyed by chain set, with an optional fallback."""

    name = "scripted"

    def __init__(self, table: Mapping[int, ChainStep], fallback: ChainPolicy | None = None):
        self.table = dict(table)
        self.fallback = fallback

    def on_absent(self, inst, chain, D):
        if chain in self.table:
            return self.table[chain]
        if self.fallback is None:
            raise ChainError(f"no scripted step for chain {members_of(chain)}")
        return self.fallback.on_absent(inst, chain, D)


POLICIES: dict[str, type[ChainPolicy]] = {
    SkipSmallestPolicy.name: SkipSmallestPolicy,
    LookAheadPolicy.name: LookAheadPolicy,
}


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def _check_step(inst: PliableInstance, chain: int, D: DecodingChoice, step: ChainStep) -> None:
    if chain & bit(step.message) or not 1 <= step.message <= inst.m:
        raise ChainError(f"message {step.message} is already in the chain {members_of(chain)}")
    if step.kind == "avoid":
        via = step.via
        if not inst.is_present(via) or via & chain != via or via == chain:
            raise ChainError(
                f"receiver {members_of(via)} is not a present strict subset of {members_of(chain)}"
            )
        if D.get(via) != step.message:
            raise ChainError(f"D({members_of(via)}) is not {step.message}")
    elif step.kind == "decode":
        raise ChainError("policies may only skip or avoid at absent receivers")


def run_chain(inst: PliableInstance, D: DecodingChoice, policy: ChainPolicy) -> ChainTrace:
    """Build one decoding chain under *D*, asking *policy* at every absent hit."""
    chain = 0
    steps: list[ChainStep] = []
    hits: list[int] = []
    while chain != inst.full:
        if chain in inst.absent:
            hits.append(chain)
            step = policy.on_absent(inst, chain, D)
            _check_step(inst, chain, D, step)
        else:
            message = D.decode(chain)
            if chain & bit(message):
                raise ChainError(f"D({members_of(chain)}) = {message} is already held")
            step = ChainStep("decode", message, chain)
        steps.append(step)
        chain |= bit(step.message)
    return ChainTrace(steps=tuple(steps), hits=tuple(hits))


def min_skips(inst: PliableInstance, D: DecodingChoice, *, merge_skip_orbits: bool = False) -> int:
    """Fewest skips over every run under a fixed D, memoized on the chain set."""
    memo: dict[int, int] = {}
    full = inst.full

    def best(chain: int) -> int:
        if chain == full:
            return 0
        if chain in memo:
            return memo[chain]
        if chain not in inst.absent:
            value = best(chain | bit(D.decode(chain)))
        else:
            value = 1 + min(
                best(chain | bit(a)) for a in skip_candidates(inst, chain, merge_skip_orbits)
            )
            for sub in proper_subsets(chain):
                if sub in inst.absent:
                    continue
                x = D.get(sub)
                if x is not None and not chain & bit(x):
                    value = min(value, best(chain | bit(x)))
        memo[chain] = value
        return value

    return best(0)


# ---------------------------------------------------------------------------
# Adversarial search for L*
# ---------------------------------------------------------------------------

@dataclass
class _Frame:
    var: int
    values: list[int]
    index: int = 0
    conflict: set[int] = field(default_factory=set)


class _AdversarySearch:
    """Decide whether some D forces at least *target* skips on every run.

    D is assigned lazily: a receiver gets a value only once some run still
    able to finish under *target* skips queries it. A run that reaches a
    chain C with s skips and s + h(C) < target finishes under target whatever
    D does later, so it refutes the current partial assignment; the
    receivers it queried form the conflict set used for backjumping.

    Refuting (receiver, value) sets are kept as nogoods: a run depends only
    on the values it queried, so any later assignment containing one is
    refuted without another search.
    """

    def __init__(
        self,
        inst: PliableInstance,
        target: int,
        merge_skip_orbits: bool = False,
        max_work: int = L_STAR_MAX_WORK,
    ):
        self.inst = inst
        self.target = target
        self.merge = merge_skip_orbits
        self.max_work = max_work
        self.height = height_table(inst)
        self.assignment: dict[int, int] = {}
        self.nogoods: deque[tuple[tuple[int, int], ...]] = deque(maxlen=NOGOOD_LIMIT)
        self.explorations = 0
        self.nogood_hits = 0
        self.work = 0

    def decide(self) -> bool:
        stack: list[_Frame] = []
        while True:
            witness, query = self._explore()
            if witness is None:
                if query is None:
                    return True
                stack.append(_Frame(query, self._value_order(query)))
            else:
                reason = set(witness)
                while True:
                    if not stack:
                        return False
                    frame = stack[-1]
                    del self.assignment[frame.var]
                    if frame.var in reason:
                        reason.discard(frame.var)
                        frame.conflict |= reason
                        if frame.index < len(frame.values):
                            break
                        reason = set(frame.conflict)
                    stack.pop()
            frame = stack[-1]
            self.assignment[frame.var] = frame.values[frame.index]
            frame.index += 1

    def _value_order(self, receiver: int) -> list[int]:
        free = [x for x in range(1, self.inst.m + 1) if not receiver & bit(x)]
        return sorted(free, key=lambda x: (-self.height[receiver | bit(x)], x))

    def _spend(self, units: int) -> None:
        self.work += units
        if self.work > self.max_work:
            raise CapExceededError(
                f"L* search spent its work budget at {self.target} skips for m={self.inst.m}"
            )

    def _explore(self) -> tuple[tuple[int, ...] | None, int | None]:
        """Search runs under the partial D.

        Returns (witness, None) for a run that finishes under target, else
        (None, query) where query is the first unassigned receiver some
        surviving run asks about (None when no run depends on one).

        Raises CapExceededError once the search has spent max_work.
        """
        self.explorations += 1
        inst, t, assignment = self.inst, self.target, self.assignment
        self._spend(1 + len(self.nogoods))
        for nogood in self.nogoods:
            if all(assignment.get(r) == x for r, x in nogood):
                self.nogood_hits += 1
                return tuple(r for r, _ in nogood), None
        best: dict[int, int] = {}
        query = None
        stack: list[tuple[int, int, tuple[int, ...]]] = [(0, 0, ())]
        while stack:
            chain, skips, used = stack.pop()
            if skips + self.height[chain] < t:
                self.nogoods.append(tuple((r, assignment[r]) for r in dict.fromkeys(used)))
                return used, None
            if best.get(chain, t) <= skips:
                continue
            best[chain] = skips
            self._spend(1 << bin(chain).count("1") if chain in inst.absent else 1)
            if chain not in inst.absent:
                x = assignment.get(chain)
                if x is None:
                    if query is None:
                        query = chain
                else:
                    stack.append((chain | bit(x), skips, used + (chain,)))
                continue
            if skips + 1 < t:
                for a in skip_candidates(inst, chain, self.merge):
                    stack.append((chain | bit(a), skips + 1, used))
            for sub in proper_subsets(chain):
                if sub in inst.absent:
                    continue
                x = assignment.get(sub)
                if x is None:
                    if query is None:
                        query = sub
                elif not chain & bit(x):
                    stack.append((chain | bit(x), skips, used + (sub,)))
        return None, query


def adversarial_decoding(
    inst: PliableInstance, *, merge_skip_orbits: bool = False, max_work: int = L_STAR_MAX_WORK
) -> tuple[int, DecodingChoice]:
    """L* together with a decoding choice that forces it.

    The choice holds only the receivers the search had to fix; every other
    receiver answers with its smallest missing message. The search raises
    CapExceededError once it has spent *max_work* units over all skip targets.
    """
    cap = search_cap(L_STAR_MAX_M)
    if inst.m > cap:
        raise CapExceededError(f"L* search is capped at m={cap}, got m={inst.m}")
    upper = len(longest_nested_chain(inst))
    value, forcing, spent = 0, {}, 0
    for t in range(1, upper + 1):
        search = _AdversarySearch(inst, t, merge_skip_orbits, max_work - spent)
        holds = search.decide()
        spent += search.work
        logger.debug(
            "m=%d |absent|=%d: %d skips %s after %d explorations (%d nogood hits, %d work)",
            inst.m, len(inst.absent), t, "forced" if holds else "avoidable",
            search.explorations, search.nogood_hits, search.work,
        )
        if not holds:
            break
        value, forcing = t, dict(search.assignment)
    return value, DecodingChoice(forcing, fallback="smallest")


def compute_L_star(
    inst: PliableInstance, *, merge_skip_orbits: bool = False, max_work: int = L_STAR_MAX_WORK
) -> int:
    """max over D of min over runs of the number of skipped messages."""
    return adversarial_decoding(inst, merge_skip_orbits=merge_skip_orbits, max_work=max_work)[0]


# ---------------------------------------------------------------------------
# Certificate
# ---------------------------------------------------------------------------

def acyclic_certificate(
    inst: PliableInstance, trace: ChainTrace, D: DecodingChoice
) -> tuple[nx.DiGraph, bool]:
    """Decoding graph on the non-skipped messages of *trace*, and whether it is a DAG.

    Each decode or avoid step through receiver B adds an edge from D(B) to
    every non-skipped member of B.
    """
    skipped = set(trace.skipped)
    graph = nx.DiGraph()
    graph.add_nodes_from(x for x in trace.order if x not in skipped)
    chain = 0
    for step in trace.steps:
        if step.kind != "skip":
            receiver = step.via
            if receiver is None or not inst.is_present(receiver):
                raise ChainError(f"step {step.to_dict()} does not use a present receiver")
            if D.get(receiver) != step.message:
                raise ChainError(
                    f"trace takes {step.message} from {members_of(receiver)}, "
                    f"but D gives {D.get(receiver)}"
                )
            if step.kind == "decode" and receiver != chain:
                raise ChainError(f"decode step at {members_of(chain)} names {members_of(receiver)}")
            if step.kind == "avoid" and (receiver & chain != receiver or receiver == chain):
                raise ChainError(f"avoid step via {members_of(receiver)} is not inside the chain")
            for member in members_of(receiver):
                if member not in skipped:
                    graph.add_edge(step.message, member)
        chain |= bit(step.message)
    return graph, nx.is_directed_acyclic_graph(graph)
