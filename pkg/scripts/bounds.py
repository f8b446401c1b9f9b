"""
Lower bounds on the broadcast rate and closed-form rates for structured families.

Bounds
------
- longest chain:   m - L_max
- algorithmic:     m - L*
- improved:        m - (L - 1) for the smallest L whose chain condition holds

Structures (checked in this order)
----------------------------------
perfect L-nested, T-truncated L-nested, three receivers with
H1 < H2 & H3 and H2 | H3 = [1:m], slightly imperfect L-nested.
"""

from __future__ import annotations

import logging
from itertools import combinations
from math import comb

from scripts.achievability.builder import best_construction
from scripts.chain_engine import L_STAR_MAX_WORK, compute_L_star
from scripts.core import height_above, longest_nested_chain
from scripts.lookahead import (  # noqa: F401  re-exported for callers of scripts.bounds
    LookAhead,
    intersection_of,
    is_minimal_cover,
    look_ahead_case,
    union_of,
)
from scripts.models import (
    BoundReport,
    CapExceededError,
    Partition,
    PliableInstance,
    StructureClass,
    bit,
)

logger = logging.getLogger(__name__)

SUBFAMILY_MAX_ABSENT = 12  # beyond this only the whole family and singletons are classified


def _strict_subset(a: int, b: int) -> bool:
    return a & b == a and a != b


# ---------------------------------------------------------------------------
# Chain bounds
# ---------------------------------------------------------------------------

def longest_chain_bound(inst: PliableInstance) -> int:
    return inst.m - len(longest_nested_chain(inst))


def algorithmic_bound(
    inst: PliableInstance, *, merge_skip_orbits: bool = False, max_work: int = L_STAR_MAX_WORK
) -> int:
    return inst.m - compute_L_star(inst, merge_skip_orbits=merge_skip_orbits, max_work=max_work)


def improved_nested_bound(inst: PliableInstance, L: int) -> bool:
    """Whether every nested absent chain of length >= L can be cut short.

    True iff for every chain H_1 < ... < H_n with n >= L there are k in
    [1:L-1] and a outside H_k such that no nested absent chain of length
    L - k lies above H_k | {a}. Only the first L - 1 links matter, so the
    search runs over all chains of length L - 1 whose top has an absent
    strict superset. When true, L* <= L - 1.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    absent = inst.sorted_absent()
    if L == 1:
        return not absent

    def escapes(prefix: list[int]) -> bool:
        for k, h in enumerate(prefix, start=1):
            for a in range(1, inst.m + 1):
                if not h & bit(a) and height_above(inst, h | bit(a)) < L - k:
                    return True
        return False

    def walk(prefix: list[int]) -> bool:
        top = prefix[-1]
        if len(prefix) == L - 1:
            if not any(_strict_subset(top, h) for h in absent):
                return True
            return escapes(prefix)
        return all(walk(prefix + [h]) for h in absent if _strict_subset(top, h))

    return all(walk([h]) for h in absent)


def improved_bound_value(inst: PliableInstance) -> int:
    """m - (L - 1) for the smallest L with improved_nested_bound(inst, L)."""
    L = 1
    while not improved_nested_bound(inst, L):
        L += 1
    return inst.m - (L - 1)


# ---------------------------------------------------------------------------
# Structure classification
# ---------------------------------------------------------------------------

def _membership_partition(m: int, family) -> tuple[int, list[int]]:
    """Group messages by which members of *family* contain them.

    Messages in every member form P_0; the other classes, ordered by their
    smallest message, are P_1..P_L.
    """
    family = list(family)
    classes: dict[tuple, int] = {}
    for i in range(1, m + 1):
        key = tuple(bool(h & bit(i)) for h in family)
        classes[key] = classes.get(key, 0) | bit(i)
    p0 = classes.pop(tuple([True] * len(family)), 0)
    parts = sorted(classes.values(), key=lambda p: p & -p)
    return p0, parts


def _nested_family(p0: int, parts: list[int], max_q: int) -> set[int]:
    """{P_0 | union of P_i for i in Q : |Q| <= max_q, Q a strict subset of [1:L]}."""
    L = len(parts)
    out = set()
    for size in range(0, min(max_q, L - 1) + 1):
        for Q in combinations(range(L), size):
            out.add(p0 | union_of(parts[i] for i in Q))
    return out


def _as_partition(m: int, p0: int, parts: list[int]) -> Partition:
    return Partition(m, (p0, *parts))


def _perfect(m: int, family: frozenset[int]) -> StructureClass | None:
    if not family:
        return None
    p0, parts = _membership_partition(m, family)
    L = len(parts)
    if L == 0 or len(family) != 2 ** L - 1:
        return None
    if family != _nested_family(p0, parts, L - 1):
        return None
    return StructureClass("perfect_nested", L=L, partition=_as_partition(m, p0, parts))


def _truncated(m: int, family: frozenset[int]) -> StructureClass | None:
    if not family:
        return None
    p0, parts = _membership_partition(m, family)
    L = len(parts)
    for T in range(1, L - 1):
        if len(family) == sum(comb(L, i) for i in range(T + 1)) and \
                family == _nested_family(p0, parts, T):
            return StructureClass(
                "truncated_nested", L=L, T=T, partition=_as_partition(m, p0, parts)
            )
    return None


def _prop1_triple(inst: PliableInstance) -> StructureClass | None:
    if len(inst.absent) != 3:
        return None
    family = inst.sorted_absent()
    for i, h1 in enumerate(family):
        h2, h3 = (h for j, h in enumerate(family) if j != i)
        if _strict_subset(h1, h2 & h3) and h2 | h3 == inst.full:
            return StructureClass("prop1_triple", triple=(h1, h2, h3))
    return None


def _slightly_imperfect(inst: PliableInstance) -> StructureClass | None:
    """A perfect L-nested family (L >= 2) with one H_Q replaced by a strict subset."""
    for shrunk in inst.sorted_absent():
        rest = inst.absent - {shrunk}
        p0, parts = _membership_partition(inst.m, rest)
        L = len(parts)
        if L < 2 or len(inst.absent) != 2 ** L - 1:
            continue
        perfect = _nested_family(p0, parts, L - 1)
        missing = perfect - rest
        if len(missing) != 1 or not rest <= perfect:
            continue
        (replaced,) = missing
        if shrunk in perfect or not _strict_subset(shrunk, replaced):
            continue
        Q = tuple(i + 1 for i, part in enumerate(parts) if part & replaced)
        return StructureClass(
            "slightly_imperfect", L=L, partition=_as_partition(inst.m, p0, parts),
            Q=Q, shrunk=shrunk,
        )
    return None


def classify_structure(inst: PliableInstance) -> StructureClass:
    """Tag the absent family with the first matching closed-form structure."""
    for found in (
        _perfect(inst.m, inst.absent),
        _truncated(inst.m, inst.absent),
        _prop1_triple(inst),
        _slightly_imperfect(inst),
    ):
        if found is not None:
            return found
    return StructureClass("none")


def structured_subfamilies(inst: PliableInstance) -> list[StructureClass]:
    """Perfect or truncated structures formed by subfamilies of the absent receivers."""
    absent = inst.sorted_absent()
    if len(absent) > SUBFAMILY_MAX_ABSENT:
        logger.debug("%d absent receivers: classifying singletons only", len(absent))
        sizes = [1]
    else:
        sizes = range(1, len(absent) + 1)
    out = []
    for size in sizes:
        for combo in combinations(absent, size):
            family = frozenset(combo)
            found = _perfect(inst.m, family) or _truncated(inst.m, family)
            if found is not None:
                out.append(found)
    return out


def has_short_code_subfamily(inst: PliableInstance) -> bool:
    """Some subfamily is perfect 2-nested or 1-truncated 3-nested."""
    for s in structured_subfamilies(inst):
        if s.tag == "perfect_nested" and s.L == 2:
            return True
        if s.tag == "truncated_nested" and s.T == 1 and s.L == 3:
            return True
    return False


def closed_form_beta(inst: PliableInstance) -> int | None:
    """The optimal rate when the instance falls in a solved family, else None."""
    m, n = inst.m, len(inst.absent)
    if n == 0:
        return m
    if n <= 2:
        return m - 1
    if n == 3:
        structure = _perfect(m, inst.absent)
        return m - 2 if structure is not None and structure.L == 2 else m - 1
    if n == 4:
        return m - 2 if has_short_code_subfamily(inst) else m - 1
    if union_of(inst.absent) != inst.full or len(longest_nested_chain(inst)) == 1:
        return m - 1

    structure = classify_structure(inst)
    if structure.tag == "perfect_nested":
        return m - structure.L
    if structure.tag == "truncated_nested":
        return m - structure.T - 1
    if structure.tag == "slightly_imperfect":
        return m - structure.L + 1
    if structure.tag == "prop1_triple":
        return m - 1
    return None


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def bound_report(
    inst: PliableInstance,
    q: int | str = "auto",
    *,
    merge_skip_orbits: bool = False,
    max_work: int = L_STAR_MAX_WORK,
) -> BoundReport:
    """All lower bounds, the structure tag and the best verified construction."""
    lb_chain = longest_chain_bound(inst)
    try:
        lb_algo = algorithmic_bound(inst, merge_skip_orbits=merge_skip_orbits, max_work=max_work)
    except CapExceededError as exc:
        logger.warning("Skipping the algorithmic bound: %s", exc)
        lb_algo = None
    lb_improved = improved_bound_value(inst)
    structure = classify_structure(inst)
    code = best_construction(inst, [structure] + structured_subfamilies(inst), q)

    ub = len(code)
    best_lb = max(b for b in (lb_chain, lb_algo, lb_improved) if b is not None)
    return BoundReport(
        m=inst.m,
        lb_longest_chain=lb_chain,
        lb_algorithmic=lb_algo,
        lb_improved=lb_improved,
        closed_form=closed_form_beta(inst),
        ub_construction=ub,
        beta_confirmed=ub if best_lb == ub else None,
        structure=structure,
        code=code,
    )
