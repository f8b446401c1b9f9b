"""
Look-ahead cases for an absent chain and its absent strict supersets.

Shared by the look-ahead chain policy and the bound helpers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from scripts.models import PliableInstance, members_of

logger = logging.getLogger(__name__)


def union_of(sets: Iterable[int]) -> int:
    out = 0
    for s in sets:
        out |= s
    return out


def intersection_of(sets: Iterable[int], full: int) -> int:
    out = full
    for s in sets:
        out &= s
    return out


def _strict_subset(a: int, b: int) -> bool:
    return a & b == a and a != b


@dataclass(frozen=True)
class LookAhead:
    kind: str                           # case1, case2, case3 or none
    pivot: int | None = None            # the present receiver T whose D is consulted
    candidates: tuple[int, ...] = ()    # receivers one of which must miss D(T)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "T": None if self.pivot is None else members_of(self.pivot),
            "candidates": [members_of(h) for h in self.candidates],
        }


def is_minimal_cover(family: list[int], full: int) -> bool:
    """Union is [1:m] and no member can be dropped."""
    if union_of(family) != full:
        return False
    for i, h in enumerate(family):
        others = union_of(family[:i] + family[i + 1:])
        if h & ~others == 0:
            return False
    return True


def look_ahead_case(inst: PliableInstance, H: int, A: Iterable[int]) -> LookAhead:
    """Which look-ahead case applies to absent H and absent strict supersets A.

    case1: A does not cover [1:m].
    case2: A is a minimal cover whose intersection T strictly contains H and
           is present.
    case3: A is a minimal cover with intersection H, and some pair H1, H2
           has a present intersection strictly containing H.
    """
    family = sorted(set(A))
    if H not in inst.absent:
        raise ValueError(f"{members_of(H)} is not an absent receiver")
    for h in family:
        if h not in inst.absent or not _strict_subset(H, h):
            raise ValueError(f"{members_of(h)} is not an absent strict superset of {members_of(H)}")

    if union_of(family) != inst.full:
        return LookAhead("case1")
    if not is_minimal_cover(family, inst.full):
        return LookAhead("none")
    T = intersection_of(family, inst.full)
    if T != H:
        if inst.is_present(T):
            logger.debug("look-ahead case2 at %s via %s", members_of(H), members_of(T))
            return LookAhead("case2", T, tuple(family))
        return LookAhead("none")
    for h1, h2 in combinations(family, 2):
        pair = h1 & h2
        if pair != H and inst.is_present(pair):
            logger.debug("look-ahead case3 at %s via %s", members_of(H), members_of(pair))
            return LookAhead("case3", pair, (h1, h2))
    return LookAhead("none")
