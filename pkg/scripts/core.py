"""
Instance parsing, canonical relabeling and nested chains of absent receivers.

Receivers are bitmask integers throughout (message i is bit i-1). The
present family is never materialized; see ``PliableInstance.is_present``.
"""

from __future__ import annotations

import json
import logging
import os
from functools import lru_cache
from itertools import permutations

from scripts.models import (
    MAX_MESSAGES,
    InstanceError,
    NestedChain,
    PliableInstance,
    mask_of,
    members_of,
    relabel_mask,
)

logger = logging.getLogger(__name__)

EXACT_CANONICAL_MAX_M = 8   # above this, canonicalize falls back to a degree refinement
TABLE_MAX_M = 6             # precompute relabel tables up to this m
CAP_ENV = "PIC_MAX_M"


def search_cap(default: int) -> int:
    """Return *default*, or the ``PIC_MAX_M`` override when it is set."""
    raw = os.environ.get(CAP_ENV)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", CAP_ENV, raw)
        return default
    return min(value, MAX_MESSAGES)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_instance(text: str) -> PliableInstance:
    """Parse and validate an instance JSON document.

    Parameters
    ----------
    text : str
        ``{"m": <int>, "absent": [[<int>...], ...]}`` with 1-based indices.

    Raises
    ------
    InstanceError
        On malformed JSON, out-of-range indices, duplicate absent receivers
        or the full message set listed as absent.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "m" not in doc or "absent" not in doc:
        raise InstanceError("instance must be an object with 'm' and 'absent'")

    m = doc["m"]
    if not isinstance(m, int) or isinstance(m, bool):
        raise InstanceError(f"'m' must be an integer, got {m!r}")
    if not 1 <= m <= MAX_MESSAGES:
        raise InstanceError(f"'m' must be in [1:{MAX_MESSAGES}], got {m}")
    if not isinstance(doc["absent"], list):
        raise InstanceError("'absent' must be a list of index lists")

    seen: set[int] = set()
    for raw in doc["absent"]:
        if not isinstance(raw, list):
            raise InstanceError(f"absent receiver {raw!r} is not a list")
        for i in raw:
            if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= m:
                raise InstanceError(f"index {i!r} is out of range [1:{m}]")
        if len(set(raw)) != len(raw):
            raise InstanceError(f"absent receiver {raw} repeats an index")
        mask = mask_of(raw)
        if mask == (1 << m) - 1:
            raise InstanceError(f"[1:{m}] cannot be listed as absent")
        if mask in seen:
            raise InstanceError(f"absent receiver {sorted(raw)} is listed twice")
        seen.add(mask)
    return PliableInstance(m, frozenset(seen))


def dump_instance(inst: PliableInstance) -> str:
    return json.dumps(inst.to_dict())


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _perms(m: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(p + 1 for p in perm) for perm in permutations(range(m)))


@lru_cache(maxsize=None)
def _relabel_tables(m: int) -> tuple[tuple[int, ...], ...]:
    """For each permutation, the image of every mask in [0, 2^m)."""
    return tuple(
        tuple(relabel_mask(mask, perm) for mask in range(1 << m)) for perm in _perms(m)
    )


def canonical_key(masks, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least sorted relabeling of *masks* and its permutation."""
    best = None
    witness = None
    if m <= TABLE_MAX_M:
        for perm, table in zip(_perms(m), _relabel_tables(m)):
            key = tuple(sorted(table[h] for h in masks))
            if best is None or key < best:
                best, witness = key, perm
    else:
        for perm in _perms(m):
            key = tuple(sorted(relabel_mask(h, perm) for h in masks))
            if best is None or key < best:
                best, witness = key, perm
    return best, witness


def _refinement_permutation(inst: PliableInstance) -> tuple[int, ...]:
    """Order messages by their degree signature in the absent family."""
    signature = {}
    for i in range(1, inst.m + 1):
        sizes = sorted(len(members_of(h)) for h in inst.absent if h >> (i - 1) & 1)
        signature[i] = (len(sizes), tuple(sizes))
    order = sorted(range(1, inst.m + 1), key=lambda i: (signature[i], i))
    perm = [0] * inst.m
    for new, old in enumerate(order, start=1):
        perm[old - 1] = new
    return tuple(perm)


def canonicalize(inst: PliableInstance) -> tuple[PliableInstance, tuple[int, ...]]:
    """Relabel *inst* into its canonical representative.

    Exact minimum over all m! relabelings for m <= 8; above that a
    degree-signature ordering that is idempotent but not always minimal.
    Returns the relabeled instance and perm, where perm[i-1] is the new
    label of message i.
    """
    if inst.m > EXACT_CANONICAL_MAX_M:
        logger.debug("m=%d: using degree refinement for canonical form", inst.m)
        perm = _refinement_permutation(inst)
        return inst.relabel(perm), perm
    key, perm = canonical_key(inst.absent, inst.m)
    return PliableInstance(inst.m, frozenset(key)), perm


# ---------------------------------------------------------------------------
# Nested chains
# ---------------------------------------------------------------------------

def _is_strict_subset(a: int, b: int) -> bool:
    return a & b == a and a != b


@lru_cache(maxsize=4096)
def chain_heights(inst: PliableInstance) -> dict[int, int]:
    """Length of the longest nested absent chain starting at each absent set."""
    up: dict[int, int] = {}
    for h in sorted(inst.absent, key=lambda x: -bin(x).count("1")):
        up[h] = 1 + max(
            (up[s] for s in up if _is_strict_subset(h, s)), default=0
        )
    return up


def height_above(inst: PliableInstance, receiver: int) -> int:
    """Longest nested chain of absent receivers all containing *receiver*."""
    up = chain_heights(inst)
    return max((n for h, n in up.items() if h & receiver == receiver), default=0)


def longest_nested_chain(inst: PliableInstance) -> NestedChain:
    """A maximum-length nested absent chain, lexicographically least by bitmask."""
    up = chain_heights(inst)
    if not up:
        return NestedChain(())
    length = max(up.values())
    current = min(h for h, n in up.items() if n == length)
    links = [current]
    while up[current] > 1:
        current = min(
            h for h, n in up.items()
            if n == up[current] - 1 and _is_strict_subset(current, h)
        )
        links.append(current)
    return NestedChain(tuple(links))


def all_maximal_chains(inst: PliableInstance, min_len: int) -> list[NestedChain]:
    """Every inclusion-maximal nested absent chain with at least *min_len* links."""
    if min_len < 1:
        raise ValueError(f"min_len must be >= 1, got {min_len}")
    absent = inst.sorted_absent()
    covers = {
        a: [
            b for b in absent
            if _is_strict_subset(a, b)
            and not any(_is_strict_subset(a, c) and _is_strict_subset(c, b) for c in absent)
        ]
        for a in absent
    }
    minimal = [a for a in absent if not any(_is_strict_subset(b, a) for b in absent)]

    chains: list[NestedChain] = []

    def extend(path: list[int]) -> None:
        nxt = covers[path[-1]]
        if not nxt:
            if len(path) >= min_len:
                chains.append(NestedChain(tuple(path)))
            return
        for b in nxt:
            extend(path + [b])

    for a in minimal:
        extend([a])
    chains.sort(key=lambda c: c.links)
    return chains
