"""Prime-field helpers: field classes, admissible primes and primitive roots."""

from __future__ import annotations

import logging
from functools import lru_cache

import galois

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def field_for(q: int) -> type[galois.FieldArray]:
    """Return the GF(q) array class, rejecting non-prime q."""
    if not galois.is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    return galois.GF(q)


def smallest_prime_at_least(n: int) -> int:
    if n <= 2:
        return 2
    return int(galois.next_prime(n - 1))


@lru_cache(maxsize=None)
def primitive_element(q: int) -> int:
    """Smallest primitive root modulo the prime *q*."""
    field_for(q)
    return int(galois.primitive_root(q))


def resolve_q(q: int | str, minimum: int = 2) -> int:
    """Turn ``"auto"`` into the smallest prime >= *minimum*; check explicit q."""
    if q == "auto":
        chosen = smallest_prime_at_least(minimum)
        logger.debug("q=auto resolved to %d (minimum %d)", chosen, minimum)
        return chosen
    q = int(q)
    field_for(q)
    if q < minimum:
        raise ValueError(f"q={q} is too small; this construction needs q >= {minimum}")
    return q
