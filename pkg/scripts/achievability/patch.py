"""Cyclic code plus one uncoded message, for a family with one receiver shrunk."""

from __future__ import annotations

from scripts.achievability.cyclic import cyclic_rows, unit_row
from scripts.achievability.field import resolve_q
from scripts.models import LinearCode, Partition


def imperfect_patch_code(partition: Partition, Q, q: int | str = 2) -> LinearCode:
    """Length m - L + 1 code: the cyclic rows plus X_a.

    a is the smallest message of P_k for the smallest k in [1:L] outside Q,
    so the receiver H_Q, now present, decodes X_a directly.
    """
    L = partition.L
    Q = set(Q)
    if not Q <= set(range(1, L + 1)):
        raise ValueError(f"Q={sorted(Q)} is not a set of part indices in [1:{L}]")
    outside = [k for k in range(1, L + 1) if k not in Q]
    if not outside:
        raise ValueError("Q must be a strict subset of [1:L]")
    a = partition.leader(outside[0])
    rows = cyclic_rows(partition) + [unit_row(partition.m, a)]
    return LinearCode(q=resolve_q(q), m=partition.m, rows=tuple(rows))
