"""Uncoded P_0 plus per-part cyclic codes: length m - L for a partition."""

from __future__ import annotations

from scripts.achievability.field import resolve_q
from scripts.models import LinearCode, Partition


def unit_row(m: int, message: int) -> tuple[int, ...]:
    row = [0] * m
    row[message - 1] = 1
    return tuple(row)


def cyclic_rows(partition: Partition) -> list[tuple[int, ...]]:
    """X_j for j in P_0, then Z_{i,j} + Z_{i,j+1} for each part i >= 1."""
    m = partition.m
    rows = [unit_row(m, j) for j in partition.members(0)]
    for i in range(1, partition.L + 1):
        members = partition.members(i)
        for a, b in zip(members, members[1:]):
            row = [0] * m
            row[a - 1] = 1
            row[b - 1] = 1
            rows.append(tuple(row))
    return rows


def cyclic_partition_code(partition: Partition, q: int | str = 2) -> LinearCode:
    """Optimal code for the perfect L-nested family on *partition*."""
    return LinearCode(q=resolve_q(q), m=partition.m, rows=tuple(cyclic_rows(partition)))
