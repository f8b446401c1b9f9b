"""Cyclic code plus Vandermonde rows on the part leaders (T-truncated families)."""

from __future__ import annotations

import logging

from scripts.achievability.cyclic import cyclic_rows
from scripts.achievability.field import primitive_element, resolve_q
from scripts.models import LinearCode, Partition

logger = logging.getLogger(__name__)


def truncated_code(partition: Partition, T: int, q: int | str = "auto") -> LinearCode:
    """Length m - T - 1 code for the T-truncated L-nested family on *partition*.

    Adds L - 1 - T rows V_{L-k}, k = 1..L-1-T, where V_{L-k} puts
    gamma^((k-1) i) on the leader of part i and gamma is the smallest
    primitive root mod q. With at most one extra row every coefficient is 1,
    so any prime works; otherwise q - 1 >= L keeps the nodes distinct.
    """
    L = partition.L
    if not 0 <= T <= L - 1:
        raise ValueError(f"T must be in [0:{L - 1}], got {T}")
    extra = L - 1 - T
    q = resolve_q(q, minimum=L + 1 if extra >= 2 else 2)
    gamma = primitive_element(q)

    m = partition.m
    rows = cyclic_rows(partition)
    for k in range(1, extra + 1):
        row = [0] * m
        for i in range(1, L + 1):
            row[partition.leader(i) - 1] = pow(gamma, (k - 1) * i, q)
        rows.append(tuple(row))
    logger.debug("truncated code: L=%d T=%d q=%d gamma=%d", L, T, q, gamma)
    return LinearCode(q=q, m=m, rows=tuple(rows))
