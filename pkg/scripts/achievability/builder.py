"""Pick the shortest verified construction for an instance."""

from __future__ import annotations

import logging

from scripts.achievability.cyclic import cyclic_partition_code, unit_row
from scripts.achievability.patch import imperfect_patch_code
from scripts.achievability.truncated import truncated_code
from scripts.achievability.field import resolve_q
from scripts.achievability.verify import verify_code
from scripts.models import LinearCode, Partition, PliableInstance, StructureClass

logger = logging.getLogger(__name__)


def identity_code(m: int, q: int | str = 2) -> LinearCode:
    return LinearCode(q=resolve_q(q), m=m, rows=tuple(unit_row(m, i) for i in range(1, m + 1)))


def construct(structure: StructureClass, m: int, q: int | str = "auto") -> LinearCode | None:
    """The code attached to a structure tag, or None for ``none``."""
    tag = structure.tag
    if tag == "perfect_nested":
        return cyclic_partition_code(structure.partition, 2 if q == "auto" else q)
    if tag == "truncated_nested":
        return truncated_code(structure.partition, structure.T, q)
    if tag == "slightly_imperfect":
        return imperfect_patch_code(structure.partition, structure.Q, 2 if q == "auto" else q)
    if tag == "prop1_triple":
        _, h2, h3 = structure.triple
        partition = Partition(m, (h2 & h3, h2 & ~h3, h3 & ~h2))
        return imperfect_patch_code(partition, (), 2 if q == "auto" else q)
    return None


def best_construction(
    inst: PliableInstance,
    structures: list[StructureClass],
    q: int | str = "auto",
) -> LinearCode:
    """Shortest code among *structures* that verifies on *inst*.

    Codes for structured subfamilies stay valid for the whole instance, since
    adding absent receivers only removes decoding obligations. Falls back to
    the identity code.
    """
    candidates: list[LinearCode] = []
    for structure in structures:
        try:
            code = construct(structure, inst.m, q)
        except ValueError as exc:
            logger.warning("Skipping %s construction: %s", structure.tag, exc)
            continue
        if code is not None:
            candidates.append(code)
    candidates.sort(key=len)

    for code in candidates:
        if len(code) >= inst.m:
            break
        if verify_code(inst, code) is not None:
            logger.debug("Using a length-%d code over GF(%d)", len(code), code.q)
            return code
        logger.warning("A length-%d structure code failed verification", len(code))
    return identity_code(inst.m, 2 if q == "auto" else q)
