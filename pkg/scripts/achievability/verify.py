"""Decodability test for linear codes against every present receiver."""

from __future__ import annotations

import logging

import numpy as np

from scripts.achievability.field import field_for
from scripts.models import DecodingChoice, LinearCode, PliableInstance, members_of

logger = logging.getLogger(__name__)


def code_array(code: LinearCode):
    """The generator matrix as a GF(q) array of shape (l, m)."""
    GF = field_for(code.q)
    return GF(np.array(code.rows, dtype=int).reshape(len(code.rows), code.m))


def decodable_messages(matrix, m: int, receiver: int) -> list[int]:
    """Messages i not in *receiver* with e_i in rowspace + span{e_j : j in receiver}.

    Projecting out the known columns reduces this to: the restriction of
    e_i is in the rowspace of the projected matrix, which holds exactly when
    the reduced row echelon form contains that unit row.
    """
    if matrix.shape[0] == 0:
        return []
    unknown = [j for j in range(m) if not receiver >> j & 1]
    reduced = matrix[:, unknown].row_reduce()
    found = []
    for row in reduced:
        support = np.flatnonzero(row)
        if len(support) == 1:
            found.append(unknown[support[0]] + 1)
    return sorted(found)


def decodes_all(inst: PliableInstance, matrix, receivers=None) -> bool:
    """True when every present receiver decodes something; stops at the first failure."""
    for receiver in receivers if receivers is not None else inst.present_receivers():
        if not decodable_messages(matrix, inst.m, receiver):
            return False
    return True


def verify_code(inst: PliableInstance, code: LinearCode) -> DecodingChoice | None:
    """Return the decoding choice (smallest decodable message) or None on failure."""
    if code.m != inst.m:
        raise ValueError(f"code has m={code.m}, instance has m={inst.m}")
    matrix = code_array(code)
    assignment: dict[int, int] = {}
    for receiver in inst.present_receivers():
        found = decodable_messages(matrix, inst.m, receiver)
        if not found:
            logger.debug(
                "receiver %s decodes nothing from a length-%d code",
                members_of(receiver), len(code),
            )
            return None
        assignment[receiver] = found[0]
    return DecodingChoice(assignment)
