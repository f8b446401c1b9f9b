"""
Brute-force ground truth for small instances.

- min_linear_length: exhaustive search over generator matrices in reduced
  row echelon form, so each rowspace is tried once.
- brute_force_L_star: L* from every total decoding choice and every run.
- sweep: all canonical instances up to a number of absent receivers, with
  the closed form checked against the exhaustive code length.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from itertools import combinations, product

import numpy as np

from scripts.achievability.field import field_for
from scripts.achievability.verify import decodes_all
from scripts.bounds import (
    algorithmic_bound,
    classify_structure,
    closed_form_beta,
    has_short_code_subfamily,
    longest_chain_bound,
)
from scripts.core import canonical_key, longest_nested_chain, search_cap
from scripts.models import (
    CapExceededError,
    LinearCode,
    PliableInstance,
    SweepRecord,
    bit,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_M = 5            # exhaustive code search
BRUTE_FORCE_MAX_M = 4       # enumeration of every total decoding choice
SWEEP_MAX_M = 5
SWEEP_MAX_ABSENT = 4
SWEEP_FIELDS = (2, 3)
DEFAULT_MAX_CODES = 1_000_000   # matrices one min_linear_length call may try


# ---------------------------------------------------------------------------
# Minimum linear code length
# ---------------------------------------------------------------------------

def gaussian_binomial(m: int, l: int, q: int) -> int:
    """Number of l-dimensional subspaces of GF(q)^m."""
    num, den = 1, 1
    for i in range(l):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref_matrices(m: int, l: int, q: int):
    """Yield every l x m matrix over GF(q) in reduced row echelon form with rank l."""
    for pivots in combinations(range(m), l):
        pivot_set = set(pivots)
        free = [
            (r, c) for r, p in enumerate(pivots)
            for c in range(p + 1, m) if c not in pivot_set
        ]
        for values in product(range(q), repeat=len(free)):
            mat = np.zeros((l, m), dtype=int)
            for r, p in enumerate(pivots):
                mat[r, p] = 1
            for (r, c), v in zip(free, values):
                mat[r, c] = v
            yield mat


def search_linear_code(
    inst: PliableInstance,
    q: int,
    l_max: int,
    *,
    l_min: int = 0,
    max_codes: int = DEFAULT_MAX_CODES,
) -> LinearCode | None:
    """Shortest linear code over GF(q) of length in [l_min, l_max] that works, or None."""
    cap = search_cap(ORACLE_MAX_M)
    if inst.m > cap:
        raise CapExceededError(f"exhaustive code search is capped at m={cap}, got m={inst.m}")
    l_max = min(l_max, inst.m)
    l_min = max(l_min, 0)
    total = sum(gaussian_binomial(inst.m, l, q) for l in range(l_min, l_max + 1))
    if total > max_codes:
        raise CapExceededError(
            f"{total} candidate codes over GF({q}) exceed the cap of {max_codes}"
        )

    GF = field_for(q)
    # receivers missing a single message fail most often, so try them first
    receivers = sorted(inst.present_receivers(), key=lambda h: (-bin(h).count("1"), h))
    for l in range(l_min, l_max + 1):
        tried = 0
        for mat in rref_matrices(inst.m, l, q):
            tried += 1
            if decodes_all(inst, GF(mat), receivers):
                logger.debug("length %d works over GF(%d) after %d matrices", l, q, tried)
                return LinearCode(q=q, m=inst.m, rows=tuple(map(tuple, mat.tolist())))
        logger.debug("no length-%d code over GF(%d) (%d matrices)", l, q, tried)
    return None


def min_linear_length(
    inst: PliableInstance,
    q: int,
    l_max: int,
    *,
    l_min: int = 0,
    max_codes: int = DEFAULT_MAX_CODES,
) -> int | None:
    """Smallest length l <= l_max of a linear code over GF(q) satisfying every present receiver."""
    code = search_linear_code(inst, q, l_max, l_min=l_min, max_codes=max_codes)
    return None if code is None else len(code)


# ---------------------------------------------------------------------------
# Naive L*
# ---------------------------------------------------------------------------

def _naive_min_skips(inst: PliableInstance, D: dict[int, int], ceiling: int) -> int:
    """Fewest skips over all runs; stops early once a run needs <= *ceiling*."""
    full = inst.full
    best = inst.m + 1

    def walk(chain: int, skips: int) -> None:
        nonlocal best
        if skips >= best or best <= ceiling:
            return
        if chain == full:
            best = skips
            return
        if chain not in inst.absent:
            walk(chain | bit(D[chain]), skips)
            return
        for sub in range(chain):
            if sub & chain == sub and sub not in inst.absent and not chain & bit(D[sub]):
                walk(chain | bit(D[sub]), skips)
        for a in range(1, inst.m + 1):
            if not chain & bit(a):
                walk(chain | bit(a), skips + 1)

    walk(0, 0)
    return best


def brute_force_L_star(inst: PliableInstance) -> int:
    """L* by enumerating every total decoding choice; no memoization."""
    cap = search_cap(BRUTE_FORCE_MAX_M)
    if inst.m > cap:
        raise CapExceededError(f"brute-force L* is capped at m={cap}, got m={inst.m}")
    upper = len(longest_nested_chain(inst))
    if upper == 0:
        return 0
    present = list(inst.present_receivers())
    choices = [[x for x in range(1, inst.m + 1) if not h & bit(x)] for h in present]
    value = 0
    for combo in product(*choices):
        skips = _naive_min_skips(inst, dict(zip(present, combo)), value)
        if skips > value:
            value = skips
            if value == upper:
                break
    return value


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def canonical_instances(m: int, max_absent: int) -> list[PliableInstance]:
    """One instance per relabeling orbit with at most *max_absent* absent receivers."""
    full = (1 << m) - 1
    level: set[tuple[int, ...]] = {()}
    out = [PliableInstance(m, frozenset())]
    for k in range(1, max_absent + 1):
        nxt: set[tuple[int, ...]] = set()
        for family in level:
            for x in range(full):
                if x not in family:
                    key, _ = canonical_key(family + (x,), m)
                    nxt.add(key)
        level = nxt
        out.extend(PliableInstance(m, frozenset(key)) for key in sorted(nxt))
        logger.debug("m=%d: %d canonical families with %d absent receivers", m, len(nxt), k)
    return out


def sweep_one(
    inst: PliableInstance, q: int, fallback_q: int | None = 3, merge_skip_orbits: bool = False
) -> SweepRecord:
    """Bounds, closed form and exhaustive code length for one instance."""
    closed = closed_form_beta(inst)
    lb_algo = algorithmic_bound(inst, merge_skip_orbits=merge_skip_orbits)
    oracle_len = min_linear_length(inst, q, inst.m, l_min=lb_algo)
    oracle_q = q
    if closed is not None and oracle_len != closed and fallback_q and fallback_q != q:
        logger.warning(
            "GF(%d) gives %s but the closed form is %d for %s; retrying over GF(%d)",
            q, oracle_len, closed, inst.to_dict()["absent"], fallback_q,
        )
        oracle_len = min_linear_length(inst, fallback_q, inst.m, l_min=lb_algo)
        oracle_q = fallback_q
    return SweepRecord(
        m=inst.m,
        absent=inst.sorted_absent(),
        lb_chain=longest_chain_bound(inst),
        lb_algo=lb_algo,
        closed_form=closed,
        oracle_len=oracle_len,
        oracle_q=oracle_q,
        structure=classify_structure(inst).tag,
        subfamily=has_short_code_subfamily(inst),
    )


def sweep(
    m: int,
    max_absent: int,
    q: int,
    *,
    fallback_q: int | None = 3,
    workers: int = 1,
    merge_skip_orbits: bool = False,
) -> list[SweepRecord]:
    """Check the closed form against the exhaustive oracle on every canonical instance."""
    cap = search_cap(SWEEP_MAX_M)
    if m > cap:
        raise CapExceededError(f"sweeps are capped at m={cap}, got m={m}")
    if max_absent > SWEEP_MAX_ABSENT:
        raise CapExceededError(
            f"sweeps are capped at {SWEEP_MAX_ABSENT} absent receivers, got {max_absent}"
        )
    if q not in SWEEP_FIELDS:
        raise ValueError(f"sweep q must be one of {SWEEP_FIELDS}, got {q}")

    instances = canonical_instances(m, max_absent)
    logger.info("Sweeping %d canonical instances (m=%d, <= %d absent, GF(%d))",
                len(instances), m, max_absent, q)

    records: list[SweepRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(sweep_one, inst, q, fallback_q, merge_skip_orbits)
                for inst in instances
            ]
            for done, future in enumerate(as_completed(futures), start=1):
                records.append(future.result())
                if done % 100 == 0:
                    logger.info("  %d / %d instances done", done, len(instances))
    else:
        for done, inst in enumerate(instances, start=1):
            records.append(sweep_one(inst, q, fallback_q, merge_skip_orbits))
            if done % 100 == 0:
                logger.info("  %d / %d instances done", done, len(instances))

    records.sort(key=lambda r: (r.n_absent, r.absent))
    disagreements = sum(1 for r in records if not r.agree)
    logger.info("Sweep finished: %d records, %d disagreements", len(records), disagreements)
    return records


def twin_path(path: str, fmt: str) -> str:
    """The path of the other format written next to *path*."""
    root, _ = os.path.splitext(path)
    return root + (".json" if fmt == "csv" else ".csv")


def write_sweep(records: list[SweepRecord], path: str, fmt: str = "csv") -> tuple[str, str]:
    """Write *records* to *path* in *fmt* and the other format alongside it."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got '{fmt}'")
    twin = twin_path(path, fmt)
    csv_path, json_path = (path, twin) if fmt == "csv" else (twin, path)
    for target in (csv_path, json_path):
        directory = os.path.dirname(target)
        if directory:
            os.makedirs(directory, exist_ok=True)

    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SweepRecord.CSV_COLUMNS)
        writer.writeheader()
        for record in records:
            writer.writerow(record.csv_row())
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in records], fh, indent=2, ensure_ascii=False)
    logger.info("Wrote %d records to %s and %s", len(records), csv_path, json_path)
    return csv_path, json_path
