#!/usr/bin/env python3
"""
cli.py: Command-line front end for the pliable index coding solver.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors
(missing files, schema violations, search caps).

Usage (from the project root):
    python scripts/cli.py bound --in data/p1.json
    python scripts/cli.py verify --in data/p2.json --code data/p2_code.json
    python scripts/cli.py sweep --m 4 --max-absent 4 --q 2 --out data/sweep_m4.csv
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click

# ---------------------------------------------------------------------------
# Resolve project root (one level up from scripts/)
# ---------------------------------------------------------------------------
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from scripts.achievability.builder import best_construction  # noqa: E402
from scripts.achievability.verify import verify_code  # noqa: E402
from scripts.bounds import bound_report, classify_structure, structured_subfamilies  # noqa: E402
from scripts.chain_engine import (  # noqa: E402
    L_STAR_MAX_WORK,
    POLICIES,
    acyclic_certificate,
    adversarial_decoding,
    min_skips,
    run_chain,
)
from scripts.core import parse_instance, search_cap  # noqa: E402
from scripts.models import (  # noqa: E402
    CapExceededError,
    DecodingChoice,
    InstanceError,
    LinearCode,
    PliableInstance,
    load_config,
    members_of,
)
from scripts.oracle import (  # noqa: E402
    BRUTE_FORCE_MAX_M,
    brute_force_L_star,
    search_linear_code,
    sweep as run_sweep,
    write_sweep,
)

CONFIG_PATH = os.path.join(PROJECT_ROOT, "config.yaml")

logger = logging.getLogger(__name__)


class InputError(click.ClickException):
    """Missing file, schema violation or search cap; exits with status 2."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_instance(path: str) -> PliableInstance:
    try:
        return parse_instance(_read(path))
    except InstanceError as exc:
        raise InputError(f"schema violation in {path}: {exc}") from exc


def _load_code(path: str, m: int) -> LinearCode:
    try:
        code = LinearCode.from_dict(json.loads(_read(path)), m=m)
    except json.JSONDecodeError as exc:
        raise InputError(f"schema violation in {path}: malformed JSON: {exc}") from exc
    except InstanceError as exc:
        raise InputError(f"schema violation in {path}: {exc}") from exc
    if code.m != m:
        raise InputError(f"code in {path} has m={code.m}, instance has m={m}")
    return code


def _solver_options(config: dict) -> dict:
    solver = config.get("solver", {})
    return {
        "merge_skip_orbits": solver.get("merge_skip_orbits", False),
        "max_work": int(solver.get("max_work", L_STAR_MAX_WORK)),
    }


def _parse_q(raw: str | None, default: str | int = "auto") -> str | int:
    if raw is None:
        return default
    if raw == "auto":
        return raw
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"--q must be an integer or 'auto', got {raw!r}") from exc


def _emit(payload, out_path: str | None) -> None:
    """Print *payload* as JSON, and write it to *out_path* when given."""
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    if out_path:
        directory = os.path.dirname(out_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        logger.info("Wrote %s", out_path)
    click.echo(text)


def _decoding_map(D: DecodingChoice) -> list[dict]:
    return [{"receiver": members_of(h), "decodes": x} for h, x in sorted(D.assignment.items())]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group()
@click.option("--config", "config_path", default=CONFIG_PATH, show_default=True,
              help="YAML file with run defaults.")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
@click.pass_context
def main(ctx: click.Context, config_path: str, verbose: bool) -> None:
    """Bounds, constructions and exhaustive checks for pliable index coding."""
    config = load_config(config_path) if os.path.isfile(config_path) else {}
    level = "DEBUG" if verbose else config.get("logging", {}).get("level", "INFO")
    if not logging.getLogger().handlers:
        logging.basicConfig(
            level=getattr(logging, str(level).upper(), logging.INFO),
            format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    ctx.obj = config


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--q", "q_raw", default=None, help="Field size for the construction, or 'auto'.")
@click.option("--out", "out_path", default=None, help="Write the report here as well.")
@click.pass_obj
def bound(config: dict, in_path: str, q_raw: str | None, out_path: str | None) -> None:
    """Lower bounds, closed form and best verified construction."""
    inst = _load_instance(in_path)
    try:
        report = bound_report(inst, _parse_q(q_raw), **_solver_options(config))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(report.to_dict(), out_path)


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--out", "out_path", default=None)
def classify(in_path: str, out_path: str | None) -> None:
    """Structure tag of the absent family."""
    inst = _load_instance(in_path)
    _emit(classify_structure(inst).to_dict(), out_path)


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--q", "q_raw", default=None, help="Field size, or 'auto'.")
@click.option("--out", "out_path", default=None, help="Write the code JSON here.")
@click.pass_context
def construct(ctx: click.Context, in_path: str, q_raw: str | None, out_path: str | None) -> None:
    """Shortest structure code for the instance, verified before it is emitted."""
    inst = _load_instance(in_path)
    structures = [classify_structure(inst)] + structured_subfamilies(inst)
    try:
        code = best_construction(inst, structures, _parse_q(q_raw))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    logger.info("Constructed a length-%d code over GF(%d)", len(code), code.q)
    _emit(code.to_dict(), out_path)
    if verify_code(inst, code) is None:
        click.echo("constructed code failed verification", err=True)
        ctx.exit(1)


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--code", "code_path", required=True, help="Code JSON.")
@click.option("--out", "out_path", default=None)
@click.pass_context
def verify(ctx: click.Context, in_path: str, code_path: str, out_path: str | None) -> None:
    """Check that every present receiver decodes a new message."""
    inst = _load_instance(in_path)
    code = _load_code(code_path, inst.m)
    try:
        D = verify_code(inst, code)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if D is None:
        click.echo(f"FAIL: some present receiver decodes nothing from {code_path}", err=True)
        ctx.exit(1)
    _emit({"ok": True, "length": len(code), "q": code.q, "decoding": _decoding_map(D)}, out_path)


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--q", "q", type=int, default=None, help="Prime field size.")
@click.option("--l-max", "l_max", type=int, default=None, help="Longest code to try (default m).")
@click.option("--out", "out_path", default=None)
@click.pass_obj
def oracle(config: dict, in_path: str, q: int | None, l_max: int | None,
           out_path: str | None) -> None:
    """Exhaustive minimum linear code length (and naive L* when small enough)."""
    inst = _load_instance(in_path)
    settings = config.get("oracle", {})
    q = q if q is not None else settings.get("q", 2)
    l_max = l_max if l_max is not None else inst.m
    try:
        code = search_linear_code(
            inst, q, l_max, max_codes=settings.get("max_codes", 1_000_000)
        )
    except CapExceededError as exc:
        raise InputError(f"cap exceeded: {exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {
        "m": inst.m,
        "q": q,
        "l_max": l_max,
        "min_linear_length": None if code is None else len(code),
        "code": None if code is None else code.to_dict(),
    }
    if inst.m <= search_cap(BRUTE_FORCE_MAX_M):
        payload["brute_force_L_star"] = brute_force_L_star(inst)
    _emit(payload, out_path)


@main.command()
@click.option("--m", "m", type=int, default=None, help="Number of messages.")
@click.option("--max-absent", type=int, default=None, help="Largest absent family size.")
@click.option("--q", "q", type=int, default=None, help="Field size (2 or 3).")
@click.option("--out", "out_path", default=None, help="Output path; the other format is written alongside.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.pass_context
def sweep(ctx: click.Context, m, max_absent, q, out_path, fmt, workers) -> None:
    """Closed form against the exhaustive oracle on every canonical instance."""
    config = ctx.obj
    settings = config.get("sweep", {})
    oracle_settings = config.get("oracle", {})
    m = m if m is not None else settings.get("m", 4)
    max_absent = max_absent if max_absent is not None else settings.get("max_absent", 4)
    q = q if q is not None else settings.get("q", 2)
    fmt = fmt or settings.get("format", "csv")
    out_path = out_path or os.path.join("data", f"sweep_m{m}.{fmt}")
    workers = workers if workers is not None else settings.get("workers", 1)
    try:
        records = run_sweep(
            m, max_absent, q,
            fallback_q=oracle_settings.get("fallback_q", 3),
            workers=workers,
            merge_skip_orbits=config.get("solver", {}).get("merge_skip_orbits", False),
        )
    except CapExceededError as exc:
        raise InputError(f"cap exceeded: {exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    main_path, twin = write_sweep(records, out_path, fmt)
    disagreements = [r for r in records if not r.agree]
    click.echo(f"{len(records)} instances, {len(disagreements)} disagreements -> {main_path}, {twin}")
    if disagreements:
        for record in disagreements:
            click.echo(f"  disagree: {record.canonical_absent()} closed={record.closed_form} "
                       f"oracle={record.oracle_len}", err=True)
        ctx.exit(1)


@main.command()
@click.option("--in", "in_path", required=True, help="Instance JSON.")
@click.option("--code", "code_path", default=None,
              help="Take D from this code's decoding map instead of the adversarial choice.")
@click.option("--policy", type=click.Choice(sorted(POLICIES)), default="lookahead", show_default=True)
@click.option("--emit-trace", "trace_path", default=None, help="Write the chain trace JSON here.")
@click.pass_context
def trace(ctx: click.Context, in_path: str, code_path: str | None, policy: str,
          trace_path: str | None) -> None:
    """Run one decoding chain and check its acyclic certificate."""
    inst = _load_instance(in_path)
    config = ctx.obj
    if code_path:
        D = verify_code(inst, _load_code(code_path, inst.m))
        if D is None:
            click.echo(f"FAIL: {code_path} does not satisfy every present receiver", err=True)
            ctx.exit(1)
        L_star = None
    else:
        try:
            L_star, D = adversarial_decoding(inst, **_solver_options(config))
        except CapExceededError as exc:
            raise InputError(f"cap exceeded: {exc}") from exc

    chain_trace = run_chain(inst, D, POLICIES[policy]())
    _, acyclic = acyclic_certificate(inst, chain_trace, D)
    if trace_path:
        directory = os.path.dirname(trace_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(trace_path, "w", encoding="utf-8") as fh:
            json.dump(chain_trace.to_dict(), fh, indent=2)
        logger.info("Wrote trace to %s", trace_path)

    click.echo(json.dumps({
        "policy": policy,
        "L_star": L_star,
        "min_skips": min_skips(inst, D),
        "skipped": chain_trace.skipped,
        "hits": [members_of(h) for h in chain_trace.hits],
        "order": chain_trace.order,
        "acyclic": acyclic,
    }, indent=2))
    if not acyclic:
        ctx.exit(1)


if __name__ == "__main__":
    main()
