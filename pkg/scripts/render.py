#!/usr/bin/env python3
"""
render.py: Renders a sweep's JSON records as a Markdown report.

Loads records from the sweep JSON twin (data/sweep_m4.json by default, or the
path given as the first argument), applies the Jinja2 template and writes
the report under site/.

Usage:
    python scripts/render.py [data/sweep_m5.json]
"""

from __future__ import annotations

import json
import os
import sys
from datetime import datetime
from itertools import groupby

from jinja2 import Environment, FileSystemLoader

# ---------------------------------------------------------------------------
# Resolve project root (one level up from scripts/)
# ---------------------------------------------------------------------------
SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(SCRIPT_DIR)

if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from scripts.models import SweepRecord, load_config  # noqa: E402

# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------
CONFIG_PATH = os.path.join(PROJECT_ROOT, "config.yaml")
DATA_FILE = os.path.join(PROJECT_ROOT, "data", "sweep_m4.json")
TEMPLATE_DIR = os.path.join(PROJECT_ROOT, "templates")
OUTPUT_DIR = os.path.join(PROJECT_ROOT, "site")


def load_records(path: str) -> list[SweepRecord]:
    """Load sweep records from a JSON file. Returns an empty list if the file
    is missing or contains invalid JSON."""
    if not os.path.isfile(path):
        print(f"[render] Warning: {path} not found. Using empty record list.")
        return []
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError:
            print(f"[render] Warning: {path} is not valid JSON. Using empty record list.")
            return []
    if isinstance(data, dict) and "records" in data:
        data = data["records"]
    return [SweepRecord.from_dict(d) for d in data]


def summarize(records: list[SweepRecord]) -> list[dict]:
    """Per absent-family size: counts, agreement and the rates that occur."""
    rows = []
    records = sorted(records, key=lambda r: r.n_absent)
    for n_absent, group in groupby(records, key=lambda r: r.n_absent):
        group = list(group)
        m = group[0].m
        rows.append({
            "n_absent": n_absent,
            "count": len(group),
            "agree": sum(1 for r in group if r.agree),
            "rate_m1": sum(1 for r in group if r.oracle_len == m - 1),
            "rate_m2": sum(1 for r in group if r.oracle_len == m - 2),
            "structured": sum(1 for r in group if r.subfamily),
            "tight_algo": sum(1 for r in group if r.lb_algo == r.oracle_len),
            "tight_chain": sum(1 for r in group if r.lb_chain == r.oracle_len),
        })
    return rows


def render(records: list[SweepRecord], template_dir: str = TEMPLATE_DIR) -> str:
    """Render the Jinja2 template with the sweep records and return Markdown."""
    env = Environment(
        loader=FileSystemLoader(template_dir),
        autoescape=False,
        trim_blocks=True,
        lstrip_blocks=True,
    )
    template = env.get_template("sweep.md.j2")
    return template.render(
        m=records[0].m if records else None,
        total=len(records),
        disagreements=[r for r in records if not r.agree],
        summary=summarize(records),
        records=records,
        generated=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
    )


def render_report(records: list[SweepRecord], template_dir: str, output: str) -> str:
    """Render *records* and write the Markdown to *output*. Returns the text."""
    markdown = render(records, template_dir)
    directory = os.path.dirname(output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(markdown)
    print(f"[render] Wrote {output} ({len(markdown):,} bytes)")
    return markdown


def main() -> None:
    config = load_config(CONFIG_PATH) if os.path.isfile(CONFIG_PATH) else {}
    report = config.get("report", {})
    data_file = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        PROJECT_ROOT, report.get("sweep_json", DATA_FILE)
    )
    print(f"[render] Loading records from {data_file}")
    records = load_records(data_file)
    print(f"[render] Loaded {len(records)} record(s).")

    stem = os.path.splitext(os.path.basename(data_file))[0]
    output_dir = os.path.join(PROJECT_ROOT, report.get("output_dir", "site"))
    render_report(
        records,
        os.path.join(PROJECT_ROOT, report.get("templates", "templates")),
        os.path.join(output_dir, f"{stem}.md"),
    )


if __name__ == "__main__":
    main()
