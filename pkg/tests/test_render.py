import json

from scripts.models import SweepRecord, mask_of
from scripts.render import TEMPLATE_DIR, load_records, render, render_report, summarize


def record(absent, closed, oracle, **kw):
    return SweepRecord(
        m=4,
        absent=tuple(mask_of(h) for h in absent),
        lb_chain=kw.get("lb_chain", 4 - len(absent)),
        lb_algo=kw.get("lb_algo", 3),
        closed_form=closed,
        oracle_len=oracle,
        oracle_q=2,
        structure=kw.get("structure", "none"),
        subfamily=kw.get("subfamily", False),
    )


RECORDS = [
    record([], 4, 4, lb_chain=4, lb_algo=4),
    record([[1]], 3, 3),
    record([[1], [1, 2]], 3, 3),
    record([[], [1, 2], [3, 4]], 2, 2, lb_algo=2, structure="perfect_nested", subfamily=True),
]


def test_summarize_groups_by_absent_count():
    rows = summarize(RECORDS)
    assert [r["n_absent"] for r in rows] == [0, 1, 2, 3]
    last = rows[-1]
    assert last["count"] == 1
    assert last["rate_m2"] == 1
    assert last["structured"] == 1
    assert last["tight_algo"] == 1


def test_render_without_disagreements():
    markdown = render(RECORDS, TEMPLATE_DIR)
    assert markdown.startswith("# Closed-form sweep, m = 4")
    assert "matches the exhaustive linear code length" in markdown
    assert "`{1};{1,2}`" in markdown
    assert "perfect_nested" in markdown


def test_render_lists_disagreements():
    bad = record([[1], [2]], 3, 2)
    markdown = render(RECORDS + [bad], TEMPLATE_DIR)
    assert "**1 disagreement(s)**" in markdown
    assert "| `{1};{2}` | 3 | 2 | GF(2) |" in markdown


def test_render_empty():
    markdown = render([], TEMPLATE_DIR)
    assert markdown.startswith("# Closed-form sweep\n")
    assert "from 0 canonical instances" in markdown


def test_load_records(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps([r.to_dict() for r in RECORDS]))
    assert load_records(str(path)) == RECORDS


def test_load_records_missing_or_invalid(tmp_path, capsys):
    assert load_records(str(tmp_path / "missing.json")) == []
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert load_records(str(bad)) == []
    assert "[render] Warning" in capsys.readouterr().out


def test_render_report_writes_file(tmp_path):
    output = tmp_path / "site" / "sweep_m4.md"
    markdown = render_report(RECORDS, TEMPLATE_DIR, str(output))
    assert output.read_text(encoding="utf-8") == markdown
