import pytest

from scripts.models import (
    BoundReport,
    ChainStep,
    DecodingChoice,
    InstanceError,
    LinearCode,
    NestedChain,
    Partition,
    PliableInstance,
    StructureClass,
    SweepRecord,
    load_config,
    mask_of,
    members_of,
    relabel_mask,
    smallest_missing,
)


def test_bitmask_helpers():
    assert mask_of([1, 3]) == 0b101
    assert members_of(0b101) == [1, 3]
    assert smallest_missing(mask_of([1, 2, 4])) == 3
    assert relabel_mask(mask_of([1, 2]), (3, 1, 2)) == mask_of([3, 1])


def test_instance_validation():
    with pytest.raises(InstanceError):
        PliableInstance(3, frozenset({0b111}))
    with pytest.raises(InstanceError):
        PliableInstance(0)


def test_instance_relabel_and_dict(p2):
    moved = p2.relabel((2, 1, 3, 4, 5))
    assert mask_of([2, 1, 4]) in moved.absent
    assert PliableInstance.from_dict(p2.to_dict()) == p2


def test_nested_chain_must_be_strict():
    NestedChain((mask_of([1]), mask_of([1, 2])))
    with pytest.raises(ValueError):
        NestedChain((mask_of([1, 2]), mask_of([1])))


def test_decoding_choice_fallback(p1):
    D = DecodingChoice({0: 3}, fallback="smallest")
    assert D.decode(0) == 3
    assert D.decode(mask_of([1, 2])) == 3
    assert DecodingChoice({}).get(0) is None
    with pytest.raises(ValueError):
        DecodingChoice({mask_of([1]): 1})
    assert DecodingChoice.from_dict(D.to_dict()) == D


def test_decoding_choice_validate(p1):
    with pytest.raises(ValueError):
        DecodingChoice({mask_of([3]): 1}).validate(p1)
    DecodingChoice(fallback="smallest").validate(p1)


def test_chain_step_kinds():
    ChainStep("skip", 2)
    with pytest.raises(ValueError):
        ChainStep("jump", 2)


def test_partition_validation():
    p = Partition(4, (0, mask_of([1, 2]), mask_of([3, 4])))
    assert p.L == 2
    assert p.leader(2) == 3
    assert p.union([1]) == mask_of([1, 2])
    with pytest.raises(ValueError):
        Partition(4, (0, mask_of([1, 2])))
    with pytest.raises(ValueError):
        Partition(4, (0, 0, mask_of([1, 2, 3, 4])))


def test_linear_code_validation():
    code = LinearCode.from_dict({"q": 3, "rows": [[1, 2, 0]]})
    assert code.m == 3
    with pytest.raises(InstanceError):
        LinearCode(q=2, m=2, rows=((1, 2),))
    with pytest.raises(InstanceError):
        LinearCode.from_dict({"q": 2, "rows": []})
    assert len(LinearCode.from_dict({"q": 2, "rows": []}, m=3)) == 0


def test_structure_tag_validation():
    assert StructureClass().to_dict() == {"tag": "none"}
    with pytest.raises(ValueError):
        StructureClass("nested")


def test_bound_report_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        BoundReport(m=4, lb_longest_chain=4, ub_construction=3)


def test_sweep_record_csv_row():
    record = SweepRecord(m=3, absent=(mask_of([1]), mask_of([1, 2])), lb_chain=1, lb_algo=2,
                         closed_form=2, oracle_len=2, oracle_q=2)
    row = record.csv_row()
    assert row["canonical_absent"] == "{1};{1,2}"
    assert row["agree"] is True
    assert list(row) == list(SweepRecord.CSV_COLUMNS)
    assert SweepRecord.from_dict(record.to_dict()) == record


def test_sweep_record_without_closed_form_agrees():
    record = SweepRecord(m=3, absent=(), lb_chain=3, lb_algo=3, closed_form=None,
                         oracle_len=3, oracle_q=2)
    assert record.agree
    assert record.csv_row()["closed_form"] == ""


def test_load_config(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("sweep:\n  m: 5\n")
    assert load_config(str(path)) == {"sweep": {"m": 5}}
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config(str(empty)) == {}
