from itertools import islice, product

import pytest

from families import partitions, perfect_instance, shrunk_instances, truncated_instance
from scripts.achievability.builder import best_construction, identity_code
from scripts.achievability.cyclic import cyclic_partition_code
from scripts.achievability.field import (
    primitive_element,
    resolve_q,
    smallest_prime_at_least,
)
from scripts.achievability.patch import imperfect_patch_code
from scripts.achievability.truncated import truncated_code
from scripts.achievability.verify import verify_code
from scripts.bounds import classify_structure, structured_subfamilies
from scripts.models import LinearCode, Partition, PliableInstance, mask_of, smallest_missing


def partition(m, *parts):
    return Partition(m, tuple(mask_of(p) for p in parts))


def test_field_helpers():
    assert primitive_element(7) == 3
    assert primitive_element(2) == 1
    assert smallest_prime_at_least(4) == 5
    assert smallest_prime_at_least(5) == 5
    assert smallest_prime_at_least(1) == 2
    assert resolve_q("auto", 4) == 5
    with pytest.raises(ValueError):
        resolve_q(4)
    with pytest.raises(ValueError):
        resolve_q(3, minimum=4)


def test_cyclic_code_example():
    p = partition(5, [1], [2, 3], [4, 5])
    code = cyclic_partition_code(p, 2)
    assert code.rows == ((1, 0, 0, 0, 0), (0, 1, 1, 0, 0), (0, 0, 0, 1, 1))
    assert verify_code(perfect_instance(p), code) is not None


def test_cyclic_code_single_part():
    code = cyclic_partition_code(partition(4, [], [1, 2, 3, 4]), 2)
    assert len(code) == 3
    assert code.rows[0] == (1, 1, 0, 0)


def test_truncated_code_example():
    p = partition(3, [], [1], [2], [3])
    code = truncated_code(p, 1)
    assert code.q == 2
    assert code.rows == ((1, 1, 1),)
    assert verify_code(truncated_instance(p, 1), code) is not None


def test_truncated_code_top_level_is_cyclic():
    p = partition(5, [1], [2, 3], [4], [5])
    assert truncated_code(p, p.L - 1, 2).rows == cyclic_partition_code(p, 2).rows


def test_truncated_code_field_choice():
    p = partition(4, [], [1], [2], [3], [4])
    assert truncated_code(p, 0).q == 5
    with pytest.raises(ValueError):
        truncated_code(p, 0, 3)
    with pytest.raises(ValueError):
        truncated_code(p, 4)


def test_patch_code_example():
    p = partition(4, [], [1, 2], [3, 4])
    code = imperfect_patch_code(p, {1}, 2)
    assert set(code.rows) == {(1, 1, 0, 0), (0, 0, 1, 1), (0, 0, 1, 0)}
    shrunk = PliableInstance(4, frozenset({0, mask_of([1]), mask_of([3, 4])}))
    assert verify_code(shrunk, code) is not None


def test_patch_code_rejects_full_Q():
    with pytest.raises(ValueError):
        imperfect_patch_code(partition(4, [], [1, 2], [3, 4]), {1, 2}, 2)


def test_patch_code_on_p1(p1):
    code = imperfect_patch_code(partition(6, [3, 4], [1, 2], [5, 6]), (), 2)
    assert len(code) == 5
    assert verify_code(p1, code) is not None


def test_verify_p2_code(p2):
    code = LinearCode(q=2, m=5, rows=(
        (0, 0, 1, 0, 1), (1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 0, 1, 0)))
    D = verify_code(p2, code)
    assert D is not None
    D.validate(p2)
    assert D.get(0) == 1


def test_verify_identity_code(p1):
    D = verify_code(p1, identity_code(6))
    assert D is not None
    for receiver, message in D.assignment.items():
        assert message == smallest_missing(receiver)


def test_no_single_row_code_for_p2(p2):
    for row in product(range(2), repeat=5):
        if any(row):
            assert verify_code(p2, LinearCode(q=2, m=5, rows=(row,))) is None


def test_verify_rejects_mismatched_width(p2):
    with pytest.raises(ValueError):
        verify_code(p2, identity_code(4))


def test_row_count_identities():
    for m in range(2, 9):
        for L in range(1, min(m, 3) + 1):
            for p in islice(partitions(m, L), 5):
                assert len(cyclic_partition_code(p)) == m - L
                assert len(imperfect_patch_code(p, ())) == m - L + 1
                for T in range(L):
                    assert len(truncated_code(p, T)) == m - T - 1


def test_constructions_verify_small():
    for m in range(2, 6):
        for L in range(1, min(m, 3) + 1):
            for p in partitions(m, L):
                assert verify_code(perfect_instance(p), cyclic_partition_code(p)) is not None
                for T in range(L):
                    code = truncated_code(p, T)
                    assert verify_code(truncated_instance(p, T), code) is not None


def test_patched_codes_verify_small():
    for m in range(3, 6):
        for p in islice(partitions(m, 2), 6):
            for inst, Q, _ in shrunk_instances(p):
                assert verify_code(inst, imperfect_patch_code(p, Q)) is not None


@pytest.mark.slow
def test_constructions_verify_m6():
    for L in range(1, 4):
        for p in partitions(6, L):
            assert verify_code(perfect_instance(p), cyclic_partition_code(p)) is not None
            for T in range(L):
                assert verify_code(truncated_instance(p, T), truncated_code(p, T)) is not None
            if L >= 2:
                for inst, Q, _ in shrunk_instances(p):
                    assert verify_code(inst, imperfect_patch_code(p, Q)) is not None


def test_decodability_is_monotone(rng):
    p = partition(5, [1], [2, 3], [4, 5])
    inst = perfect_instance(p)
    code = cyclic_partition_code(p)
    for _ in range(10):
        extra = tuple(rng.randrange(2) for _ in range(5))
        bigger = LinearCode(q=2, m=5, rows=code.rows + (extra,))
        assert verify_code(inst, bigger) is not None


def test_truncated_code_over_many_primes():
    p = partition(5, [1], [2], [3, 4], [5])
    inst = truncated_instance(p, 0)
    for q in (5, 7, 11, 13, 17, 19, 23, 29, 31):
        code = truncated_code(p, 0, q)
        assert code.q == q
        assert verify_code(inst, code) is not None


def test_best_construction_p2(p2):
    structures = [classify_structure(p2)] + structured_subfamilies(p2)
    code = best_construction(p2, structures)
    assert len(code) == 4
    assert verify_code(p2, code) is not None


def test_best_construction_without_absent_receivers():
    inst = PliableInstance(3)
    code = best_construction(inst, [classify_structure(inst)])
    assert len(code) == 3
