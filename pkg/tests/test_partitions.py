import pytest

from conftest import P
from strata_engine.engine.combinatorics.partitions import (
    NumberPartition,
    SetPartition,
    bell_number,
    coarsenings,
    gamma_k,
    is_generic,
    is_special,
    join,
    number_partitions,
    parse_family,
    refines_number,
    refines_set,
    set_partitions,
    set_partitions_of_type,
    type_of,
)
from strata_engine.engine.errors import InvalidInputError


def test_parse_sorts_parts_and_prints_canonically():
    lam = NumberPartition.parse("1, 3,2")
    assert lam.parts == (3, 2, 1)
    assert str(lam) == "3,2,1"
    assert lam.n == 6 and lam.length == 3


@pytest.mark.parametrize("text", ["", "a,b", "2,0,1", "3,-1"])
def test_parse_rejects_malformed_partitions(text):
    with pytest.raises(InvalidInputError):
        NumberPartition.parse(text)


def test_power_builds_special_partitions():
    assert NumberPartition.power(2, 2, 7) == P("2,2,1,1,1")
    with pytest.raises(InvalidInputError):
        NumberPartition.power(3, 3, 8)


def test_partition_counts():
    assert [len(list(number_partitions(n))) for n in range(1, 9)] == [1, 2, 3, 5, 7, 11, 15, 22]


def test_refinement():
    assert refines_number(P("3,1,1"), P("3,2"))
    assert not refines_number(P("3,1"), P("2,2"))
    assert refines_number(P("2,2"), P("4"))
    assert not refines_number(P("3,3"), P("4,2"))
    assert refines_number(P("7,6,4,3,2,1"), P("10,8,5"))
    with pytest.raises(InvalidInputError):
        refines_number(P("2,1"), P("4"))


def test_coarsenings_include_lambda_and_full():
    assert coarsenings(P("2,1,1")) == {P("2,1,1"), P("3,1"), P("2,2"), P("4")}
    assert len(coarsenings(P("1,1,1,1,1"))) == 7


def test_generic_partitions():
    assert is_generic(P("4,2,1"))
    assert is_generic(P("3,3"))
    assert not is_generic(P("2,1,1"))
    assert not is_generic(P("3,2,1"))
    assert is_generic(P("1,1,1,1"))
    assert is_generic(P("3,3,3"))


def test_gamma_k_examples():
    assert gamma_k(P("5,3"), 2) == P("2,2,2,1,1")
    assert gamma_k(P("7"), 3) == P("3,3,1")
    assert gamma_k(P("2,2,1"), 2) == P("2,2,1")
    assert is_special(gamma_k(P("6,4,1"), 4), 4)
    with pytest.raises(InvalidInputError):
        gamma_k(P("3,1"), 1)


def test_gamma_k_is_idempotent_up_to_ten():
    for n in range(1, 11):
        for mu in number_partitions(n):
            for k in (2, 3, 4):
                once = gamma_k(mu, k)
                assert gamma_k(once, k) == once
                assert refines_number(once, mu)


def test_set_partition_text_and_type():
    pi = SetPartition.of([[4, 5], [3, 1, 2]])
    assert str(pi) == "(123)(45)"
    assert type_of(pi) == P("3,2")
    with pytest.raises(InvalidInputError):
        SetPartition.of([[1, 2], [2, 3]])


def test_join_and_refinement_of_set_partitions():
    a = SetPartition.of([[1, 2], [3], [4]])
    b = SetPartition.of([[1], [2, 3], [4]])
    joined = join(a, b)
    assert joined == SetPartition.of([[1, 2, 3], [4]])
    assert refines_set(a, joined) and refines_set(b, joined)
    assert not refines_set(joined, a)


def test_bell_numbers_match_enumeration():
    assert [bell_number(n) for n in range(0, 9)] == [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    assert len(list(set_partitions(5))) == 52


def test_set_partitions_of_type():
    # 5! / (3! 2!) = 10 ways to split [5] into a triple and a pair
    found = list(set_partitions_of_type(P("3,2")))
    assert len(found) == 10
    assert all(type_of(pi) == P("3,2") for pi in found)
    assert len(list(set_partitions_of_type(P("2,2")))) == 3


def test_parse_family_rejects_mixed_sizes():
    assert parse_family(["3,1", "2,2"]) == frozenset({P("3,1"), P("2,2")})
    with pytest.raises(InvalidInputError):
        parse_family(["3,1", "2,1"])


def test_number_refinement_is_a_partial_order():
    for n in range(1, 9):
        parts = list(number_partitions(n))
        for a in parts:
            assert refines_number(a, a)
        for a in parts:
            for b in parts:
                if a == b or not refines_number(a, b):
                    continue
                assert not refines_number(b, a)
                for c in parts:
                    if refines_number(b, c):
                        assert refines_number(a, c), (str(a), str(b), str(c))


def test_type_of_carries_refinement_over():
    for n in range(1, 7):
        everything = list(set_partitions(n))
        for pi in everything:
            for other in everything:
                if refines_set(pi, other):
                    assert refines_number(type_of(pi), type_of(other)), (str(pi), str(other))


def test_join_is_an_upper_bound_and_commutes():
    for n in range(1, 7):
        everything = list(set_partitions(n))
        for a in everything:
            assert join(a, a) == a
            for b in everything:
                joined = join(a, b)
                assert joined == join(b, a)
                assert refines_set(a, joined) and refines_set(b, joined)


def test_join_is_associative():
    for n in range(1, 6):
        everything = list(set_partitions(n))
        table = {(a, b): join(a, b) for a in everything for b in everything}
        for a in everything:
            for b in everything:
                for c in everything:
                    assert table[table[a, b], c] == table[a, table[b, c]]


@pytest.mark.slow
def test_join_is_associative_at_six():
    everything = list(set_partitions(6))
    sample = everything[::7]
    for a in everything:
        for b in sample:
            ab = join(a, b)
            for c in sample:
                assert join(ab, c) == join(a, join(b, c))


def _generic_by_pairs(lam):
    parts = lam.parts
    multisets = {
        tuple(sorted((parts[i] for i in range(len(parts)) if mask >> i & 1), reverse=True))
        for mask in range(1 << len(parts))
    }
    for a in multisets:
        for b in multisets:
            if a != b and sum(a) == sum(b):
                return False
    return True


def test_is_generic_agrees_with_pairwise_search():
    for n in range(1, 13):
        for lam in number_partitions(n):
            assert is_generic(lam) == _generic_by_pairs(lam), str(lam)
