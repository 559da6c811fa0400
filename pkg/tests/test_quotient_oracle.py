from itertools import permutations

import pytest

from conftest import P
from strata_engine.engine.combinatorics.partitions import (
    SetPartition,
    coarsenings,
    number_partitions,
    parse_set_partition,
    set_partitions_of_type,
)
from strata_engine.engine.errors import GuardExceededError, InvalidInputError
from strata_engine.engine.oracle.quotient_oracle import (
    _act_chain,
    _orbit_labels,
    build_pi_lambda,
    compare_with_forest_model,
    enumerate_chains,
    find_unreachable_pairs,
    interval_elements,
    is_join_reachable,
    oracle_betti,
    oracle_complex,
    orbit_cells,
    orbit_partition_by_sweep,
    psi_forest_of_chain,
    stabilizer,
    stabilizer_elements,
    stabilizer_order,
)


def test_stabilizer_order_and_elements():
    pi = parse_set_partition("[[1,2],[3,4]]")
    assert stabilizer_order(pi) == 8
    elements = set(stabilizer_elements(pi))
    assert len(elements) == 8
    assert stabilizer_order(parse_set_partition("[[1,2,3],[4,5]]")) == 12


def test_pi_lambda_of_transpositions_is_everything():
    pl = build_pi_lambda(P("2,1,1"))
    # 15 set partitions of [4]; the bottom is attached but has no type
    assert len(pl.elements) == 15
    assert pl.types() == set(number_partitions(4)) - {P("1,1,1,1")}


def test_pi_lambda_guard():
    with pytest.raises(GuardExceededError):
        build_pi_lambda(P("1,1,1,1,1"), max_bell=10)
    with pytest.raises(InvalidInputError):
        build_pi_lambda(P("2,1"), n=4)


def test_orbit_labels_agree_with_full_group_sweep():
    for lam in (P("2,1,1,1"), P("2,2,1"), P("3,1,1")):
        pl = build_pi_lambda(lam)
        pi = SetPartition.full(5)
        labels, _ = _orbit_labels(pl, pi)
        assert orbit_partition_by_sweep(pl, pi) == labels


def test_orbit_sizes_sum_to_chain_counts():
    pl = build_pi_lambda(P("2,1,1,1"))
    pi = SetPartition.full(5)
    cells = orbit_cells(pl, pi)
    assert [len(cells[d]) for d in sorted(cells)] == [5, 9, 5]
    # the open interval of Pi_5 has 50 elements
    assert sum(cell.size for cell in cells[0]) == len(interval_elements(pl, pi)) == 50


def test_oracle_complex_matches_forest_counts():
    pl = build_pi_lambda(P("2,1,1,1"))
    c = oracle_complex(pl, SetPartition.full(5))
    assert c.f_vector() == [5, 9, 5]


def test_psi_of_a_single_element():
    pi = SetPartition.full(5)
    forest = psi_forest_of_chain([parse_set_partition("[[1,2],[3],[4],[5]]")], pi)
    assert str(forest) == "5[2,1,1,1]"
    with pytest.raises(InvalidInputError):
        psi_forest_of_chain([], pi)


def test_compare_full_interval_is_bijective():
    report = compare_with_forest_model(P("2,1,1,1"), P("5"))
    assert report.reachable
    assert report.bijective
    assert report.betti_equal
    assert [d.oracle_cells for d in report.dimensions] == [5, 9, 5]


def test_compare_lambda_equal_mu_is_empty():
    report = compare_with_forest_model(P("2,1"), P("2,1"))
    assert report.oracle_betti == {"-1": 1}
    assert report.betti_equal


def test_forests_without_oracle_preimage():
    report = compare_with_forest_model(P("3,1,1"), P("5"))
    assert not report.bijective
    assert report.betti_equal
    assert all(d.injective and d.faces_match for d in report.dimensions)
    assert report.dimensions[0].unmatched_forests == ["5[3,2]"]
    assert report.dimensions[1].unmatched_forests == ["5[3[3],2[1,1]]"]


def test_unreachable_mu():
    assert not is_join_reachable(P("3,1,1"), P("3,2"))
    assert is_join_reachable(P("3,1,1"), P("5"))
    assert oracle_betti(P("3,1,1"), P("3,2")) is None
    report = compare_with_forest_model(P("3,1,1"), P("3,2"))
    assert not report.reachable
    assert report.pi is None
    assert report.betti_equal


def test_find_unreachable_pairs():
    four = find_unreachable_pairs(4)
    assert len(four) == 4
    assert {lam for lam, _ in four} == {P("1,1,1,1")}
    five = find_unreachable_pairs(5)
    assert len(five) == 7
    assert (P("3,1,1"), P("3,2")) in five


def test_compare_rejects_bad_pairs():
    with pytest.raises(InvalidInputError):
        compare_with_forest_model(P("3,1"), P("2,2"))
    with pytest.raises(InvalidInputError):
        compare_with_forest_model(P("2,1,1"), P("4"), n=5)


def test_betti_numbers_agree_at_five():
    for lam in number_partitions(5):
        for mu in coarsenings(lam):
            assert compare_with_forest_model(lam, mu).betti_equal, (str(lam), str(mu))


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_psi_is_injective_and_face_preserving(n):
    for lam in number_partitions(n):
        for mu in coarsenings(lam):
            report = compare_with_forest_model(lam, mu)
            for d in report.dimensions:
                assert d.injective and d.faces_match, (str(lam), str(mu), d.dim)


def _fixes(g, pi):
    blocks = {frozenset(b) for b in pi.blocks}
    return {frozenset(g[x] for x in b) for b in pi.blocks} == blocks


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_stabilizer_order_matches_filtered_symmetric_group(n):
    group = [(0,) + perm for perm in permutations(range(1, n + 1))]
    for lam in number_partitions(n):
        pi = next(set_partitions_of_type(lam))
        fixing = [g for g in group if _fixes(g, pi)]
        assert stabilizer_order(pi) == len(fixing), str(lam)
        if n <= 5:
            assert set(stabilizer_elements(pi)) == set(fixing)


@pytest.mark.parametrize("lam,mu", [("2,1,1,1", "5"), ("2,1,1,1", "3,2"), ("2,2,1", "5"), ("2,1,1", "4")])
def test_psi_is_constant_on_stabilizer_orbits(lam, mu):
    pl = build_pi_lambda(P(lam))
    pi = pl.of_type(P(mu))[0]
    generators = stabilizer(pi)
    for chains in enumerate_chains(interval_elements(pl, pi)).values():
        for chain in chains:
            image = psi_forest_of_chain(chain, pi)
            for g in generators:
                assert psi_forest_of_chain(_act_chain(g, chain), pi).key == image.key


@pytest.mark.slow
@pytest.mark.parametrize("n", [6, 7])
def test_betti_numbers_agree_up_to_seven(n):
    for lam in number_partitions(n):
        for mu in coarsenings(lam):
            report = compare_with_forest_model(lam, mu)
            assert report.betti_equal, (str(lam), str(mu))
            assert all(d.injective and d.faces_match for d in report.dimensions), (str(lam), str(mu))
