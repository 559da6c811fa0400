import pytest

from conftest import P
from strata_engine.engine.errors import BoundaryError, ConsistencyError, InvalidInputError
from strata_engine.engine.homology.chain_complex import (
    BettiVector,
    betti_report,
    build_complex,
    check_euler,
    component_count,
    euler_characteristic,
    euler_from_betti,
    matrix_rank,
    reduced_betti,
    x_family_mu,
    x_lambda_mu,
)


def _hollow_triangle():
    return build_complex(
        {0: ["a", "b", "c"], 1: ["ab", "ac", "bc"]},
        {"ab": ("b", "a"), "ac": ("c", "a"), "bc": ("c", "b")},
    )


def _filled_triangle():
    return build_complex(
        {0: ["a", "b", "c"], 1: ["ab", "ac", "bc"], 2: ["abc"]},
        {"ab": ("b", "a"), "ac": ("c", "a"), "bc": ("c", "b"), "abc": ("bc", "ac", "ab")},
    )


def test_matrix_rank_both_pivotings():
    columns = [{0: 1, 1: 1}, {0: 1, 1: 1}, {2: 3}]
    assert matrix_rank(columns, "rows") == 2
    assert matrix_rank(columns, "columns") == 2
    assert matrix_rank([{0: 2, 1: 4}, {0: 3, 1: 6}]) == 1
    with pytest.raises(InvalidInputError):
        matrix_rank(columns, "diagonal")


def test_empty_complex_has_beta_minus_one():
    empty = build_complex({}, {})
    assert empty.is_empty()
    betti = reduced_betti(empty)
    assert betti == BettiVector.empty_space()
    assert betti.to_json() == {"-1": 1}
    assert euler_characteristic(empty) == 0 == euler_from_betti(betti)


def test_hollow_triangle_is_a_circle():
    c = _hollow_triangle()
    assert c.f_vector() == [3, 3]
    assert c.vertices["ab"] == ("a", "b")
    betti = reduced_betti(c)
    assert betti == BettiVector.from_dict({1: 1})
    assert check_euler(c, betti) == 0
    assert component_count(c) == 1


def test_filled_triangle_is_acyclic():
    c = _filled_triangle()
    assert c.vertices["abc"] == ("a", "b", "c")
    assert reduced_betti(c).is_zero()
    assert sorted(c.cofaces("a")) == [("ab", 1), ("ac", 1)]


def test_two_points():
    c = build_complex({0: ["p", "q"]}, {})
    assert reduced_betti(c) == BettiVector.from_dict({0: 1})
    assert component_count(c) == 2


def test_missing_face_is_a_boundary_error():
    with pytest.raises(BoundaryError):
        build_complex({0: ["a"], 1: ["ab"]}, {"ab": ("b", "a")})
    with pytest.raises(BoundaryError):
        build_complex({0: ["a", "b"], 1: ["ab"]}, {"ab": ("b",)})


def test_nonzero_boundary_square_is_detected():
    # faces 1 and 2 coincide, so the boundary of t is the edge bc alone
    with pytest.raises(BoundaryError):
        build_complex(
            {0: ["a", "b", "c"], 1: ["ab", "ac", "bc"], 2: ["t"]},
            {"ab": ("b", "a"), "ac": ("c", "a"), "bc": ("c", "b"), "t": ("bc", "ab", "ab")},
        )


def test_betti_vector_arithmetic():
    a = BettiVector.from_dict({0: 1, 2: 0})
    b = BettiVector.from_dict({0: 2, 3: 1})
    assert (a + b).as_dict() == {0: 3, 3: 1}
    assert a.shifted(5).support() == [5]
    assert BettiVector.from_dict({2: 1}).to_json(top=3) == {"-1": 0, "0": 0, "1": 0, "2": 1, "3": 0}
    assert str(BettiVector()) == "0"


def test_forest_model_of_two_one_one_one_is_contractible():
    c = x_lambda_mu(P("2,1,1,1"), P("5"))
    assert c.f_vector() == [5, 9, 5]
    assert reduced_betti(c).is_zero()
    assert euler_characteristic(c) == 1


def test_x_lambda_lambda_is_empty():
    report = betti_report(x_lambda_mu(P("2,1"), P("2,1")), P("2,1"), lam=P("2,1"))
    assert report.empty
    assert report.betti == {"-1": 1}
    assert report.f_vector == []
    assert report.euler == 0


def test_threaded_betti_matches_serial():
    c = x_lambda_mu(P("2,1,1,1,1"), P("6"))
    assert reduced_betti(c, threads=4) == reduced_betti(c)


def test_family_model_requires_matching_n():
    with pytest.raises(InvalidInputError):
        x_family_mu([P("3,1")], P("5"))
    c = x_family_mu([P("3,1"), P("2,1,1")], P("4"))
    assert c.f_vector() == [2, 1]
    assert reduced_betti(c).is_zero()


def test_rank_cross_check_failure_is_reported(monkeypatch):
    import strata_engine.engine.homology.chain_complex as cc

    calls = iter([1, 0, 1, 0])
    monkeypatch.setattr(cc, "matrix_rank", lambda columns, pivoting="rows": next(calls))
    with pytest.raises(ConsistencyError):
        cc.boundary_rank(_hollow_triangle(), 1)
