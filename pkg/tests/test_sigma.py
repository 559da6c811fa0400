import pytest

from conftest import P
from strata_engine.engine.combinatorics.partitions import number_partitions
from strata_engine.engine.errors import GuardExceededError, InvalidInputError
from strata_engine.engine.homology.chain_complex import BettiVector
from strata_engine.engine.homology.sigma import (
    arnold_cases,
    betti_sigma,
    generic_sweep,
    vanishing_check,
    vanishing_ok,
    vanishing_sweep,
    verify_arnold,
)


@pytest.mark.parametrize("lam,expected", [
    ("2,1", {"4": 1}),
    ("3", {"2": 1}),
    ("1,1,1", {"6": 1}),
    ("2,1,1,1", {"8": 1}),
    ("3,1,1", {"6": 1}),
])
def test_betti_sigma_small(lam, expected):
    assert betti_sigma(P(lam)).betti == expected


def test_unreachable_mu_contributes_nothing():
    report = betti_sigma(P("3,1,1"))
    terms = {t.mu: t for t in report.terms}
    assert not terms["3,2"].reachable
    assert terms["3,2"].x_betti == {}
    assert terms["3,1,1"].x_betti == {"-1": 1}
    assert terms["3,1,1"].shift == 7


def test_betti_sigma_input_checks():
    with pytest.raises(InvalidInputError):
        betti_sigma(P("2,1"), n=4)
    with pytest.raises(InvalidInputError):
        betti_sigma(P("2,1"), source="cells")


def test_vanishing_ok():
    lam = P("2,2")
    assert vanishing_ok(lam, BettiVector.from_dict({4: 1}))
    assert vanishing_ok(lam, BettiVector.from_dict({3: 2, 4: 1}))
    assert not vanishing_ok(lam, BettiVector.from_dict({2: 1, 4: 1}))
    assert not vanishing_ok(lam, BettiVector.from_dict({4: 2}))
    # l(lambda) = 1 leaves only the top degree
    assert vanishing_ok(P("4"), BettiVector.from_dict({2: 1}))


def test_arnold_cases():
    assert arnold_cases(3) == [(2, 1, P("2")), (2, 1, P("2,1")), (3, 1, P("3"))]


def test_verify_arnold_small():
    report = verify_arnold(5)
    assert report.passed
    assert report.deviations == []
    assert report.cases == len(arnold_cases(5))
    with pytest.raises(InvalidInputError):
        verify_arnold(1)


@pytest.mark.slow
def test_verify_arnold_up_to_eight():
    assert verify_arnold(8).passed


def test_vanishing_sweep_five():
    report = vanishing_sweep(5)
    assert report.count == 0
    assert len(report.items) == 7
    assert vanishing_check(P("2,2,1"))


@pytest.mark.slow
def test_vanishing_sweep_seven():
    assert vanishing_sweep(7).count == 0


def test_oracle_source_agrees_with_forests():
    for lam in number_partitions(5):
        forests = betti_sigma(lam)
        oracle = betti_sigma(lam, source="oracle")
        assert oracle.betti == forests.betti, str(lam)


def test_generic_sweep_five():
    report = generic_sweep(5)
    assert report.count == 0
    assert {item["lambda"] for item in report.items} == {
        "1", "2", "1,1", "3", "2,1", "1,1,1", "4", "3,1", "2,2", "1,1,1,1",
        "5", "4,1", "3,2", "3,1,1", "2,2,1", "1,1,1,1,1",
    }
    assert all(item["sigma_ok"] for item in report.items)


def test_guard_assumes_reachability_unless_strict():
    lam = P("2,1,1,1")
    relaxed = betti_sigma(lam, max_bell=10)
    assert relaxed.assumed_reachable
    assert relaxed.betti == {"8": 1}
    with pytest.raises(GuardExceededError):
        betti_sigma(lam, max_bell=10, strict=True)
    with pytest.raises(GuardExceededError):
        betti_sigma(lam, max_bell=10, source="oracle")


def test_threads_do_not_change_the_result():
    lam = P("2,2,1")
    assert betti_sigma(lam, threads=2).betti == betti_sigma(lam).betti
