import pytest

from conftest import FAMILIES_DIR, P
from strata_engine.engine.combinatorics.partitions import NumberPartition, coarsenings, is_generic, number_partitions
from strata_engine.engine.errors import InvalidInputError, MatchingError
from strata_engine.engine.homology import morse
from strata_engine.engine.homology.chain_complex import build_complex
from strata_engine.engine.homology.morse import (
    MorseMatching,
    arnold_family,
    check_condition_ck,
    collapse_order,
    collapse_pipeline,
    cone_matching,
    family_from_name,
    generic_cone_matching,
    is_cone,
    is_simplex,
    load_family,
    stanley_hanlon_family,
    verify_acyclic,
)
from strata_engine.engine.homology.sigma import arnold_cases


def _filled_triangle():
    return build_complex(
        {0: ["a", "b", "c"], 1: ["ab", "ac", "bc"], 2: ["abc"]},
        {"ab": ("b", "a"), "ac": ("c", "a"), "bc": ("c", "b"), "abc": ("bc", "ac", "ab")},
    )


def _bigon():
    return build_complex({0: ["a", "b"], 1: ["e1", "e2"]}, {"e1": ("b", "a"), "e2": ("b", "a")})


def test_bigon_matching_has_a_closed_path():
    c = _bigon()
    m = MorseMatching({"a": "e1", "b": "e2"}, frozenset(c.all_cells()))
    assert not verify_acyclic(m, c)


def test_non_cover_pair_is_rejected():
    c = _filled_triangle()
    m = MorseMatching({"a": "abc"}, frozenset(["a", "abc"]))
    with pytest.raises(MatchingError):
        verify_acyclic(m, c)


def test_imperfect_matching_is_not_acyclic():
    c = _filled_triangle()
    m = MorseMatching({"a": "ab"}, frozenset(c.all_cells()))
    assert not verify_acyclic(m, c)


def test_cone_matching_on_a_triangle():
    c = _filled_triangle()
    assert is_cone(c, "c")
    assert is_simplex(c)
    m = cone_matching(c, "c")
    assert m.pairs == {"a": "ac", "b": "bc", "ab": "abc"}
    assert verify_acyclic(m, c)
    assert collapse_order(m, c) == [("ab", "abc"), ("a", "ac"), ("b", "bc")]


def test_hollow_square_is_no_cone():
    c = build_complex(
        {0: ["a", "b", "c", "d"], 1: ["ab", "bc", "cd", "ad"]},
        {"ab": ("b", "a"), "bc": ("c", "b"), "cd": ("d", "c"), "ad": ("d", "a")},
    )
    assert not is_cone(c, "a")
    assert not is_simplex(c)
    with pytest.raises(MatchingError):
        cone_matching(c, "a")


def test_collapse_full_mu_gives_simplex():
    lam, mu = P("2,1,1,1"), P("5")
    cert = collapse_pipeline(arnold_family(lam, mu), mu, 2)
    assert cert.K == "simplex"
    assert cert.critical == 1
    assert cert.acyclic and cert.betti_zero
    assert cert.cells == 19
    assert 2 * cert.matched + cert.critical == cert.cells
    assert cert.special_cells == 3


def test_collapse_non_special_mu_gives_cone():
    lam, mu = P("2,1,1,1"), P("4,1")
    cert = collapse_pipeline(arnold_family(lam, mu), mu, 2, with_order=True)
    assert cert.K == "cone"
    assert cert.apex == "4[2,2] 1[1]"
    assert cert.cells == 5
    assert cert.matched == 2
    assert len(cert.order) == 2


def test_collapse_preconditions():
    lam, mu = P("2,1,1,1"), P("5")
    family = arnold_family(lam, mu)
    with pytest.raises(InvalidInputError):
        collapse_pipeline(family, mu, 1)
    with pytest.raises(InvalidInputError):
        collapse_pipeline(family | {P("5")}, mu, 2)
    with pytest.raises(InvalidInputError):
        collapse_pipeline({P("3,1"), P("2,2")}, P("4"), 2)
    # X_{Lambda,lambda} is empty
    with pytest.raises(InvalidInputError):
        collapse_pipeline(family, lam, 2)


def test_condition_ck():
    assert check_condition_ck(stanley_hanlon_family(6, 2), 2)
    assert check_condition_ck(arnold_family(P("3,1,1,1"), P("6")), 3)
    assert not check_condition_ck({P("3,1"), P("2,2")}, 2)


def test_family_files_and_names():
    name, family = load_family(FAMILIES_DIR / "stanley_r2_n6.yaml")
    assert name == "stanley_r2_n6"
    assert family == stanley_hanlon_family(6, 2)
    assert family_from_name("hanlon", None, P("6"), r=3)[1] == stanley_hanlon_family(6, 3)
    with pytest.raises(InvalidInputError):
        family_from_name("arnold", None, P("6"))
    with pytest.raises(InvalidInputError):
        load_family(FAMILIES_DIR / "missing.yaml")
    with pytest.raises(InvalidInputError):
        stanley_hanlon_family(6, 1)


def test_generic_cone():
    cert = generic_cone_matching(P("4,2,1"), P("7"))
    assert cert.cone and cert.acyclic and cert.betti_zero
    assert cert.apex == "7[4,2,1]"
    assert 2 * cert.matched + 1 == cert.cells
    with pytest.raises(InvalidInputError):
        generic_cone_matching(P("2,1,1"), P("4"))


def test_generic_cone_refuses_a_cyclic_matching(monkeypatch):
    # only the final matching carries a critical cell
    monkeypatch.setattr(morse, "verify_acyclic", lambda matching, c: not matching.critical)
    with pytest.raises(MatchingError, match="cone matching"):
        generic_cone_matching(P("4,2,1"), P("7"))


@pytest.mark.slow
@pytest.mark.parametrize("n", [6, 7, 8])
def test_generic_cones_up_to_eight(n):
    for lam in number_partitions(n):
        if not is_generic(lam):
            continue
        for mu in coarsenings(lam):
            if mu == lam:
                continue
            cert = generic_cone_matching(lam, mu)
            assert cert.cone and cert.acyclic and cert.critical == 1, (str(lam), str(mu))


def _arnold_collapses(n_max):
    for k, m, lam in arnold_cases(n_max):
        n = lam.n
        if k >= n:
            continue
        full = NumberPartition((n,))
        family = arnold_family(lam, full)
        for mu in sorted(family | {full}, reverse=True):
            if mu == lam:
                continue
            cert = collapse_pipeline(arnold_family(lam, mu) if mu != full else family, mu, k)
            assert cert.critical == 1 and cert.betti_zero


def test_arnold_families_collapse_small_n():
    _arnold_collapses(5)


@pytest.mark.slow
def test_arnold_families_collapse_up_to_eight():
    _arnold_collapses(8)


@pytest.mark.slow
@pytest.mark.parametrize("r", [2, 3])
def test_stanley_and_hanlon_families_collapse(r):
    cert = collapse_pipeline(stanley_hanlon_family(6, r), P("6"), 2)
    assert cert.K == "simplex"
    assert cert.critical == 1
