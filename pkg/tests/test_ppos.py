import networkx as nx
import pytest

from conftest import P
from strata_engine.engine.combinatorics.forests import ForestNode, MarkedForest, enumerate_forests, lambda_mu_admissible
from strata_engine.engine.combinatorics.partitions import coarsenings, number_partitions
from strata_engine.engine.errors import InvalidInputError
from strata_engine.engine.homology.chain_complex import x_lambda_mu
from strata_engine.engine.homology.ppos import (
    BracketedPartition,
    PPoset,
    beta0_of_order_complex,
    bracket_refines,
    build_p_poset,
    compare_beta0,
    component_acyclicity,
    counterexample,
    p_poset_report,
    poset_equals_x,
    sweep_disconnected,
)

B = BracketedPartition.parse


def test_parse_is_canonical():
    b = B("(1,1,1)(1,3)(2,2)")
    assert str(b) == "(3,1)(2,2)(1,1,1)"
    assert str(b.tau) == "3,2,2,1,1,1,1"
    assert str(b.mu) == "4,4,3"
    assert B("(3, 1)(2,2)(1,1,1)") == b


@pytest.mark.parametrize("text", ["3,1", "(3,a)", "(3,1)x", "()", "(0,2)"])
def test_parse_rejects(text):
    with pytest.raises(InvalidInputError):
        B(text)


def test_from_forest_reads_the_leaf_groups():
    vertex = MarkedForest((ForestNode.make(5, [ForestNode(x) for x in (2, 1, 1, 1)]),), 0)
    assert str(BracketedPartition.from_forest(vertex)) == "(2,1,1,1)"
    edge = MarkedForest((
        ForestNode.make(3, [ForestNode.make(2, [ForestNode(1), ForestNode(1)]), ForestNode.make(1, [ForestNode(1)])]),
        ForestNode.make(2, [ForestNode.make(2, [ForestNode(2)])]),
    ), 1)
    assert str(BracketedPartition.from_forest(edge)) == "(1,1,1)(2)"


def test_bracket_refines():
    assert bracket_refines(B("(1,1)(2)"), B("(2)(2)"))
    assert bracket_refines(B("(2,1)(1)"), B("(3)(1)"))
    assert not bracket_refines(B("(2,2)"), B("(3,1)"))
    assert not bracket_refines(B("(1,1)(2)"), B("(4)"))


def test_poset_of_the_full_interval():
    lam, mu = P("2,1,1,1"), P("5")
    p = build_p_poset(lam, mu)
    assert [str(e) for e in p.elements] == ["(2,1,1,1)", "(2,2,1)", "(3,1,1)", "(3,2)", "(4,1)"]
    assert p.relations() == 8
    assert beta0_of_order_complex(p) == 1
    report = compare_beta0(lam, mu)
    assert report.equal
    assert report.beta0_x == report.beta0_p == 1
    # X has nine edges, the poset only eight relations
    assert not poset_equals_x(lam, mu)


def test_poset_with_bracketings():
    p = build_p_poset(P("1,1,1,1"), P("2,2"))
    assert [str(e) for e in p.elements] == ["(1,1)(1,1)", "(2)(1,1)"]
    assert p.relations() == 1


def test_build_p_poset_rejects():
    with pytest.raises(InvalidInputError):
        build_p_poset(P("2,1"), P("2,1"))
    with pytest.raises(InvalidInputError):
        build_p_poset(P("3,1"), P("2,2"))


def test_empty_poset_has_no_components():
    p = PPoset(P("2,1"), P("3"), [], nx.DiGraph())
    assert beta0_of_order_complex(p) == 0


def test_p_poset_report_lists():
    report = p_poset_report(P("2,1,1,1"), P("5"), list_elements=True, list_components=True)
    assert report.elements == 5
    assert report.components == 1
    assert report.component_sizes == [5]
    assert len(report.element_list) == 5
    assert report.component_list[0][0] == "(2,1,1,1)"
    bare = p_poset_report(P("2,1,1,1"), P("5"))
    assert bare.element_list is None and bare.component_list is None


def test_component_acyclicity():
    components = component_acyclicity(P("2,1,1,1"), P("5"))
    assert len(components) == 1
    assert components[0]["vertices"] == 5
    assert components[0]["acyclic"]


def test_sweep_disconnected_is_consistent():
    report = sweep_disconnected(5)
    assert report.command == "sweep-counterexamples"
    assert report.count == len(report.items)
    assert all(item["components"] == item["beta0_x"] >= 2 for item in report.items)


def test_counterexample_is_disconnected():
    report = counterexample()
    assert report.n == 23
    assert report.lam == "7,6,4,3,2,1"
    assert report.mu == "10,8,5"
    assert report.equal
    assert report.beta0_x == report.beta0_p >= 2
    assert report.disconnected
    assert len(report.x_f_vector) <= 3


def _pairs(n):
    for lam in number_partitions(n):
        for mu in sorted(coarsenings(lam), reverse=True):
            if mu != lam:
                yield lam, mu


@pytest.mark.parametrize("n", [3, 4, 5])
def test_elements_match_rank_zero_forests(n):
    for lam, mu in _pairs(n):
        p = build_p_poset(lam, mu)
        vertices = enumerate_forests(lambda_mu_admissible(lam, mu), mu, 0)
        assert len(p.elements) == len(vertices), (str(lam), str(mu))
        assert {BracketedPartition.from_forest(v) for v in vertices} == set(p.elements)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_relations_match_edges_of_x(n):
    for lam, mu in _pairs(n):
        p = build_p_poset(lam, mu)
        c = x_lambda_mu(lam, mu)
        vertex_of = {v: BracketedPartition.from_forest(c.payload[v]) for v in c.cells.get(0, [])}
        edges = {frozenset(vertex_of[v] for v in c.vertices[e]) for e in c.cells.get(1, [])}
        relations = {frozenset(pair) for pair in p.order.edges()}
        assert edges == relations, (str(lam), str(mu))


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_beta0_agrees_for_every_pair(n):
    for lam, mu in _pairs(n):
        report = compare_beta0(lam, mu)
        assert report.equal
        assert report.beta0_x == report.beta0_p
