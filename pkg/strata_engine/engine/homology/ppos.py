"""
Bracketed Partition Posets for the strata engine

Elements of P_{lambda,mu} are number partitions tau != mu with
lambda |- tau |- mu, bracketed into one group per part of mu; the order is
bracket-preserving refinement. Only number-partition arithmetic is used, so
large n (the n = 23 disconnected example) stays cheap.
"""

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from ..combinatorics.forests import MarkedForest, level_vertex
from ..combinatorics.partitions import NumberPartition, coarsenings, number_partitions, refines_number
from ..errors import Beta0MismatchError, InvalidInputError
from ..schemas import Beta0Report, CounterexampleReport, PPosetReport, SweepReport
from . import logger
from .chain_complex import ChainComplex, component_count, reduced_betti, x_lambda_mu

Group = Tuple[int, ...]


def _group_order(group: Group) -> Tuple[int, Tuple[int, ...]]:
    return (-sum(group), tuple(-x for x in group))


@dataclass(frozen=True, order=True)
class BracketedPartition:
    """Groups of parts, one per part of mu; canonical: parts descending, groups sorted."""

    groups: Tuple[Group, ...]

    @classmethod
    def of(cls, groups) -> "BracketedPartition":
        canon = [tuple(sorted((int(x) for x in g), reverse=True)) for g in groups]
        if not canon or any(not g or min(g) < 1 for g in canon):
            raise InvalidInputError(f"bracketed partition needs nonempty positive groups: {groups}")
        return cls(tuple(sorted(canon, key=_group_order)))

    @classmethod
    def parse(cls, text: str) -> "BracketedPartition":
        """Parse ``"(3,1)(2,2)(1,1,1)"``."""
        groups = re.findall(r"\(([^()]*)\)", text.replace(" ", ""))
        if not groups or "".join(f"({g})" for g in groups) != text.replace(" ", ""):
            raise InvalidInputError(f"cannot parse bracketed partition '{text}'")
        try:
            return cls.of([int(x) for x in g.split(",") if x] for g in groups)
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse bracketed partition '{text}'") from exc

    @classmethod
    def from_forest(cls, f: MarkedForest) -> "BracketedPartition":
        """The leaf groups of a rank-0 forest, one group per root."""
        if f.rank != 0:
            f = level_vertex(f, 0)
        return cls.of([c.label for c in root.children] for root in f.roots)

    @property
    def tau(self) -> NumberPartition:
        return NumberPartition.of(x for g in self.groups for x in g)

    @property
    def mu(self) -> NumberPartition:
        return NumberPartition.of(sum(g) for g in self.groups)

    def __str__(self) -> str:
        return "".join("(" + ",".join(str(x) for x in g) + ")" for g in self.groups)


@dataclass
class PPoset:
    lam: NumberPartition
    mu: NumberPartition
    elements: List[BracketedPartition]
    order: nx.DiGraph  # a -> b iff a < b

    def relations(self) -> int:
        return self.order.number_of_edges()


def _sub_multisets(parts: Tuple[int, ...], target: int) -> Set[Tuple[int, ...]]:
    found = set()
    for size in range(1, len(parts) + 1):
        for idx in combinations(range(len(parts)), size):
            chosen = tuple(parts[i] for i in idx)
            if sum(chosen) == target:
                found.add(chosen)
    return found


def _bracketings(tau: Tuple[int, ...], mu: Tuple[int, ...]) -> Set[BracketedPartition]:
    """Every way to group the parts of tau into groups summing to the parts of mu."""
    out: Set[BracketedPartition] = set()

    def place(remaining: Tuple[int, ...], i: int, groups: List[Group]):
        if i == len(mu):
            if not remaining:
                out.add(BracketedPartition.of(groups))
            return
        for chosen in _sub_multisets(remaining, mu[i]):
            rest = list(remaining)
            for x in chosen:
                rest.remove(x)
            place(tuple(rest), i + 1, groups + [chosen])

    place(tau, 0, [])
    return out


def bracket_refines(a: BracketedPartition, b: BracketedPartition) -> bool:
    """Groups of a biject onto groups of b with equal sums, each refining its image."""
    graph = nx.Graph()
    left = [("a", i) for i in range(len(a.groups))]
    graph.add_nodes_from(left)
    graph.add_nodes_from(("b", j) for j in range(len(b.groups)))
    if len(a.groups) != len(b.groups):
        return False
    for i, ga in enumerate(a.groups):
        for j, gb in enumerate(b.groups):
            if sum(ga) == sum(gb) and refines_number(NumberPartition.of(ga), NumberPartition.of(gb)):
                graph.add_edge(("a", i), ("b", j))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    return all(node in matching for node in left)


def build_p_poset(lam: NumberPartition, mu: NumberPartition) -> PPoset:
    """P_{lambda,mu}: bracketed tau with lambda |- tau |- mu, tau != mu."""
    if lam == mu or not refines_number(lam, mu):
        raise InvalidInputError(f"need lambda |- mu with lambda != mu, got ({lam}) and ({mu})")
    elements: Set[BracketedPartition] = set()
    for tau in coarsenings(lam):
        if tau != mu and refines_number(tau, mu):
            elements |= _bracketings(tau.parts, mu.parts)
    ordered = sorted(elements)

    graph = nx.DiGraph()
    graph.add_nodes_from(ordered)
    for a in ordered:
        for b in ordered:
            if a.tau.length > b.tau.length and bracket_refines(a, b):
                graph.add_edge(a, b)
    logger.debug(f"P_(({lam}),({mu})): {len(ordered)} elements, {graph.number_of_edges()} relations")
    return PPoset(lam, mu, ordered, graph)


def beta0_of_order_complex(p: PPoset) -> int:
    """Components of the comparability graph (0 for the empty poset)."""
    if not p.elements:
        return 0
    return nx.number_connected_components(p.order.to_undirected())


def compare_beta0(lam: NumberPartition, mu: NumberPartition,
                  max_forests: Optional[int] = None) -> Beta0Report:
    """beta_0 of the forest model of X_{lambda,mu} against beta_0 of Delta(P_{lambda,mu}).

    Raises:
        Beta0MismatchError: the two counts differ
    """
    p = build_p_poset(lam, mu)
    beta0_p = beta0_of_order_complex(p)
    beta0_x = component_count(x_lambda_mu(lam, mu, max_forests=max_forests))
    if beta0_p != beta0_x:
        logger.error(f"compare_beta0: X has {beta0_x} components, P has {beta0_p}")
        raise Beta0MismatchError("component counts of X and P differ",
                                 f"({lam}),({mu}): {beta0_x} vs {beta0_p}")
    return Beta0Report(lam=str(lam), mu=str(mu), beta0_x=beta0_x, beta0_p=beta0_p,
                       p_elements=len(p.elements), equal=True)


def components(p: PPoset) -> List[List[BracketedPartition]]:
    comps = [sorted(c) for c in nx.connected_components(p.order.to_undirected())]
    return sorted(comps, key=lambda c: (-len(c), c[0]))


def p_poset_report(lam: NumberPartition, mu: NumberPartition, list_elements: bool = False,
                   list_components: bool = False) -> PPosetReport:
    p = build_p_poset(lam, mu)
    comps = components(p)
    return PPosetReport(
        lam=str(lam), mu=str(mu), elements=len(p.elements), relations=p.relations(),
        components=len(comps), component_sizes=[len(c) for c in comps],
        element_list=[str(e) for e in p.elements] if list_elements else None,
        component_list=[[str(e) for e in c] for c in comps] if list_components else None,
    )


def sweep_disconnected(n: int, max_forests: Optional[int] = None) -> SweepReport:
    """Every lambda |- mu |- n, lambda != mu, whose P_{lambda,mu} is disconnected."""
    items = []
    for lam in number_partitions(n):
        for mu in sorted(coarsenings(lam), reverse=True):
            if mu == lam:
                continue
            p = build_p_poset(lam, mu)
            beta0 = beta0_of_order_complex(p)
            if beta0 >= 2:
                report = compare_beta0(lam, mu, max_forests=max_forests)
                items.append({"lambda": str(lam), "mu": str(mu), "components": beta0,
                              "beta0_x": report.beta0_x})
    logger.info(f"sweep_disconnected(n={n}): {len(items)} disconnected pairs")
    return SweepReport(command="sweep-counterexamples", n=n, count=len(items), items=items)


def component_acyclicity(lam: NumberPartition, mu: NumberPartition,
                         max_forests: Optional[int] = None) -> List[Dict[str, object]]:
    """Reduced Betti numbers of each connected component of the forest model."""
    c = x_lambda_mu(lam, mu, max_forests=max_forests)
    out = []
    for vertices in nx.connected_components(c.one_skeleton()):
        vertices = frozenset(vertices)
        part = c.restrict(lambda key, vs=vertices: all(v in vs for v in c.vertices[key]))
        betti = reduced_betti(part)
        out.append({"vertices": len(vertices), "f_vector": part.f_vector(),
                    "betti": betti.to_json(), "acyclic": betti.is_zero()})
    return sorted(out, key=lambda item: (-item["vertices"], item["f_vector"]))


def _poset_chains(p: PPoset) -> Dict[int, Set[Tuple[BracketedPartition, ...]]]:
    chains: Dict[int, Set[Tuple[BracketedPartition, ...]]] = {}

    def extend(prefix: List[BracketedPartition]):
        chains.setdefault(len(prefix) - 1, set()).add(tuple(prefix))
        for nxt in p.order.successors(prefix[-1]):
            prefix.append(nxt)
            extend(prefix)
            prefix.pop()

    for e in p.elements:
        extend([e])
    return chains


def poset_equals_x(lam: NumberPartition, mu: NumberPartition, max_forests: Optional[int] = None) -> bool:
    """Whether X_{lambda,mu} coincides with Delta(P_{lambda,mu}) cell by cell."""
    p = build_p_poset(lam, mu)
    c: ChainComplex = x_lambda_mu(lam, mu, max_forests=max_forests)
    chains = _poset_chains(p)
    vertex_of = {v: BracketedPartition.from_forest(c.payload[v]) for v in c.cells.get(0, [])}
    for d in range(max(c.dimension, max(chains, default=-1)) + 1):
        sequences = [tuple(vertex_of[v] for v in c.vertices[key]) for key in c.cells.get(d, [])]
        if len(set(sequences)) != len(sequences) or set(sequences) != chains.get(d, set()):
            logger.debug(f"poset_equals_x: dimension {d} differs")
            return False
    return True


COUNTEREXAMPLE_LAMBDA = NumberPartition.of((7, 6, 4, 3, 2, 1))
COUNTEREXAMPLE_MU = NumberPartition.of((10, 8, 5))


def counterexample(lam: NumberPartition = COUNTEREXAMPLE_LAMBDA, mu: NumberPartition = COUNTEREXAMPLE_MU,
                   max_forests: Optional[int] = None) -> CounterexampleReport:
    """Component counts of P_{lambda,mu} and of X_{lambda,mu}; disconnected for the default pair."""
    p = build_p_poset(lam, mu)
    beta0_p = beta0_of_order_complex(p)
    c = x_lambda_mu(lam, mu, max_forests=max_forests)
    beta0_x = component_count(c)
    if beta0_p != beta0_x:
        logger.error(f"counterexample: X has {beta0_x} components, P has {beta0_p}")
        raise Beta0MismatchError("component counts of X and P differ",
                                 f"({lam}),({mu}): {beta0_x} vs {beta0_p}")
    logger.info(f"counterexample ({lam}),({mu}): {beta0_x} components")
    return CounterexampleReport(lam=str(lam), mu=str(mu), n=lam.n, p_elements=len(p.elements),
                                beta0_p=beta0_p, beta0_x=beta0_x, x_f_vector=c.f_vector(),
                                equal=True, disconnected=beta0_x >= 2)
