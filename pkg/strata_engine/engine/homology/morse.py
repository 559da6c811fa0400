"""
Discrete Morse matchings for the strata engine

Verifies acyclic matchings, builds the unique-insertion matching for a vertex
scheme (V', V_z, <<), certifies collapsibility of X_{Lambda,mu} under the
gamma_k closure condition and builds the cone matching for generic lambda.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

import networkx as nx
import yaml

from ..combinatorics.forests import ForestNode, MarkedForest
from ..combinatorics.partitions import (
    NumberPartition,
    coarsenings,
    gamma_k,
    is_generic,
    is_special,
    number_partitions,
    parse_family,
    refines_number,
)
from ..errors import ConsistencyError, InvalidInputError, MatchingError
from ..schemas import CollapseCertificate, ConeCertificate
from . import logger
from .chain_complex import ChainComplex, reduced_betti, x_family_mu, x_lambda_mu


# ============================================================
# DATA MODEL
# ============================================================

@dataclass(frozen=True)
class MorseMatching:
    """Pairs lower -> upper over a domain of cells; ``critical`` cells stay unmatched."""

    pairs: Dict[Hashable, Hashable]
    domain: FrozenSet[Hashable]
    critical: FrozenSet[Hashable] = frozenset()

    @property
    def size(self) -> int:
        return len(self.pairs)

    def union(self, other: "MorseMatching", critical: Iterable[Hashable] = ()) -> "MorseMatching":
        return MorseMatching({**self.pairs, **other.pairs}, self.domain | other.domain, frozenset(critical))


@dataclass
class VertexScheme:
    """Linear order <<, the vertex set V' and the partition V = union of V_z."""

    order: Dict[Hashable, int]
    special: FrozenSet[Hashable]
    zone: Dict[Hashable, Hashable] = field(default_factory=dict)

    def validate(self, c: ChainComplex):
        """Raise MatchingError unless z is the <<-minimum of V_z and cells list vertices in << order."""
        for v in c.cells.get(0, []):
            z = self.zone.get(v)
            if z not in self.special:
                raise MatchingError("vertex has no representative in V'", _describe(c, v))
            if v in self.special and z != v:
                raise MatchingError("special vertex must represent itself", _describe(c, v))
            if self.order[z] > self.order[v]:
                raise MatchingError("representative is not the <<-minimum of its class", _describe(c, v))
        for key in c.all_cells():
            positions = [self.order[v] for v in c.vertices[key]]
            if positions != sorted(positions) or len(set(positions)) != len(positions):
                raise MatchingError("cell vertices are not listed in << order", _describe(c, key))


def _describe(c: ChainComplex, key: Hashable) -> str:
    obj = c.payload.get(key)
    return str(obj) if obj is not None else repr(key)


def length_order(c: ChainComplex) -> Dict[Hashable, int]:
    """<< on forest vertices: more leaves first, ties by canonical key."""
    ranked = sorted(c.cells.get(0, []), key=lambda v: (-len(c.payload[v].levels[0]), v))
    return {v: i for i, v in enumerate(ranked)}


def _xi(vertices: Tuple[Hashable, ...], special: FrozenSet[Hashable]) -> Optional[int]:
    """0-based position of the first vertex outside V' (None inside the subcomplex)."""
    for position, v in enumerate(vertices):
        if v not in special:
            return position
    return None


# ============================================================
# VERIFICATION
# ============================================================

def verify_acyclic(m: MorseMatching, c: ChainComplex) -> bool:
    """Cover condition, perfection on the domain and absence of closed paths.

    Raises:
        MatchingError: a pair is not a cover relation
    """
    for lower, upper in m.pairs.items():
        if lower not in c.faces.get(upper, ()):
            raise MatchingError("matched cells are not a cover pair", (_describe(c, lower), _describe(c, upper)))

    seen: Dict[Hashable, int] = {}
    for lower, upper in m.pairs.items():
        for key in (lower, upper):
            seen[key] = seen.get(key, 0) + 1
    for key in m.domain:
        expected = 0 if key in m.critical else 1
        if seen.get(key, 0) != expected:
            logger.warning(f"verify_acyclic: cell {_describe(c, key)} matched {seen.get(key, 0)} times")
            return False
    if any(key not in m.domain for key in seen):
        logger.warning("verify_acyclic: matching leaves its domain")
        return False

    graph = nx.DiGraph()
    graph.add_nodes_from(m.pairs)
    for lower, upper in m.pairs.items():
        for face in c.faces.get(upper, ()):
            if face != lower and face in m.pairs:
                graph.add_edge(lower, face)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        logger.warning(f"verify_acyclic: closed path through {len(cycle)} pairs")
        return False
    return True


def collapse_order(m: MorseMatching, c: ChainComplex) -> List[Tuple[Hashable, Hashable]]:
    """Elementary collapses (lower, upper) in an order where each step is legal."""
    graph = nx.DiGraph()
    graph.add_nodes_from(m.pairs)
    upper_of = {upper: lower for lower, upper in m.pairs.items()}
    for lower, upper in m.pairs.items():
        for face in c.faces.get(upper, ()):
            if face != lower and face in m.pairs:
                graph.add_edge(lower, face)
            if face in upper_of:
                graph.add_edge(lower, upper_of[face])
    if not nx.is_directed_acyclic_graph(graph):
        raise MatchingError("matching admits no collapse order", nx.find_cycle(graph))
    ordered = nx.lexicographical_topological_sort(graph, key=lambda k: (c.dim_of(k), str(k)))
    return [(lower, m.pairs[lower]) for lower in ordered]


# ============================================================
# CONDITION ALEPH
# ============================================================

def build_aleph_matching(c: ChainComplex, scheme: VertexScheme) -> MorseMatching:
    """phi(sigma) = sigma with chi(sigma) inserted before x_xi, for sigma in U.

    Raises:
        MatchingError: the insertion is missing or ambiguous for some sigma, or the
            result is not a perfect acyclic matching
    """
    scheme.validate(c)
    special = scheme.special
    domain = [key for key in c.all_cells() if _xi(c.vertices[key], special) is not None]

    pairs: Dict[Hashable, Hashable] = {}
    uppers = set()
    for sigma in domain:
        vertices = c.vertices[sigma]
        xi = _xi(vertices, special)
        chi = scheme.zone[vertices[xi]]
        if xi > 0 and vertices[xi - 1] == chi:
            continue
        candidates = [tau for tau, position in c.cofaces(sigma)
                      if position == xi and c.vertices[tau][xi] == chi]
        if len(candidates) != 1:
            logger.error(f"build_aleph_matching: {len(candidates)} insertions for {_describe(c, sigma)}")
            raise MatchingError(f"Condition aleph fails: {len(candidates)} insertions of the representative",
                                _describe(c, sigma))
        tau = candidates[0]
        if tau in uppers:
            raise MatchingError("insertion already matched", _describe(c, tau))
        if _xi(c.vertices[tau], special) != xi + 1:
            raise MatchingError("insertion does not advance xi", _describe(c, tau))
        pairs[sigma] = tau
        uppers.add(tau)

    for sigma, tau in pairs.items():
        bound = _xi(c.vertices[tau], special)
        for face in c.faces[tau]:
            if face != sigma and face in pairs and _xi(c.vertices[face], special) < bound:
                raise MatchingError("xi decreases along a matched path", _describe(c, face))

    matching = MorseMatching(pairs, frozenset(domain))
    if not verify_acyclic(matching, c):
        raise MatchingError("insertion matching is not perfect and acyclic")
    logger.debug(f"build_aleph_matching: {len(pairs)} pairs over {len(domain)} cells")
    return matching


# ============================================================
# CONES AND SIMPLICES
# ============================================================

def _apex_cofaces(c: ChainComplex, sigma: Hashable, apex: Hashable) -> List[Hashable]:
    return [tau for tau, position in c.cofaces(sigma) if c.vertices[tau][position] == apex]


def is_cone(c: ChainComplex, apex: Hashable) -> bool:
    """Every cell avoiding the apex has exactly one coface obtained by adding it."""
    if apex not in c.vertices or c.dim_of(apex) != 0:
        return False
    for sigma in c.all_cells():
        if apex in c.vertices[sigma]:
            continue
        if len(_apex_cofaces(c, sigma, apex)) != 1:
            return False
    return True


def cone_matching(c: ChainComplex, apex: Hashable) -> MorseMatching:
    """sigma -> sigma + apex for every cell avoiding the apex; the apex stays critical."""
    pairs = {}
    for sigma in c.all_cells():
        if apex in c.vertices[sigma]:
            continue
        cofaces = _apex_cofaces(c, sigma, apex)
        if len(cofaces) != 1:
            raise MatchingError(f"not a cone: {len(cofaces)} apex cofaces", _describe(c, sigma))
        pairs[sigma] = cofaces[0]
    return MorseMatching(pairs, frozenset(c.all_cells()), frozenset([apex]))


def is_simplex(c: ChainComplex) -> bool:
    """A single maximal cell whose faces are pairwise distinct."""
    maximal = [key for key in c.all_cells() if not c.cofaces(key)]
    if len(maximal) != 1:
        return False
    d = c.dim_of(maximal[0])
    return len(c.all_cells()) == 2 ** (d + 1) - 1


# ============================================================
# FAMILIES AND CONDITION C_k
# ============================================================

def arnold_family(lam: NumberPartition, mu: NumberPartition) -> FrozenSet[NumberPartition]:
    """{tau : lambda |- tau |- mu, tau != (n)}."""
    full = NumberPartition((lam.n,))
    return frozenset(tau for tau in coarsenings(lam) if tau != full and refines_number(tau, mu))


def stanley_hanlon_family(n: int, r: int) -> FrozenSet[NumberPartition]:
    """{tau |- n : r <= l(tau) <= n-1}; r = 2 is Stanley's case, r > 2 Hanlon's."""
    if not 2 <= r <= n - 1:
        raise InvalidInputError(f"need 2 <= r <= n-1, got r={r}, n={n}")
    return frozenset(tau for tau in number_partitions(n) if r <= tau.length <= n - 1)


def load_family(path: Path) -> Tuple[str, FrozenSet[NumberPartition]]:
    """Read a YAML family file with keys ``name`` and ``partitions``."""
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise InvalidInputError(f"cannot read family file {path}: {exc}") from exc
    items = data.get("partitions")
    if not items:
        raise InvalidInputError(f"family file {path} lists no partitions")
    return str(data.get("name", Path(path).stem)), parse_family([str(item) for item in items])


def family_name(family: Iterable[NumberPartition]) -> str:
    return "{" + ";".join(str(t) for t in sorted(family, reverse=True)) + "}"


def _check_family(family: FrozenSet[NumberPartition]) -> int:
    if not family:
        raise InvalidInputError("family is empty")
    sizes = {tau.n for tau in family}
    if len(sizes) != 1:
        raise InvalidInputError(f"family mixes partitions of different n: {sorted(sizes)}")
    n = sizes.pop()
    if NumberPartition((n,)) in family or NumberPartition((1,) * n) in family:
        raise InvalidInputError(f"family must exclude ({n}) and (1^{n})")
    return n


def check_condition_ck(family: Iterable[NumberPartition], k: int) -> bool:
    """gamma_k(mu) lies in the family for every member mu."""
    family = frozenset(family)
    _check_family(family)
    for mu in family:
        if gamma_k(mu, k) not in family:
            logger.debug(f"C_{k} fails: gamma_{k}({mu}) = ({gamma_k(mu, k)}) missing")
            return False
    return True


# ============================================================
# COLLAPSE PIPELINE
# ============================================================

def gamma_vertex(v: MarkedForest, k: int) -> MarkedForest:
    """Split every leaf of a rank-0 forest into k's and 1's, maximizing the k's."""
    roots = []
    for root in v.roots:
        leaves = gamma_k(NumberPartition.of(c.label for c in root.children), k)
        roots.append(ForestNode.make(root.label, (ForestNode(x) for x in leaves.parts)))
    return MarkedForest(tuple(sorted(roots, key=lambda r: (-r.label, r.encoding))), 0)


def special_scheme(c: ChainComplex, k: int) -> VertexScheme:
    """V' = special vertices, v in V_z iff z = gamma_k(v)."""
    special = frozenset(v for v in c.cells.get(0, []) if is_special(c.payload[v].levels[0], k))
    zone = {}
    for v in c.cells.get(0, []):
        z = v if v in special else gamma_vertex(c.payload[v], k).key
        if z not in special:
            raise MatchingError(f"gamma_{k} image is not a vertex", _describe(c, v))
        zone[v] = z
    return VertexScheme(order=length_order(c), special=special, zone=zone)


def collapse_pipeline(family: Iterable[NumberPartition], mu: NumberPartition, k: int,
                      name: Optional[str] = None, with_order: bool = False,
                      max_forests: Optional[int] = None) -> CollapseCertificate:
    """Certify that X_{Lambda,mu} collapses to a point.

    Collapses X onto the subcomplex K of special vertices with the insertion
    matching, then K to its apex with a cone matching, and checks that the
    union is an acyclic matching with a single critical cell.

    Raises:
        InvalidInputError: preconditions on the family, k or mu fail, or X is empty
        MatchingError: some stage of the certificate fails
        ConsistencyError: the Betti numbers of X are not all zero
    """
    family = frozenset(family)
    n = _check_family(family)
    if not 2 <= k < n:
        raise InvalidInputError(f"need 2 <= k < n, got k={k}, n={n}")
    if mu.n != n:
        raise InvalidInputError(f"mu=({mu}) is not a partition of {n}")
    full = NumberPartition((n,))
    if mu not in family and mu != full:
        raise InvalidInputError(f"mu=({mu}) must lie in the family or be ({n})")
    if not check_condition_ck(family, k):
        raise InvalidInputError(f"family does not satisfy Condition C_{k}")

    c = x_family_mu(family, mu, max_forests=max_forests)
    if c.is_empty():
        raise InvalidInputError(f"X is empty for mu=({mu}); the empty space is not collapsible")

    scheme = special_scheme(c, k)
    aleph = build_aleph_matching(c, scheme)
    special_complex = c.restrict(lambda key: all(v in scheme.special for v in c.vertices[key]))

    if mu == full or mu == gamma_k(mu, k):
        kind = "simplex"
        if not is_simplex(special_complex):
            raise MatchingError("special subcomplex is not a simplex", f"mu=({mu})")
        top = max(special_complex.all_cells(), key=special_complex.dim_of)
        apex = special_complex.vertices[top][-1]
    else:
        kind = "cone"
        mu_forest = MarkedForest(tuple(ForestNode.make(p, [ForestNode(p)]) for p in mu.parts), 0)
        apex = gamma_vertex(mu_forest, k).key
        if apex not in special_complex.vertices or not is_cone(special_complex, apex):
            raise MatchingError(f"special subcomplex is not a cone over gamma_{k}(mu)", f"mu=({mu})")

    matching = aleph.union(cone_matching(special_complex, apex), critical=[apex])
    acyclic = verify_acyclic(matching, c)
    if not acyclic:
        raise MatchingError("combined matching is not perfect and acyclic")

    betti = reduced_betti(c)
    if not betti.is_zero():
        logger.error(f"collapse_pipeline: nonzero Betti numbers {betti} for mu=({mu})")
        raise ConsistencyError("collapsible space has nonzero reduced Betti numbers", str(betti))

    order = None
    if with_order:
        order = [[_describe(c, lo), _describe(c, up)] for lo, up in collapse_order(matching, c)]
    logger.info(f"collapse_pipeline: mu=({mu}), k={k}: {matching.size} pairs, K is a {kind}")
    return CollapseCertificate(
        family=name or family_name(family),
        mu=str(mu),
        k=k,
        cells=len(c.all_cells()),
        matched=matching.size,
        critical=len(matching.critical),
        K=kind,
        apex=_describe(c, apex),
        special_cells=len(special_complex.all_cells()),
        acyclic=acyclic,
        betti_zero=True,
        order=order,
    )


# ============================================================
# GENERIC CONE
# ============================================================

def generic_cone_matching(lam: NumberPartition, mu: NumberPartition,
                          max_forests: Optional[int] = None) -> ConeCertificate:
    """Cone certificate for generic lambda: apex x is the unique vertex with leaf level lambda."""
    if not is_generic(lam):
        raise InvalidInputError(f"({lam}) is not generic")
    if lam == mu or not refines_number(lam, mu):
        raise InvalidInputError(f"need lambda |- mu with lambda != mu, got ({lam}) and ({mu})")

    c = x_lambda_mu(lam, mu, max_forests=max_forests)
    apexes = [v for v in c.cells.get(0, []) if c.payload[v].levels[0] == lam]
    if len(apexes) != 1:
        raise MatchingError(f"{len(apexes)} vertices with leaf level lambda", f"({lam}),({mu})")
    x = apexes[0]

    order = length_order(c)
    scheme = VertexScheme(order=order, special=frozenset([x]), zone={v: x for v in order})
    aleph = build_aleph_matching(c, scheme)
    cone = is_cone(c, x)
    if not cone:
        raise MatchingError("unique-coface property fails", f"({lam}),({mu})")
    matching = MorseMatching(aleph.pairs, frozenset(c.all_cells()), frozenset([x]))
    acyclic = verify_acyclic(matching, c)
    if not acyclic:
        raise MatchingError("cone matching is not perfect and acyclic", f"({lam}),({mu})")

    betti = reduced_betti(c)
    if not betti.is_zero():
        raise ConsistencyError("cone has nonzero reduced Betti numbers", str(betti))
    return ConeCertificate(
        lam=str(lam), mu=str(mu), apex=_describe(c, x), cells=len(c.all_cells()),
        matched=matching.size, critical=1, cone=cone, acyclic=acyclic, betti_zero=True,
    )


def family_from_name(kind: str, lam: Optional[NumberPartition], mu: NumberPartition,
                     r: int = 2, loader: Callable[[Path], Tuple[str, FrozenSet[NumberPartition]]] = load_family,
                     path: Optional[Path] = None) -> Tuple[str, FrozenSet[NumberPartition]]:
    """Resolve a family name: ``arnold``, ``stanley``, ``hanlon`` or a YAML file."""
    if kind == "arnold":
        if lam is None:
            raise InvalidInputError("the arnold family needs --lambda")
        return f"arnold({lam})", arnold_family(lam, mu)
    if kind == "stanley":
        return f"stanley(n={mu.n})", stanley_hanlon_family(mu.n, 2)
    if kind == "hanlon":
        return f"hanlon(n={mu.n},r={r})", stanley_hanlon_family(mu.n, r)
    if path is None:
        path = Path(kind)
    return loader(path)
