"""
Quotient Oracle for the strata engine

Brute-force ground truth at small n. Builds the join-closure Pi_lambda of the
type-lambda set partitions, enumerates chains of the open interval (0, pi),
groups them into St_pi-orbits, assembles the quotient chain complex and
compares it cell by cell with the marked-forest model through psi.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from ..combinatorics.forests import ForestNode, MarkedForest, delete_level, validate
from ..combinatorics.partitions import (
    NumberPartition,
    SetPartition,
    bell_number,
    coarsenings,
    join,
    number_partitions,
    refines_number,
    refines_set,
    set_partitions_of_type,
    type_of,
)
from ..errors import ConsistencyError, GuardExceededError, InvalidInputError
from ..homology.chain_complex import BettiVector, ChainComplex, build_complex, reduced_betti, x_lambda_mu
from ..schemas import DimensionComparison, OracleReport
from ..settings import DEFAULT_MAX_BELL
from . import logger

Blocks = Tuple[Tuple[int, ...], ...]
Chain = Tuple[Blocks, ...]
Perm = Tuple[int, ...]

SWEEP_MAX_N = 6


# ============================================================
# PI_LAMBDA
# ============================================================

@dataclass(frozen=True)
class PiLambda:
    """Joins of type-lambda set partitions of [n], with the bottom element attached."""

    lam: NumberPartition
    n: int
    elements: FrozenSet[SetPartition]

    @property
    def bottom(self) -> SetPartition:
        return SetPartition.discrete(self.n)

    def of_type(self, mu: NumberPartition) -> List[SetPartition]:
        return sorted(e for e in self.elements if e != self.bottom and type_of(e) == mu)

    def types(self) -> Set[NumberPartition]:
        """Types of the non-bottom elements, plus lambda itself."""
        return {type_of(e) for e in self.elements if e != self.bottom} | {self.lam}


def _check_guard(n: int, max_bell: Optional[int]):
    bell = bell_number(n)
    if max_bell is not None and bell > max_bell:
        raise GuardExceededError("max_bell", max_bell, bell)


@lru_cache(maxsize=64)
def _join_closure(lam: NumberPartition) -> FrozenSet[SetPartition]:
    generators = list(set_partitions_of_type(lam))
    elements = set(generators)
    frontier = list(generators)
    while frontier:
        fresh = []
        for a in frontier:
            for g in generators:
                joined = join(a, g)
                if joined not in elements:
                    elements.add(joined)
                    fresh.append(joined)
        frontier = fresh
    elements.add(SetPartition.discrete(lam.n))
    logger.debug(f"Pi_({lam}): {len(elements)} elements from {len(generators)} generators")
    return frozenset(elements)


def build_pi_lambda(lam: NumberPartition, n: Optional[int] = None,
                    max_bell: Optional[int] = DEFAULT_MAX_BELL) -> PiLambda:
    """Join-closure of the type-lambda set partitions plus 0.

    Raises:
        InvalidInputError: n does not match lambda
        GuardExceededError: Bell(n) is above the guard
    """
    if n is not None and n != lam.n:
        raise InvalidInputError(f"({lam}) is not a partition of {n}")
    _check_guard(lam.n, max_bell)
    return PiLambda(lam, lam.n, _join_closure(lam))


def is_join_reachable(lam: NumberPartition, mu: NumberPartition,
                      max_bell: Optional[int] = DEFAULT_MAX_BELL) -> bool:
    """Whether some element of Pi_lambda has type mu."""
    if lam == mu:
        return True
    return mu in build_pi_lambda(lam, max_bell=max_bell).types()


def find_unreachable_pairs(n: int, max_bell: Optional[int] = DEFAULT_MAX_BELL
                           ) -> List[Tuple[NumberPartition, NumberPartition]]:
    """All lambda |- mu |- n where mu is not the type of a join of type-lambda partitions."""
    _check_guard(n, max_bell)
    found = []
    for lam in number_partitions(n):
        reachable = build_pi_lambda(lam, max_bell=max_bell).types()
        for mu in sorted(coarsenings(lam), reverse=True):
            if mu not in reachable:
                found.append((lam, mu))
    logger.info(f"find_unreachable_pairs(n={n}): {len(found)} pairs")
    return found


# ============================================================
# STABILIZERS
# ============================================================

def _size_classes(pi: SetPartition) -> Dict[int, List[Tuple[int, ...]]]:
    classes: Dict[int, List[Tuple[int, ...]]] = {}
    for block in pi.blocks:
        classes.setdefault(len(block), []).append(block)
    return classes


def stabilizer(pi: SetPartition) -> List[Perm]:
    """Generators of St_pi: a transposition and a cycle per block, swaps of equal-size blocks.

    A permutation g is stored as a tuple with g[x] the image of x (g[0] = 0).
    """
    n = pi.n
    identity = list(range(n + 1))
    generators = []
    for block in pi.blocks:
        if len(block) >= 2:
            g = list(identity)
            g[block[0]], g[block[1]] = block[1], block[0]
            generators.append(tuple(g))
        if len(block) >= 3:
            g = list(identity)
            for i, x in enumerate(block):
                g[x] = block[(i + 1) % len(block)]
            generators.append(tuple(g))
    for blocks in _size_classes(pi).values():
        for a, b in zip(blocks, blocks[1:]):
            g = list(identity)
            for x, y in zip(a, b):
                g[x], g[y] = y, x
            generators.append(tuple(g))
    return generators


def stabilizer_order(pi: SetPartition) -> int:
    """prod over block sizes s with multiplicity m of m! (s!)^m."""
    order = 1
    for size, blocks in _size_classes(pi).items():
        order *= factorial(len(blocks)) * factorial(size) ** len(blocks)
    return order


def stabilizer_elements(pi: SetPartition) -> Iterator[Perm]:
    """Every element of St_pi."""
    n = pi.n
    per_class = []
    for blocks in _size_classes(pi).values():
        options = []
        for targets in permutations(blocks):
            for images in product(*(permutations(t) for t in targets)):
                options.append({x: y for src, img in zip(blocks, images) for x, y in zip(src, img)})
        per_class.append(options)
    for choice in product(*per_class):
        g = [0] * (n + 1)
        for mapping in choice:
            for x, y in mapping.items():
                g[x] = y
        yield tuple(g)


def _act(g: Perm, blocks: Blocks) -> Blocks:
    return tuple(sorted(tuple(sorted(g[x] for x in b)) for b in blocks))


def _act_chain(g: Perm, chain: Chain) -> Chain:
    return tuple(_act(g, blocks) for blocks in chain)


# ============================================================
# CHAINS AND ORBITS
# ============================================================

@dataclass(frozen=True)
class OrbitCell:
    """Canonical (lexicographically least) chain x_1 < ... < x_{r+1} of an St_pi-orbit."""

    chain: Chain
    orbit_id: int
    size: int

    @property
    def dim(self) -> int:
        return len(self.chain) - 1

    def set_partitions(self) -> Tuple[SetPartition, ...]:
        return tuple(SetPartition(b) for b in self.chain)

    def __str__(self) -> str:
        return " < ".join(str(p) for p in self.set_partitions())


def interval_elements(pl: PiLambda, pi: SetPartition) -> List[SetPartition]:
    """Elements of Pi_lambda strictly between 0 and pi."""
    if pi not in pl.elements:
        raise InvalidInputError(f"{pi} is not an element of Pi_({pl.lam})")
    return sorted(e for e in pl.elements
                  if e != pl.bottom and e != pi and refines_set(e, pi))


def enumerate_chains(elements: Sequence[SetPartition]) -> Dict[int, List[Chain]]:
    """All strictly increasing chains, grouped by dimension (length - 1)."""
    above: Dict[SetPartition, List[SetPartition]] = {
        e: [f for f in elements if f != e and refines_set(e, f)] for e in elements
    }
    chains: Dict[int, List[Chain]] = {}

    def extend(prefix: List[SetPartition]):
        chains.setdefault(len(prefix) - 1, []).append(tuple(p.blocks for p in prefix))
        for f in above[prefix[-1]]:
            prefix.append(f)
            extend(prefix)
            prefix.pop()

    for e in elements:
        extend([e])
    return chains


@lru_cache(maxsize=8)
def _orbit_labels(pl: PiLambda, pi: SetPartition) -> Tuple[Dict[Chain, Chain], Dict[Chain, int]]:
    """chain -> canonical chain of its orbit, and orbit sizes, by closure under generators."""
    chains = enumerate_chains(interval_elements(pl, pi))
    generators = stabilizer(pi)
    labels: Dict[Chain, Chain] = {}
    sizes: Dict[Chain, int] = {}
    for dim in sorted(chains):
        for chain in chains[dim]:
            if chain in labels:
                continue
            orbit = {chain}
            frontier = [chain]
            while frontier:
                fresh = []
                for c in frontier:
                    for g in generators:
                        image = _act_chain(g, c)
                        if image not in orbit:
                            orbit.add(image)
                            fresh.append(image)
                frontier = fresh
            canonical = min(orbit)
            sizes[canonical] = len(orbit)
            for c in orbit:
                labels[c] = canonical
    logger.debug(f"orbits in ({pl.bottom}, {pi}): {len(sizes)} from {len(labels)} chains")
    return labels, sizes


def orbit_cells(pl: PiLambda, pi: SetPartition) -> Dict[int, List[OrbitCell]]:
    """St_pi-orbits of chains in the open interval, per dimension."""
    _, sizes = _orbit_labels(pl, pi)
    ordered = sorted(sizes, key=lambda ch: (len(ch), ch))
    cells: Dict[int, List[OrbitCell]] = {}
    for orbit_id, chain in enumerate(ordered):
        cells.setdefault(len(chain) - 1, []).append(OrbitCell(chain, orbit_id, sizes[chain]))
    return cells


def orbit_partition_by_sweep(pl: PiLambda, pi: SetPartition) -> Dict[Chain, Chain]:
    """chain -> canonical chain, applying every element of St_pi (small n only)."""
    if pi.n > SWEEP_MAX_N:
        raise GuardExceededError("sweep_n", SWEEP_MAX_N, pi.n)
    group = list(stabilizer_elements(pi))
    labels: Dict[Chain, Chain] = {}
    for dim_chains in enumerate_chains(interval_elements(pl, pi)).values():
        for chain in dim_chains:
            if chain in labels:
                continue
            orbit = {_act_chain(g, chain) for g in group}
            canonical = min(orbit)
            for c in orbit:
                labels[c] = canonical
    return labels


def oracle_complex(pl: PiLambda, pi: SetPartition) -> ChainComplex:
    """Chain complex of Delta(Pi_lambda(0, pi)) / St_pi; face i deletes x_{i+1}."""
    labels, _ = _orbit_labels(pl, pi)
    cells_by_dim = orbit_cells(pl, pi)
    cells: Dict[int, List[Chain]] = {}
    face_map: Dict[Chain, List[Chain]] = {}
    payload: Dict[Chain, OrbitCell] = {}
    for dim, orbit_list in cells_by_dim.items():
        for cell in orbit_list:
            cells.setdefault(dim, []).append(cell.chain)
            payload[cell.chain] = cell
            if dim >= 1:
                face_map[cell.chain] = [labels[cell.chain[:i] + cell.chain[i + 1:]]
                                        for i in range(dim + 1)]
    return build_complex(cells, face_map, payload)


# ============================================================
# PSI
# ============================================================

def psi_forest_of_chain(chain: Union[OrbitCell, Sequence[Union[SetPartition, Blocks]]],
                        pi: SetPartition) -> MarkedForest:
    """Blocks of x_i become height-i vertices labeled by size; pi supplies the roots."""
    if isinstance(chain, OrbitCell):
        chain = chain.chain
    levels = [c.blocks if isinstance(c, SetPartition) else tuple(c) for c in chain]
    levels.append(pi.blocks)
    rank = len(levels) - 2
    if rank < 0:
        raise InvalidInputError("psi needs a nonempty chain")

    def node(block: Tuple[int, ...], height: int) -> ForestNode:
        if height == 0:
            return ForestNode(len(block))
        inside = set(block)
        children = [node(b, height - 1) for b in levels[height - 1] if inside.issuperset(b)]
        return ForestNode.make(len(block), children)

    forest = MarkedForest(tuple(sorted((node(b, rank + 1) for b in pi.blocks),
                                       key=lambda r: (-r.label, r.encoding))), rank)
    if not validate(forest):
        raise ConsistencyError("psi produced an invalid marked forest", str(forest))
    return forest


# ============================================================
# COMPARISON WITH THE FOREST MODEL
# ============================================================

def compare_with_forest_model(lam: NumberPartition, mu: NumberPartition, n: Optional[int] = None,
                              max_bell: Optional[int] = DEFAULT_MAX_BELL,
                              max_forests: Optional[int] = None) -> OracleReport:
    """Cell counts, psi bijectivity, face compatibility and Betti numbers on both sides.

    Raises:
        InvalidInputError: lambda does not refine mu, or n does not match
        GuardExceededError: Bell(n) is above the guard
    """
    if n is not None and (lam.n != n or mu.n != n):
        raise InvalidInputError(f"({lam}) and ({mu}) must be partitions of {n}")
    if not refines_number(lam, mu):
        raise InvalidInputError(f"({lam}) does not refine ({mu})")
    pl = build_pi_lambda(lam, max_bell=max_bell)
    forest_complex = x_lambda_mu(lam, mu, max_forests=max_forests)
    forest_betti = reduced_betti(forest_complex)

    if lam == mu:
        empty = BettiVector.empty_space()
        return OracleReport(lam=str(lam), mu=str(mu), n=lam.n, pi=str(min(set_partitions_of_type(lam))),
                            reachable=True, dimensions=[], bijective=forest_complex.is_empty(),
                            oracle_betti=empty.to_json(), forest_betti=forest_betti.to_json(),
                            betti_equal=forest_betti == empty)

    representatives = pl.of_type(mu)
    if not representatives:
        logger.info(f"oracle: ({mu}) is not reachable from ({lam}); X is a point by convention")
        dims = [
            DimensionComparison(dim=d, oracle_cells=0, forest_cells=len(keys), injective=True,
                                surjective=not keys, faces_match=True,
                                unmatched_forests=[str(forest_complex.payload[k]) for k in keys])
            for d, keys in forest_complex.cells.items()
        ]
        point = BettiVector()
        return OracleReport(lam=str(lam), mu=str(mu), n=lam.n, pi=None, reachable=False,
                            dimensions=dims, bijective=forest_complex.is_empty(),
                            oracle_betti=point.to_json(), forest_betti=forest_betti.to_json(),
                            betti_equal=forest_betti == point)

    pi = representatives[0]
    oracle = oracle_complex(pl, pi)
    oracle_betti = reduced_betti(oracle)

    dims = []
    top = max(oracle.dimension, forest_complex.dimension)
    psi_keys = {chain: psi_forest_of_chain(chain, pi) for chain in oracle.all_cells()}
    for d in range(top + 1):
        forest_keys = set(forest_complex.cells.get(d, []))
        hits: Dict[bytes, List[Chain]] = {}
        faces_match = True
        for chain in oracle.cells.get(d, []):
            image = psi_keys[chain]
            hits.setdefault(image.key, []).append(chain)
            if d >= 1:
                for i, face in enumerate(oracle.faces[chain]):
                    if psi_keys[face].key != delete_level(image, i).key:
                        faces_match = False
        collisions = sorted(str(psi_keys[chains[0]]) for chains in hits.values() if len(chains) > 1)
        unmatched = sorted(str(forest_complex.payload[k]) for k in forest_keys - set(hits))
        outside = set(hits) - forest_keys
        if outside:
            raise ConsistencyError("psi image is not a (lambda,mu)-forest",
                                   str(psi_keys[hits[next(iter(outside))][0]]))
        dims.append(DimensionComparison(
            dim=d, oracle_cells=len(oracle.cells.get(d, [])), forest_cells=len(forest_keys),
            injective=not collisions, surjective=not unmatched, faces_match=faces_match,
            unmatched_forests=unmatched, psi_collisions=collisions,
        ))

    bijective = all(x.injective and x.surjective and x.faces_match for x in dims)
    if not bijective:
        logger.warning(f"oracle: psi is not a face-preserving bijection for ({lam}),({mu})")
    return OracleReport(
        lam=str(lam), mu=str(mu), n=lam.n, pi=str(pi), reachable=True, dimensions=dims,
        bijective=bijective, oracle_betti=oracle_betti.to_json(top), forest_betti=forest_betti.to_json(top),
        betti_equal=oracle_betti == forest_betti,
    )


def oracle_betti(lam: NumberPartition, mu: NumberPartition,
                 max_bell: Optional[int] = DEFAULT_MAX_BELL) -> Optional[BettiVector]:
    """Reduced Betti numbers of the quotient, or None when mu is unreachable."""
    pl = build_pi_lambda(lam, max_bell=max_bell)
    if lam == mu:
        return BettiVector.empty_space()
    representatives = pl.of_type(mu)
    if not representatives:
        return None
    return reduced_betti(oracle_complex(pl, representatives[0]))
