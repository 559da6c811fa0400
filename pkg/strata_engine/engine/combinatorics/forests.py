"""Marked forests: validation, canonical keys, level deletion, boundary, enumeration.

A marked forest of rank r is a forest of rooted trees whose leaves all sit at
depth r+1, whose level sizes grow strictly from the roots down, and whose
vertex labels satisfy label(v) = sum of the children's labels. Heights count
from the leaves: leaves have height 0, roots height r+1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, combinations_with_replacement, product
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..errors import GuardExceededError, InvalidInputError
from . import logger
from .partitions import NumberPartition, number_partitions, refines_number


# ============================================================
# DATA MODEL
# ============================================================

@dataclass(frozen=True, eq=False)
class ForestNode:
    """A vertex with its label eta(v) and its children."""

    label: int
    children: Tuple["ForestNode", ...] = ()

    @classmethod
    def make(cls, label: int, children: Iterable["ForestNode"] = ()) -> "ForestNode":
        """Build with children in canonical order."""
        return cls(label, tuple(sorted(children, key=_node_order)))

    @cached_property
    def encoding(self) -> str:
        """Canonical text: ``label`` for a leaf, ``label[child,child]`` otherwise."""
        if not self.children:
            return str(self.label)
        inner = ",".join(c.encoding for c in sorted(self.children, key=_node_order))
        return f"{self.label}[{inner}]"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ForestNode) and self.encoding == other.encoding

    def __hash__(self) -> int:
        return hash(self.encoding)


def _node_order(node: ForestNode) -> Tuple[int, str]:
    return (-node.label, node.encoding)


@dataclass(frozen=True, eq=False)
class MarkedForest:
    """A marked forest (T, eta) of a given rank; compare via canonical_key."""

    roots: Tuple[ForestNode, ...]
    rank: int

    @classmethod
    def build(cls, roots: Iterable[ForestNode], rank: int) -> "MarkedForest":
        """Canonicalize and validate; raises InvalidInputError on invalid input."""
        forest = cls(tuple(sorted(roots, key=_node_order)), rank)
        if not validate(forest):
            raise InvalidInputError(f"not a marked forest of rank {rank}: {format_forest(forest)}")
        return forest

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self)

    @cached_property
    def levels(self) -> Tuple[NumberPartition, ...]:
        """lambda_0, ..., lambda_{r+1} (index = height)."""
        return tuple(level_partition(self, i) for i in range(self.rank + 2))

    @property
    def mu(self) -> NumberPartition:
        return NumberPartition.of(root.label for root in self.roots)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MarkedForest) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __str__(self) -> str:
        return format_forest(self)


def _labels_at_depth(roots: Sequence[ForestNode], depth: int) -> List[int]:
    layer = list(roots)
    for _ in range(depth):
        layer = [c for node in layer for c in node.children]
    return [node.label for node in layer]


# ============================================================
# VALIDATION AND LEVELS
# ============================================================

def validate(f: MarkedForest) -> bool:
    """Check gradedness, strictly increasing level sizes and label coherence."""
    if f.rank < 0 or not f.roots:
        return False

    level_sizes = [0] * (f.rank + 2)

    def visit(node: ForestNode, depth: int) -> bool:
        if not isinstance(node.label, int) or node.label < 1:
            return False
        level_sizes[depth] += 1
        if depth == f.rank + 1:
            return not node.children
        if not node.children:
            return False
        if sum(c.label for c in node.children) != node.label:
            return False
        return all(visit(c, depth + 1) for c in node.children)

    if not all(visit(root, 0) for root in f.roots):
        return False
    return all(a < b for a, b in zip(level_sizes, level_sizes[1:]))


def level_partition(f: MarkedForest, i: int) -> NumberPartition:
    """lambda_i(T, eta): the labels of the vertices of height i."""
    if not 0 <= i <= f.rank + 1:
        raise InvalidInputError(f"height {i} out of range 0..{f.rank + 1}")
    return NumberPartition.of(_labels_at_depth(f.roots, f.rank + 1 - i))


def level_vertex(f: MarkedForest, i: int) -> MarkedForest:
    """The vertex of the cell f at height i: level i kept directly under the roots."""
    if not 0 <= i <= f.rank:
        raise InvalidInputError(f"vertex height {i} out of range 0..{f.rank}")
    depth = f.rank + 1 - i
    roots = [
        ForestNode.make(root.label, (ForestNode(x) for x in _labels_at_depth([root], depth)))
        for root in f.roots
    ]
    return MarkedForest(tuple(sorted(roots, key=_node_order)), 0)


def canonical_key(f: MarkedForest) -> bytes:
    """Deterministic encoding, invariant under reordering siblings and trees."""
    body = "|".join(root.encoding for root in sorted(f.roots, key=_node_order))
    return f"r{f.rank}:{body}".encode("ascii")


def format_forest(f: MarkedForest) -> str:
    """Human text form, one bracketed tree per root, e.g. ``5[3[2,1],2[1,1]]``."""
    return " ".join(root.encoding for root in sorted(f.roots, key=_node_order))


# ============================================================
# FACES AND BOUNDARY
# ============================================================

def delete_level(f: MarkedForest, i: int) -> MarkedForest:
    """(T^i, eta^i): remove the vertices of height i and splice the gap."""
    if f.rank < 1:
        raise InvalidInputError("level deletion needs rank >= 1; the rank-0 boundary is the augmentation")
    if not 0 <= i <= f.rank:
        raise InvalidInputError(f"level {i} out of range 0..{f.rank}")

    def rebuild(node: ForestNode, height: int) -> ForestNode:
        if height == i + 1:
            if i == 0:
                return ForestNode(node.label)
            return ForestNode.make(node.label, (g for c in node.children for g in c.children))
        return ForestNode.make(node.label, (rebuild(c, height - 1) for c in node.children))

    roots = [rebuild(root, f.rank + 1) for root in f.roots]
    return MarkedForest(tuple(sorted(roots, key=_node_order)), f.rank - 1)


def faces(f: MarkedForest) -> List[MarkedForest]:
    """Positional faces: faces(f)[i] = delete_level(f, i)."""
    return [delete_level(f, i) for i in range(f.rank + 1)]


def boundary(f: MarkedForest) -> List[Tuple[int, MarkedForest]]:
    """Sum of (-1)^i (T^i, eta^i), equal terms combined, zero terms dropped."""
    terms: Dict[bytes, List[Any]] = {}
    for i, face in enumerate(faces(f)):
        entry = terms.setdefault(face.key, [0, face])
        entry[0] += -1 if i % 2 else 1
    return [(coeff, face) for key, (coeff, face) in sorted(terms.items()) if coeff]


# ============================================================
# ADMISSIBILITY
# ============================================================

@dataclass(frozen=True)
class Admissibility:
    """Predicate on level partitions, plus the labels a level may ever use."""

    name: str
    predicate: Callable[[NumberPartition], bool] = field(compare=False)
    labels: Optional[FrozenSet[int]] = None

    def __call__(self, tau: NumberPartition) -> bool:
        return self.predicate(tau)


def lambda_mu_admissible(lam: NumberPartition, mu: NumberPartition) -> Admissibility:
    """Levels of (lambda, mu)-forests: partitions refined by lambda."""
    if not refines_number(lam, mu) or lam == mu:
        raise InvalidInputError(f"need lambda |- mu with lambda != mu, got ({lam}) and ({mu})")
    sums = {sum(c) for size in range(1, len(lam) + 1) for c in combinations(lam.parts, size)}
    return Admissibility(f"({lam})|-tau", lambda tau: refines_number(lam, tau), frozenset(sums))


def family_admissible(family: Iterable[NumberPartition]) -> Admissibility:
    """Levels of (Lambda, mu)-forests: members of the family."""
    members = frozenset(family)
    labels = frozenset(p for tau in members for p in tau.parts)
    name = "{" + ";".join(str(t) for t in sorted(members, reverse=True)) + "}"
    return Admissibility(name, lambda tau: tau in members, labels)


# ============================================================
# ENUMERATION
# ============================================================

def _splits(label: int, labels: Optional[FrozenSet[int]]) -> List[Tuple[int, ...]]:
    out = []
    for p in number_partitions(label):
        if labels is None or all(x in labels for x in p.parts):
            out.append(p.parts)
    return out


def _extensions(node: ForestNode, depth_left: int, labels: Optional[FrozenSet[int]]) -> List[ForestNode]:
    """Distinct ways to give every leaf below ``node`` (at depth_left) a row of children."""
    if depth_left == 0:
        return [ForestNode.make(node.label, (ForestNode(x) for x in parts))
                for parts in _splits(node.label, labels)]
    groups = Counter(node.children)
    per_group = []
    for child, count in sorted(groups.items(), key=lambda kv: _node_order(kv[0])):
        options = _extensions(child, depth_left - 1, labels)
        per_group.append(list(combinations_with_replacement(options, count)))
    out = []
    for choice in product(*per_group):
        out.append(ForestNode.make(node.label, (c for combo in choice for c in combo)))
    return out


def _grow(roots: Tuple[ForestNode, ...], depth: int, admissible: Callable[[NumberPartition], bool],
          labels: Optional[FrozenSet[int]]) -> Iterator[Tuple[ForestNode, ...]]:
    """Attach one more level below the current leaves (at ``depth``)."""
    old_leaves = len(_labels_at_depth(roots, depth))
    groups = Counter(roots)
    per_group = []
    for root, count in sorted(groups.items(), key=lambda kv: _node_order(kv[0])):
        options = _extensions(root, depth, labels)
        per_group.append(list(combinations_with_replacement(options, count)))
    for choice in product(*per_group):
        new_roots = tuple(sorted((r for combo in choice for r in combo), key=_node_order))
        new_level = _labels_at_depth(new_roots, depth + 1)
        if len(new_level) <= old_leaves:
            continue
        if admissible(NumberPartition.of(new_level)):
            yield new_roots


def enumerate_all_forests(admissible: Callable[[NumberPartition], bool], mu: NumberPartition,
                          max_rank: Optional[int] = None,
                          max_forests: Optional[int] = None) -> Dict[int, List[MarkedForest]]:
    """All marked forests with roots mu and admissible levels, grouped by rank."""
    labels = getattr(admissible, "labels", None)
    current = [tuple(sorted((ForestNode(x) for x in mu.parts), key=_node_order))]
    by_rank: Dict[int, List[MarkedForest]] = {}
    total = 0
    depth = 0
    while current and (max_rank is None or depth <= max_rank):
        seen: Dict[bytes, MarkedForest] = {}
        for roots in current:
            for grown in _grow(roots, depth, admissible, labels):
                forest = MarkedForest(grown, depth)
                seen.setdefault(forest.key, forest)
        if not seen:
            break
        by_rank[depth] = [seen[k] for k in sorted(seen)]
        total += len(seen)
        if max_forests is not None and total > max_forests:
            raise GuardExceededError("max_forests", max_forests, total)
        logger.debug(f"enumerate_forests[{getattr(admissible, 'name', 'custom')}, mu=({mu})]: "
                     f"rank {depth}: {len(seen)} forests")
        current = [f.roots for f in by_rank[depth]]
        depth += 1
    return by_rank


def enumerate_forests(admissible: Callable[[NumberPartition], bool], mu: NumberPartition,
                      rank: int, max_forests: Optional[int] = None) -> List[MarkedForest]:
    """Isomorphism classes of marked forests of one rank with roots mu and admissible levels."""
    if rank < 0:
        raise InvalidInputError(f"rank must be >= 0, got {rank}")
    return enumerate_all_forests(admissible, mu, max_rank=rank, max_forests=max_forests).get(rank, [])


# ============================================================
# JSON
# ============================================================

def node_to_json(node: ForestNode) -> Dict[str, Any]:
    return {"label": node.label,
            "children": [node_to_json(c) for c in sorted(node.children, key=_node_order)]}


def forest_to_json(f: MarkedForest) -> Dict[str, Any]:
    return {"rank": f.rank, "roots": [node_to_json(r) for r in sorted(f.roots, key=_node_order)]}


def forest_from_json(data: Dict[str, Any]) -> MarkedForest:
    """Inverse of forest_to_json; validates the result."""
    def node(obj: Dict[str, Any]) -> ForestNode:
        try:
            return ForestNode.make(int(obj["label"]), (node(c) for c in obj.get("children", [])))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed forest node: {obj}") from exc

    try:
        rank = int(data["rank"])
        roots = [node(r) for r in data["roots"]]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError("forest JSON needs 'rank' and 'roots'") from exc
    return MarkedForest.build(roots, rank)
