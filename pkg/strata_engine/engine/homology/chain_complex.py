"""
Chain Complex for the strata engine

Assembles the cellular chain complex of a triangulated space from its cells
and positional face lists, and computes reduced rational Betti numbers by
exact integer elimination.

Cells are addressed by hashable keys. Face i of a d-cell carries the sign
(-1)^i; the cell's ordered vertex sequence is derived from its faces, so
face i is the cell with vertex i removed. Dimension -1 holds the single
augmentation cell.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from ..combinatorics.forests import (
    MarkedForest,
    enumerate_all_forests,
    faces as forest_faces,
    family_admissible,
    lambda_mu_admissible,
)
from ..combinatorics.partitions import NumberPartition
from ..errors import BoundaryError, ConsistencyError, InvalidInputError
from ..schemas import BettiReport
from . import logger

SparseColumns = List[Dict[int, int]]


# ============================================================
# BETTI VECTORS
# ============================================================

@dataclass(frozen=True)
class BettiVector:
    """Reduced Betti numbers as sorted nonzero (i, b) pairs, i >= -1."""

    terms: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, values: Mapping[int, int]) -> "BettiVector":
        return cls(tuple(sorted((int(i), int(b)) for i, b in values.items() if b)))

    @classmethod
    def empty_space(cls) -> "BettiVector":
        """Reduced homology of the empty set: beta_{-1} = 1."""
        return cls(((-1, 1),))

    def __getitem__(self, i: int) -> int:
        return dict(self.terms).get(i, 0)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> List[int]:
        return [i for i, _ in self.terms]

    def shifted(self, offset: int) -> "BettiVector":
        return BettiVector(tuple((i + offset, b) for i, b in self.terms))

    def __add__(self, other: "BettiVector") -> "BettiVector":
        total = self.as_dict()
        for i, b in other.terms:
            total[i] = total.get(i, 0) + b
        return BettiVector.from_dict(total)

    def to_json(self, top: Optional[int] = None) -> Dict[str, int]:
        """Dense form {"-1": b, "0": b, ...} up to ``top`` (or the last nonzero index)."""
        last = max([top if top is not None else -1] + self.support())
        return {str(i): self[i] for i in range(-1, last + 1)}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " ".join(f"b{i}={b}" for i, b in self.terms)


# ============================================================
# EXACT RANK
# ============================================================

def _reduce_rows(rows: Iterable[Dict[int, int]]) -> int:
    """Fraction-free elimination: integer combinations, content divided out."""
    pivots: Dict[int, Dict[int, int]] = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        while row:
            lead = min(row)
            pivot = pivots.get(lead)
            if pivot is None:
                content = 0
                for v in row.values():
                    content = gcd(content, v)
                pivots[lead] = {c: v // content for c, v in row.items()}
                break
            a, b = pivot[lead], row[lead]
            merged = {c: a * v for c, v in row.items()}
            for c, v in pivot.items():
                merged[c] = merged.get(c, 0) - b * v
            row = {c: v for c, v in merged.items() if v}
            content = 0
            for v in row.values():
                content = gcd(content, v)
            if content > 1:
                row = {c: v // content for c, v in row.items()}
    return len(pivots)


def matrix_rank(columns: SparseColumns, pivoting: str = "rows") -> int:
    """Exact rank over Q of a sparse integer matrix given column by column.

    Args:
        columns: one ``{row_index: entry}`` dict per column
        pivoting: "rows" eliminates the transposed rows, "columns" the columns directly

    Returns:
        int: the rank
    """
    if pivoting == "columns":
        return _reduce_rows(columns)
    if pivoting != "rows":
        raise InvalidInputError(f"unknown pivoting order '{pivoting}'")
    rows: Dict[int, Dict[int, int]] = {}
    for j, column in enumerate(columns):
        for i, v in column.items():
            rows.setdefault(i, {})[j] = v
    return _reduce_rows(rows[i] for i in sorted(rows))


# ============================================================
# CHAIN COMPLEX
# ============================================================

@dataclass
class ChainComplex:
    """Cells per dimension, positional faces, ordered vertices and boundary matrices."""

    cells: Dict[int, List[Hashable]]
    faces: Dict[Hashable, Tuple[Hashable, ...]]
    vertices: Dict[Hashable, Tuple[Hashable, ...]]
    payload: Dict[Hashable, Any] = field(default_factory=dict)
    boundaries: Dict[int, SparseColumns] = field(default_factory=dict)
    index: Dict[Hashable, int] = field(default_factory=dict)
    _cofaces: Optional[Dict[Hashable, List[Tuple[Hashable, int]]]] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return max((d for d, cs in self.cells.items() if cs), default=-1)

    def f_vector(self) -> List[int]:
        return [len(self.cells.get(d, [])) for d in range(self.dimension + 1)]

    def count(self, d: int) -> int:
        if d == -1:
            return 1
        return len(self.cells.get(d, []))

    def dim_of(self, key: Hashable) -> int:
        return len(self.vertices[key]) - 1

    def all_cells(self) -> List[Hashable]:
        return [key for d in sorted(self.cells) for key in self.cells[d]]

    def is_empty(self) -> bool:
        return self.dimension < 0

    def cofaces(self, key: Hashable) -> List[Tuple[Hashable, int]]:
        """Cells having ``key`` as a face, with the face position."""
        if self._cofaces is None:
            index: Dict[Hashable, List[Tuple[Hashable, int]]] = {}
            for cell, cell_faces in self.faces.items():
                for position, face in enumerate(cell_faces):
                    index.setdefault(face, []).append((cell, position))
            self._cofaces = index
        return self._cofaces.get(key, [])

    def restrict(self, keep: Callable[[Hashable], bool]) -> "ChainComplex":
        """Subcomplex of the cells satisfying ``keep``; must be closed under faces."""
        cells = {d: [k for k in cs if keep(k)] for d, cs in self.cells.items()}
        kept = {k for cs in cells.values() for k in cs}
        return build_complex(cells, {k: self.faces[k] for k in kept if k in self.faces},
                             {k: self.payload[k] for k in kept if k in self.payload})

    def one_skeleton(self) -> nx.Graph:
        """Graph on the 0-cells with an edge per 1-cell."""
        graph = nx.Graph()
        graph.add_nodes_from(self.cells.get(0, []))
        for edge in self.cells.get(1, []):
            a, b = self.vertices[edge]
            graph.add_edge(a, b)
        return graph


def build_complex(cells_by_dim: Mapping[int, Iterable[Hashable]],
                  face_map: Mapping[Hashable, Sequence[Hashable]],
                  payload: Optional[Mapping[Hashable, Any]] = None,
                  check: bool = True) -> ChainComplex:
    """Assemble a chain complex and verify that the boundary squares to zero.

    Args:
        cells_by_dim: cell keys per dimension (dimension >= 0)
        face_map: positional faces of every cell of dimension >= 1
        payload: optional objects carried by the cells (forests, chains)
        check: verify d o d = 0

    Returns:
        ChainComplex: the assembled complex

    Raises:
        BoundaryError: a face is missing or the boundary does not square to zero
    """
    cells = {d: sorted(set(cs)) for d, cs in cells_by_dim.items() if d >= 0}
    top = max((d for d, cs in cells.items() if cs), default=-1)
    cells = {d: cells.get(d, []) for d in range(top + 1)}
    index = {key: i for cs in cells.values() for i, key in enumerate(cs)}

    faces: Dict[Hashable, Tuple[Hashable, ...]] = {}
    vertices: Dict[Hashable, Tuple[Hashable, ...]] = {}
    for key in cells.get(0, []):
        vertices[key] = (key,)
    for d in range(1, top + 1):
        lower = set(cells[d - 1])
        for key in cells[d]:
            cell_faces = tuple(face_map[key])
            if len(cell_faces) != d + 1:
                raise BoundaryError(f"{d}-cell has {len(cell_faces)} faces, expected {d + 1}", key)
            for face in cell_faces:
                if face not in lower:
                    logger.error(f"build_complex: face missing for {d}-cell")
                    raise BoundaryError(f"face of a {d}-cell missing from dimension {d - 1}", (key, face))
            faces[key] = cell_faces
            vertices[key] = vertices[cell_faces[d]] + (vertices[cell_faces[0]][-1],)

    boundaries: Dict[int, SparseColumns] = {}
    if top >= 0:
        boundaries[0] = [{0: 1} for _ in cells[0]]
    for d in range(1, top + 1):
        columns = []
        for key in cells[d]:
            column: Dict[int, int] = {}
            for position, face in enumerate(faces[key]):
                row = index[face]
                column[row] = column.get(row, 0) + (-1 if position % 2 else 1)
            columns.append({r: v for r, v in column.items() if v})
        boundaries[d] = columns

    complex_ = ChainComplex(cells=cells, faces=faces, vertices=vertices,
                            payload=dict(payload or {}), boundaries=boundaries, index=index)
    if check:
        check_boundary_squared(complex_)
    logger.debug(f"build_complex: f-vector {complex_.f_vector()}")
    return complex_


def check_boundary_squared(c: ChainComplex):
    """Raise BoundaryError unless d_{d-1} o d_d = 0 for every d >= 1."""
    for d in range(1, c.dimension + 1):
        lower = c.boundaries[d - 1]
        for j, column in enumerate(c.boundaries[d]):
            image: Dict[int, int] = {}
            for row, coeff in column.items():
                for r2, v in lower[row].items():
                    image[r2] = image.get(r2, 0) + coeff * v
            if any(image.values()):
                logger.error(f"boundary squared nonzero at dimension {d}")
                raise BoundaryError(f"boundary squared is nonzero on a {d}-cell", c.cells[d][j])


# ============================================================
# BETTI NUMBERS AND EULER CHARACTERISTIC
# ============================================================

def boundary_rank(c: ChainComplex, d: int, cross_check: bool = True) -> int:
    """Rank of d_d (d = 0 is the augmentation)."""
    columns = c.boundaries.get(d, [])
    if not columns:
        return 0
    rank = matrix_rank(columns, pivoting="rows")
    if cross_check:
        other = matrix_rank(columns, pivoting="columns")
        if other != rank:
            raise ConsistencyError(f"rank of boundary {d} differs between pivoting orders: {rank} vs {other}")
    return rank


def reduced_betti(c: ChainComplex, threads: int = 1, cross_check: bool = True) -> BettiVector:
    """beta_i = n_i - rank d_i - rank d_{i+1}, with the augmentation as d_0."""
    top = c.dimension
    degrees = list(range(0, top + 1))
    if threads > 1 and len(degrees) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ranks = dict(zip(degrees, pool.map(lambda d: boundary_rank(c, d, cross_check), degrees)))
    else:
        ranks = {d: boundary_rank(c, d, cross_check) for d in degrees}

    values = {}
    for i in range(-1, top + 1):
        values[i] = c.count(i) - ranks.get(i, 0) - ranks.get(i + 1, 0)
        if values[i] < 0:
            raise ConsistencyError(f"negative Betti number in degree {i}")
    return BettiVector.from_dict(values)


def euler_characteristic(c: ChainComplex) -> int:
    """Alternating sum of cell counts over dimensions >= 0."""
    return sum((-1) ** d * len(cs) for d, cs in c.cells.items())


def euler_from_betti(betti: BettiVector) -> int:
    """1 + sum_{i >= -1} (-1)^i beta_i."""
    return 1 + sum((-1) ** (i % 2) * b for i, b in betti.terms)


def check_euler(c: ChainComplex, betti: BettiVector) -> int:
    chi = euler_characteristic(c)
    if chi != euler_from_betti(betti):
        raise ConsistencyError(f"Euler characteristic {chi} disagrees with Betti numbers {betti}")
    return chi


# ============================================================
# FOREST MODEL COMPLEXES
# ============================================================

def complex_from_forests(forests_by_rank: Mapping[int, Iterable[MarkedForest]]) -> ChainComplex:
    """Cellular chain complex whose r-cells are rank-r forests, face i = delete_level(f, i)."""
    cells: Dict[int, List[bytes]] = {}
    face_map: Dict[bytes, List[bytes]] = {}
    payload: Dict[bytes, MarkedForest] = {}
    for rank, forests in forests_by_rank.items():
        for forest in forests:
            cells.setdefault(rank, []).append(forest.key)
            payload[forest.key] = forest
            if rank >= 1:
                face_map[forest.key] = [face.key for face in forest_faces(forest)]
    return build_complex(cells, face_map, payload)


def x_lambda_mu(lam: NumberPartition, mu: NumberPartition,
                max_forests: Optional[int] = None) -> ChainComplex:
    """Forest model of X_{lambda,mu}; empty when lambda = mu."""
    if lam == mu:
        return build_complex({}, {})
    forests = enumerate_all_forests(lambda_mu_admissible(lam, mu), mu, max_forests=max_forests)
    logger.debug(f"x_lambda_mu(({lam}),({mu})): {sum(len(v) for v in forests.values())} cells")
    return complex_from_forests(forests)


def x_family_mu(family: Iterable[NumberPartition], mu: NumberPartition,
                max_forests: Optional[int] = None) -> ChainComplex:
    """Forest model of X_{Lambda,mu}: every non-root level lies in the family."""
    family = frozenset(family)
    if any(tau.n != mu.n for tau in family):
        raise InvalidInputError(f"family members must be partitions of {mu.n}")
    forests = enumerate_all_forests(family_admissible(family), mu, max_forests=max_forests)
    return complex_from_forests(forests)


def component_count(c: ChainComplex) -> int:
    """beta_0 (unreduced): number of connected components."""
    return nx.number_connected_components(c.one_skeleton()) if c.cells.get(0) else 0


def betti_report(c: ChainComplex, mu: NumberPartition, lam: Optional[NumberPartition] = None,
                 family: Optional[str] = None, threads: int = 1) -> BettiReport:
    """f-vector, reduced Betti numbers and Euler characteristic, cross-checked."""
    betti = reduced_betti(c, threads=threads)
    chi = check_euler(c, betti)
    return BettiReport(
        lam=str(lam) if lam is not None else None, family=family, mu=str(mu),
        f_vector=c.f_vector(), betti=betti.to_json(top=c.dimension), euler=chi, empty=c.is_empty(),
    )
