"""Number and set partitions: refinement, types, joins, genericity, gamma_k."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from ..errors import InvalidInputError
from . import logger


# ============================================================
# NUMBER PARTITIONS
# ============================================================

@dataclass(frozen=True, order=True)
class NumberPartition:
    """Weakly decreasing sequence of positive integers (lambda, mu, tau)."""

    parts: Tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise InvalidInputError("a number partition needs at least one part")
        if any(not isinstance(p, int) or p < 1 for p in self.parts):
            raise InvalidInputError(f"parts must be positive integers: {self.parts}")
        if list(self.parts) != sorted(self.parts, reverse=True):
            raise InvalidInputError(f"parts must be weakly decreasing: {self.parts}")

    @classmethod
    def of(cls, parts: Iterable[int]) -> "NumberPartition":
        """Build from parts in any order."""
        return cls(tuple(sorted((int(p) for p in parts), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "NumberPartition":
        """Parse the comma-separated text form, e.g. ``"7,6,4,3,2,1"``."""
        try:
            parts = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse partition '{text}'") from exc
        return cls.of(parts)

    @classmethod
    def power(cls, k: int, m: int, n: int) -> "NumberPartition":
        """The special partition (k^m, 1^(n-km))."""
        if k < 1 or m < 0 or k * m > n:
            raise InvalidInputError(f"no partition ({k}^{m},1^{n - k * m}) of {n}")
        return cls.of([k] * m + [1] * (n - k * m))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)


def number_partitions(n: int, max_part: Optional[int] = None) -> Iterator[NumberPartition]:
    """All partitions of n in reverse lexicographic order."""
    if n < 1:
        return
    for parts in _partition_tuples(n, max_part or n):
        yield NumberPartition(parts)


@lru_cache(maxsize=None)
def _partition_tuples(n: int, max_part: int) -> Tuple[Tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partition_tuples(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def refines_number(lam: NumberPartition, mu: NumberPartition) -> bool:
    """lambda |- mu: the parts of lambda group into blocks summing to the parts of mu."""
    if lam.n != mu.n:
        raise InvalidInputError(f"cannot compare partitions of {lam.n} and {mu.n}: ({lam}) vs ({mu})")
    return _refines(lam.parts, mu.parts)


@lru_cache(maxsize=200000)
def _refines(lam: Tuple[int, ...], mu: Tuple[int, ...]) -> bool:
    if len(lam) < len(mu):
        return False
    if lam == mu:
        return True
    memo: Set[Tuple[int, Tuple[int, ...]]] = set()

    def place(i: int, remaining: Tuple[int, ...]) -> bool:
        if i == len(lam):
            return all(r == 0 for r in remaining)
        state = (i, remaining)
        if state in memo:
            return False
        part = lam[i]
        tried = set()
        for j, cap in enumerate(remaining):
            if cap < part or cap in tried:
                continue
            tried.add(cap)
            nxt = tuple(sorted(remaining[:j] + (cap - part,) + remaining[j + 1:], reverse=True))
            if place(i + 1, nxt):
                return True
        memo.add(state)
        return False

    return place(0, tuple(mu))


def coarsenings(lam: NumberPartition) -> Set[NumberPartition]:
    """All mu with lambda |- mu, including lambda and (n)."""
    seen = {lam.parts}
    frontier = [lam.parts]
    while frontier:
        nxt = []
        for parts in frontier:
            for i, j in combinations(range(len(parts)), 2):
                merged = parts[:i] + parts[i + 1:j] + parts[j + 1:] + (parts[i] + parts[j],)
                key = tuple(sorted(merged, reverse=True))
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
        frontier = nxt
    return {NumberPartition(p) for p in seen}


def is_generic(lam: NumberPartition) -> bool:
    """No two different sub-multisets of parts have the same sum."""
    by_sum: Dict[int, Tuple[int, ...]] = {}
    parts = lam.parts
    for size in range(len(parts) + 1):
        for idx in combinations(range(len(parts)), size):
            multiset = tuple(parts[i] for i in idx)
            total = sum(multiset)
            seen = by_sum.setdefault(total, multiset)
            if seen != multiset:
                logger.debug(f"({lam}) not generic: {seen} and {multiset} both sum to {total}")
                return False
    return True


def gamma_k(mu: NumberPartition, k: int) -> NumberPartition:
    """Split every part mu_i = k*q_i + r_i into q_i copies of k and r_i ones."""
    if k < 2:
        raise InvalidInputError(f"gamma_k needs k >= 2, got {k}")
    q = sum(p // k for p in mu.parts)
    r = sum(p % k for p in mu.parts)
    return NumberPartition.of([k] * q + [1] * r)


def is_special(mu: NumberPartition, k: int) -> bool:
    """Whether mu has the form (k^m, 1^(n-km))."""
    return all(p in (1, k) for p in mu.parts)


# ============================================================
# SET PARTITIONS
# ============================================================

Block = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class SetPartition:
    """Partition of {1..n}; blocks stored sorted, so equality ignores block order."""

    blocks: Tuple[Block, ...]

    def __post_init__(self):
        seen = [x for block in self.blocks for x in block]
        n = len(seen)
        if not self.blocks or any(not block for block in self.blocks):
            raise InvalidInputError(f"set partition needs nonempty blocks: {self.blocks}")
        if sorted(seen) != list(range(1, n + 1)):
            raise InvalidInputError(f"blocks must be disjoint and cover 1..{n}: {self.blocks}")

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        return cls(tuple(sorted(tuple(sorted(b)) for b in blocks)))

    @classmethod
    def discrete(cls, n: int) -> "SetPartition":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def full(cls, n: int) -> "SetPartition":
        return cls((tuple(range(1, n + 1)),))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self) -> Dict[int, int]:
        """Map element -> index of its block."""
        return {x: i for i, block in enumerate(self.blocks) for x in block}

    def to_json(self) -> List[List[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return "".join("(" + "".join(str(x) if x < 10 else f"{{{x}}}" for x in b) + ")"
                       for b in sorted(self.blocks, key=lambda b: (-len(b), b)))


def type_of(pi: SetPartition) -> NumberPartition:
    """Sorted block sizes."""
    return NumberPartition.of(len(b) for b in pi.blocks)


def refines_set(pi: SetPartition, pi2: SetPartition) -> bool:
    """Every block of pi lies inside a block of pi2."""
    where = pi2.block_of()
    return all(len({where[x] for x in block}) == 1 for block in pi.blocks)


def join(pi: SetPartition, pi2: SetPartition) -> SetPartition:
    """Finest common coarsening: components of the union of both block relations."""
    parent = {x: x for block in pi.blocks for x in block}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for partition in (pi, pi2):
        for block in partition.blocks:
            root = find(block[0])
            for x in block[1:]:
                other = find(x)
                if other != root:
                    parent[other] = root

    components: Dict[int, List[int]] = {}
    for x in parent:
        components.setdefault(find(x), []).append(x)
    return SetPartition.of(components.values())


def set_partitions(n: int) -> Iterator[SetPartition]:
    """All set partitions of {1..n} (Bell(n) of them)."""
    def grow(i: int, blocks: List[List[int]]) -> Iterator[List[List[int]]]:
        if i > n:
            yield blocks
            return
        for block in blocks:
            block.append(i)
            yield from grow(i + 1, blocks)
            block.pop()
        blocks.append([i])
        yield from grow(i + 1, blocks)
        blocks.pop()

    for blocks in grow(1, []):
        yield SetPartition.of(blocks)


def set_partitions_of_type(lam: NumberPartition) -> Iterator[SetPartition]:
    """All set partitions of {1..n} whose type is lambda."""
    n = lam.n
    wanted = Counter(lam.parts)

    def grow(remaining: Tuple[int, ...], sizes: Counter) -> Iterator[List[Block]]:
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for size in sorted(sizes):
            if sizes[size] == 0 or size - 1 > len(rest):
                continue
            sizes[size] -= 1
            for others in combinations(rest, size - 1):
                block = (first,) + others
                left = tuple(x for x in rest if x not in others)
                for tail in grow(left, sizes):
                    yield [block] + tail
            sizes[size] += 1

    for blocks in grow(tuple(range(1, n + 1)), wanted):
        yield SetPartition.of(blocks)


@lru_cache(maxsize=None)
def bell_number(n: int) -> int:
    """Bell numbers via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def parse_set_partition(text: str) -> SetPartition:
    """Parse the JSON-like text form ``[[1,2,3],[4,5]]``."""
    try:
        blocks = json.loads(text)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse set partition '{text}'") from exc
    return SetPartition.of(blocks)


def parse_family(items: Sequence[str]) -> FrozenSet[NumberPartition]:
    """Parse a list of partition strings into a family Lambda."""
    family = frozenset(NumberPartition.parse(item) for item in items)
    sizes = {mu.n for mu in family}
    if len(sizes) > 1:
        raise InvalidInputError(f"family mixes partitions of different n: {sorted(sizes)}")
    return family
