"""Partitions (Young diagrams) and their cell statistics.

Rows and columns are 1-indexed: the cell (i, j) sits in row i, column j.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from errors import CellOutOfDiagram


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...] = ()
    size: int = field(init=False, compare=False)

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "size", sum(parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"Partition({list(self.parts)})"

    def row(self, i: int) -> int:
        """λ_i, zero past the last row."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def column(self, j: int) -> int:
        """λ′_j, zero past the last column."""
        return sum(1 for p in self.parts if p >= j) if j >= 1 else 0

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(self.column(j) for j in range(1, self.parts[0] + 1)))

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def __contains__(self, cell: tuple[int, int]) -> bool:
        i, j = cell
        return 1 <= i <= len(self.parts) and 1 <= j <= self.parts[i - 1]

    def to_json(self) -> list[int]:
        return list(self.parts)

    @classmethod
    def from_json(cls, data: list[int]) -> "Partition":
        return cls(tuple(data))


EMPTY = Partition()


def cell_stats(lam: Partition, i: int, j: int) -> tuple[int, int, int]:
    """(arm, leg, hook) of the cell (i, j)."""
    if (i, j) not in lam:
        raise CellOutOfDiagram(f"cell ({i}, {j}) is not in {lam!r}")
    arm = lam.row(i) - j
    leg = lam.column(j) - i
    return arm, leg, arm + leg + 1


def hook(lam: Partition, i: int, j: int) -> int:
    return cell_stats(lam, i, j)[2]


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of n in reverse-lexicographic order: (n), (n-1, 1), ..."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return [Partition(p) for p in _partitions(n, n)]


def partitions_up_to(n: int) -> Iterator[Partition]:
    for k in range(n + 1):
        yield from enumerate_partitions(k)


def partition_pairs(total: int) -> Iterator[tuple[Partition, Partition]]:
    """Pairs (λ, μ) with |λ| + |μ| = total."""
    for k in range(total + 1):
        for lam in enumerate_partitions(k):
            for mu in enumerate_partitions(total - k):
                yield lam, mu
