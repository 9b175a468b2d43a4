"""Exact linear solves over the coefficient fields (sympy ``DomainMatrix``)."""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from sympy.polys.matrices import DomainMatrix

from errors import SingularModule

logger = logging.getLogger(__name__)


def matrix(rows: Sequence[Sequence[Any]], K) -> DomainMatrix:
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), K)


def det(rows: Sequence[Sequence[Any]], K):
    if not rows:
        return K.one
    return matrix(rows, K).det()


@dataclass
class AffineSolution:
    """Solution set ``particular + span(null_basis)`` of ``A x = b``."""

    consistent: bool
    particular: Optional[list]
    pivots: tuple[int, ...]
    free: tuple[int, ...]
    null_basis: list[list]

    def determined(self, j: int) -> bool:
        """True when the unknown ``j`` takes the same value on every solution."""
        return not any(v[j] for v in self.null_basis)


def solve_affine(rows: Sequence[Sequence[Any]], rhs: Sequence[Any], nvars: int, K) -> AffineSolution:
    if not rows:
        return AffineSolution(True, [K.zero] * nvars, (), tuple(range(nvars)), _unit_basis(nvars, K))
    aug = matrix([list(r) + [b] for r, b in zip(rows, rhs)], K)
    reduced, pivots = aug.rref()
    R = reduced.to_list()
    if nvars in pivots:
        return AffineSolution(False, None, tuple(pivots), (), [])
    pivots = tuple(pivots)
    free = tuple(j for j in range(nvars) if j not in pivots)
    x = [K.zero] * nvars
    for i, p in enumerate(pivots):
        x[p] = R[i][nvars]
    basis = []
    for f in free:
        v = [K.zero] * nvars
        v[f] = K.one
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    logger.debug("affine solve: %d equations, %d unknowns, rank %d", len(R), nvars, len(pivots))
    return AffineSolution(True, x, pivots, free, basis)


def _unit_basis(n: int, K) -> list[list]:
    return [[K.one if i == j else K.zero for i in range(n)] for j in range(n)]


def solve_square(rows: Sequence[Sequence[Any]], rhs: Sequence[Any], K, level: Optional[int] = None) -> list:
    """Unique solution of a square system; SingularModule when det = 0."""
    n = len(rows)
    if n == 0:
        return []
    sol = solve_affine(rows, rhs, n, K)
    if not sol.consistent or sol.free:
        raise SingularModule("Gram matrix is singular", level)
    return sol.particular
