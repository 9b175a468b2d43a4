"""Regular vertex operators between Verma modules.

``Φ(z)|Δ_1⟩ = z^α Σ_k v_k z^k`` with ``v_k`` at level k of M_{Δ_3} and
``α = Δ_3 - Δ_2 - Δ_1``. The defining commutator
``[L_n, Φ(z)] = z^n (z∂_z + (n+1)Δ_2) Φ(z)`` gives, for n >= 1,

    L_n v_k = (Δ_3 + nΔ_2 - Δ_1 + k - n) v_{k-n}

and these determine v_k through the Gram matrix of level k.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from combinatorics import enumerate_partitions
from errors import InsufficientOrder, MismatchAtOrder
from linalg import solve_square
from scalars import RATIONAL, PrefactoredSeries, ScalarField, scalar_to_json
from virasoro import (
    ModuleKind,
    ModuleVector,
    act,
    pair,
    shapovalov,
    verma,
    verma_word,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VOData:
    """A solved (ir)regular vertex operator.

    For kets ``Φ(z)|source⟩ = z^alpha exp(Σ β_i z^{-i}) Σ v_m z^m`` with
    ``v_m`` in ``target``. For duals (``dual=True``) the operator is
    ``⟨source|Φ(z) = z^alpha exp(Σ β_i z^i) Σ ⟨w_m| z^{-m}`` with mirrored
    ``w_m`` in the dual ``target``.
    """

    source: ModuleKind
    target: ModuleKind
    delta: Any
    alpha: Any
    betas: tuple = ()
    coeffs: tuple = ()
    dual: bool = False
    field: ScalarField = field(default=RATIONAL, compare=False)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def rank(self) -> int:
        return self.source.rank

    def series(self) -> PrefactoredSeries:
        """The expansion as a PrefactoredSeries, in z for kets and in x = 1/z for duals."""
        alpha = -self.alpha if self.dual else self.alpha
        return PrefactoredSeries(alpha, self.betas, self.coeffs, self.field)

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "dual": self.dual,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "delta": enc(self.delta),
            "alpha": enc(self.alpha),
            "betas": [enc(b) for b in self.betas],
            "coeffs": [v.to_json() for v in self.coeffs],
        }


def relation_coeff(d1, d2, d3, n: int, k: int, f: ScalarField):
    """Δ_3 + nΔ_2 - Δ_1 + k - n."""
    return d3 + n * d2 - d1 + f(k - n)


def _level_rhs(mu, k: int, d1, d2, d3, f: ScalarField):
    # <Δ_3| ... L_{μ_2} L_{μ_1} v_k>, largest part acting first
    acc = f.one
    level = k
    for part in mu.parts:
        acc = acc * relation_coeff(d1, d2, d3, part, level, f)
        level -= part
    return acc


def regular_vo_coeffs(d1, d2, d3, c, N: int, f: ScalarField = RATIONAL, threads: int = 1) -> VOData:
    """Solve the regular vertex operator M_{Δ_1} -> M_{Δ_3} of weight Δ_2 to order N."""
    d1, d2, d3, c = f(d1), f(d2), f(d3), f(c)
    target = verma(d3, c, f)
    coeffs = [ModuleVector.cyclic(target)]
    for k in range(1, N + 1):
        parts = enumerate_partitions(k)
        gram = shapovalov(d3, c, k, f, threads=threads)
        rhs = [_level_rhs(mu, k, d1, d2, d3, f) for mu in parts]
        x = solve_square(gram, rhs, f.domain, level=k)
        coeffs.append(ModuleVector(target, {verma_word(p): a for p, a in zip(parts, x)}))
        logger.debug("regular VO: level %d solved (%d unknowns)", k, len(parts))
    return VOData(verma(d1, c, f), target, d2, d3 - d2 - d1, (), tuple(coeffs), False, f)


def dual_regular_vo_coeffs(d_out, d2, d_in, c, N: int, f: ScalarField = RATIONAL, threads: int = 1) -> VOData:
    """⟨Δ_out|Φ(z) on M_{Δ_in}: exponent Δ_out - Δ_2 - Δ_in, coefficients in powers of 1/z.

    The mirrored coefficients solve the ket relations with Δ_1 = Δ_out, Δ_3 = Δ_in.
    """
    ket = regular_vo_coeffs(d_out, d2, d_in, c, N, f, threads)
    target = ket.target.mirrored()
    coeffs = tuple(ModuleVector(target, v.terms) for v in ket.coeffs)
    alpha = f(d_out) - f(d2) - f(d_in)
    return VOData(ket.source.mirrored(), target, ket.delta, alpha, (), coeffs, True, f)


def check_regular_relations(vo: VOData) -> None:
    """Re-check L_n v_k = (Δ_3 + nΔ_2 - Δ_1 + k - n) v_{k-n} and L_0 v_k = (Δ_3 + k) v_k."""
    f = vo.field
    d1, d2, d3 = vo.source.delta, vo.delta, vo.target.delta
    for k, v in enumerate(vo.coeffs):
        lhs = act(0, v)
        diff = lhs - v.scale(d3 + f(k))
        if not diff.vanishes(lhs):
            raise MismatchAtOrder(k, diff.to_json())
        for n in range(1, k + 1):
            lhs = act(n, v)
            diff = lhs - vo.coeffs[k - n].scale(relation_coeff(d1, d2, d3, n, k, f))
            if not diff.vanishes(lhs):
                raise MismatchAtOrder(k, diff.to_json())


def vo_on_descendant(vo: VOData, word: Sequence[int], order: Optional[int] = None) -> PrefactoredSeries:
    """Φ(z) L_{word} |Δ_1⟩ as a series of target-module vectors.

    Each L_{-n} is moved through Φ with
    ``Φ L_{-n} S = L_{-n} Φ S - z^{-n}(z∂_z + (1-n)Δ_2) Φ S``; the exponent drops
    by n and every coefficient order is kept.
    """
    if vo.dual or vo.rank:
        raise TypeError("vo_on_descendant works on regular ket operators")
    order = vo.order if order is None else order
    if order > vo.order:
        raise InsufficientOrder(f"order {order} requested, operator solved to {vo.order}")
    f = vo.field
    exponent = vo.alpha
    coeffs = list(vo.coeffs[: order + 1])
    for idx in reversed(tuple(word)):
        n = -idx
        if n < 1:
            raise ValueError(f"descendant words use L_{{-n}} with n >= 1, got L_{idx}")
        out = []
        for j in range(order + 1):
            d = coeffs[j].scale(-(exponent + f(j) + (1 - n) * vo.delta))
            if j >= n:
                d = d + act(-n, coeffs[j - n])
            out.append(d)
        coeffs = out
        exponent = exponent - n
    return PrefactoredSeries(exponent, (), tuple(coeffs), f)


def matrix_element(dual_vector: ModuleVector, series: PrefactoredSeries) -> PrefactoredSeries:
    """Pair a dual vector against every coefficient of a vector-valued series."""
    f = series.field
    return PrefactoredSeries(
        series.alpha, series.betas, tuple(pair(dual_vector, v) for v in series.coeffs), f
    )
