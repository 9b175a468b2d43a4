"""Rearranged expansion of a composition of two vertex operators.

    Φ_z(z) Φ_w(w) |src⟩ = (prefactors) (1 - w/z)^A Σ_k R_k w^k

Two routes produce the R_k:

* a regular outer operator (``VOData``): Φ_z is pushed through each inner
  coefficient with ``vo_on_descendant`` and R_k comes out as a series in z;
* an exponential outer operator ``:e^{λ_z φ(z)}:`` at a point of the field
  (``ExpOperator``): the inner coefficients are mapped to Fock space and the
  R_k are Fock vectors at that point.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

from errors import InsufficientOrder, MismatchAtOrder
from heisenberg import FockConfig, FockVector, exp_vo_at_point, module_to_fock
from parallel import ordered_map
from scalars import RATIONAL, PrefactoredSeries, ScalarField, scalar_to_json
from vertexops.regular import VOData, vo_on_descendant
from virasoro import ModuleVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpOperator:
    """:e^{λ_z φ(z)}: evaluated at ``point``, Fock words kept up to ``level_cap``."""

    lam_z: Any
    point: Any
    level_cap: int


@dataclass(frozen=True)
class RearrangedExpansion:
    alpha_z: Any
    alpha_w: Any
    betas_z: tuple
    betas_w: tuple
    A: Any
    # series in z (regular route) or FockVectors at the point (exponential route)
    coeffs: tuple
    direct: tuple = ()
    point: Any = None
    field: ScalarField = field(default=RATIONAL, compare=False)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "alpha_z": enc(self.alpha_z),
            "alpha_w": enc(self.alpha_w),
            "betas_z": [enc(b) for b in self.betas_z],
            "betas_w": [enc(b) for b in self.betas_w],
            "A": enc(self.A),
            "coeffs": [c.to_json() for c in self.coeffs],
        }


def rising(A, p: int, f: ScalarField):
    """(A)_p / p!."""
    acc = f.one
    for i in range(p):
        acc = acc * (A + f(i)) / f(i + 1)
    return acc


def binomial(A, p: int, f: ScalarField):
    """C(A, p)."""
    acc = f.one
    for i in range(p):
        acc = acc * (A - f(i)) / f(i + 1)
    return acc


def _combine(weights: Sequence[Any], vectors: Sequence[Any]):
    out = None
    for s, v in zip(weights, vectors):
        term = v.scale(s)
        out = term if out is None else out + term
    return out


def _descendant_series(outer: VOData, u: ModuleVector, order: int) -> list:
    """Coefficients (in j) of z^{m - α_z} Φ_z(z) u for an inner coefficient u at level m."""
    total = None
    for word, a in u.terms.items():
        s = vo_on_descendant(outer, word, order)
        coeffs = [c.scale(a) for c in s.coeffs]
        total = coeffs if total is None else [x + y for x, y in zip(total, coeffs)]
    if total is None:
        zero = ModuleVector.zero(outer.target)
        total = [zero] * (order + 1)
    return total


def compose_rearranged(
    outer: Union[VOData, ExpOperator],
    inner: VOData,
    A,
    K: int,
    cfg: Optional[FockConfig] = None,
    inner_charges: Optional[Sequence] = None,
    threads: int = 1,
    verify: bool = True,
) -> RearrangedExpansion:
    """R_0..R_K of the composition, optionally re-expanded against the direct product."""
    f = inner.field
    A = f(A)
    if K > inner.order:
        raise InsufficientOrder(f"inner operator solved to {inner.order}, K = {K} requested")
    if isinstance(outer, ExpOperator):
        if cfg is None or inner_charges is None:
            raise ValueError("the exponential route needs a FockConfig and the inner charges")
        z = f(outer.point)

        def direct_at(m: int) -> FockVector:
            u = module_to_fock(inner.coeffs[m], inner_charges, cfg)
            return exp_vo_at_point(outer.lam_z, u, z, outer.level_cap)

        direct = ordered_map(direct_at, range(K + 1), threads)
        coeffs = []
        for k in range(K + 1):
            weights = [rising(A, p, f) / z**p for p in range(k + 1)]
            coeffs.append(_combine(weights, [direct[k - p] for p in range(k + 1)]))
        charges = [f(x) for x in inner_charges]
        lam_z = f(outer.lam_z)
        alpha_z = lam_z * charges[0]
        betas_z = tuple(-charges[k] * lam_z / f(k) for k in range(1, len(charges)))
    else:
        J = outer.order
        direct = ordered_map(lambda m: _descendant_series(outer, inner.coeffs[m], J), range(K + 1), threads)
        coeffs = []
        for k in range(K + 1):
            weights = [rising(A, p, f) for p in range(k + 1)]
            cols = [_combine(weights, [direct[k - p][j] for p in range(k + 1)]) for j in range(J + 1)]
            coeffs.append(PrefactoredSeries(f(-k), (), tuple(cols), f))
        alpha_z, betas_z, z = outer.alpha, outer.betas, None
    expansion = RearrangedExpansion(
        alpha_z, inner.alpha, tuple(betas_z), inner.betas, A, tuple(coeffs), tuple(direct), z, f
    )
    if verify:
        check_reexpansion(expansion)
    logger.debug("rearranged expansion: %d orders", K + 1)
    return expansion


def reexpand(expansion: RearrangedExpansion) -> list:
    """Multiply (1 - w/z)^A back into Σ R_k w^k; entry m is the w^m coefficient."""
    f = expansion.field
    A = expansion.A
    out = []
    for m in range(expansion.order + 1):
        weights = [(-1) ** p * binomial(A, p, f) for p in range(m + 1)]
        if expansion.point is not None:
            z = expansion.point
            weights = [w / z**p for p, w in enumerate(weights)]
            out.append(_combine(weights, [expansion.coeffs[m - p] for p in range(m + 1)]))
        else:
            J = expansion.coeffs[0].order
            out.append(
                [
                    _combine(weights, [expansion.coeffs[m - p].coeffs[j] for p in range(m + 1)])
                    for j in range(J + 1)
                ]
            )
    return out


def check_reexpansion(expansion: RearrangedExpansion) -> None:
    for m, (got, want) in enumerate(zip(reexpand(expansion), expansion.direct)):
        if isinstance(got, list):
            for g, w in zip(got, want):
                if g != w:
                    raise MismatchAtOrder(m, (g - w).to_json())
        elif got != want:
            raise MismatchAtOrder(m, (got - want).to_json())
