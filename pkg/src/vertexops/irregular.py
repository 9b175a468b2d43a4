"""Irregular vertex operators between rank-r irregular modules.

``Φ(z)|Λ⟩ = z^α exp(Σ_{i<=r} β_i z^{-i}) Σ_m v_m z^m`` with v_m in M_{Λ'},
``Λ'_r = Λ_r - rβ_r`` and ``Λ'_n = Λ_n`` otherwise. For every n >= r:

    L_n v_m = Λ_n [r <= n <= 2r] v_m - Σ_i iβ_i v_{m+i-n} + (α + (n+1)Δ + m - n) v_{m-n}

v_m is expanded over canonical words of depth Σ(r - n_i) <= m (+ a bonus when
that is not enough), and solved in a sliding window: the unknowns
v_m .. v_{m+extra} against the relations for r <= n <= 2r at the same orders
(these generate every n >= r, since [L_{n-r}, L_r] = (n - 2r) L_n),
keeping v_m once no solution of the window can move it.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

from errors import MismatchAtOrder, UnresolvedOrder, ZeroTopWeight
from heisenberg import delta_of_lambda
from linalg import solve_affine
from scalars import RATIONAL, ScalarField
from vertexops.regular import VOData
from virasoro import ModuleKind, ModuleVector, act, irregular

logger = logging.getLogger(__name__)

# (depth bonus, extra orders) tried in turn
ATTEMPTS = ((0, 1), (1, 2))


def alpha_beta_from_charges(r: int, lams: Sequence, beta_r, delta, rho, f: ScalarField = RATIONAL):
    """α and β_1..β_r for a source whose weights come from free-field charges λ_0..λ_r.

    With x = rβ_r/λ_r: β_k = rλ_kβ_r/(kλ_r) and
    α = ((r+1)/2)(x² + 2ρx) - (r+1)Δ - λ_0 x.
    """
    lams = [f(x) for x in lams]
    beta_r, delta, rho = f(beta_r), f(delta), f(rho)
    if f.is_zero(lams[r]):
        raise ZeroTopWeight(f"top charge λ_{r} vanishes")
    x = r * beta_r / lams[r]
    betas = tuple(r * lams[k] * beta_r / (k * lams[r]) for k in range(1, r + 1))
    alpha = f(Fraction(r + 1, 2)) * (x * x + 2 * rho * x) - (r + 1) * delta - lams[0] * x
    return alpha, betas


def alpha_beta_closed_form(r: int, lams: Sequence, lam_z, beta_r, rho, f: ScalarField = RATIONAL):
    """(α, (β_1, ..., β_r)) of an operator of weight Δ(λ_z) on the charges λ_0..λ_r."""
    return alpha_beta_from_charges(r, lams, beta_r, delta_of_lambda(lam_z, rho, f), rho, f)


def alpha_beta_from_weights(r: int, Lambda: Sequence, beta_r, delta, f: ScalarField = RATIONAL):
    """Closed forms in terms of the weights Λ_r..Λ_2r for ranks one and two."""
    L = [f(x) for x in Lambda]
    beta_r, delta = f(beta_r), f(delta)
    match r:
        case 1:
            L1, L2 = L
            alpha = -beta_r * (L1 - beta_r) / (2 * L2) - 2 * delta
            return alpha, (beta_r,)
        case 2:
            L2, L3, L4 = L
            beta_1 = beta_r * L3 / L4
            alpha = beta_r * (L3 * L3 - 4 * L4 * (L2 - 3 * beta_r)) / (4 * L4 * L4) - 3 * delta
            return alpha, (beta_1, beta_r)
        case _:
            raise ValueError(f"rank {r} needs the free-field charges λ_0..λ_r")


def target_weights(r: int, Lambda: Sequence, beta_r, f: ScalarField) -> tuple:
    L = [f(x) for x in Lambda]
    return (L[0] - r * f(beta_r),) + tuple(L[1:])


def relation_residual(
    n: int, m: int, source: ModuleKind, coeffs: Sequence[ModuleVector], alpha, betas, delta
) -> ModuleVector:
    """LHS minus RHS of the order-m relation for L_n (n >= r)."""
    f = source.field
    r = source.rank
    v = coeffs[m]
    out = act(n, v)
    if n <= 2 * r:
        out = out - v.scale(source.weights[n - r])
    for i, b in enumerate(betas, start=1):
        j = m + i - n
        if 0 <= j < len(coeffs):
            out = out + coeffs[j].scale(i * b)
    if m - n >= 0:
        out = out - coeffs[m - n].scale(alpha + (n + 1) * delta + f(m - n))
    return out


class _Window:
    """Linear system for v_m .. v_{m+extra} with v_{<m} fixed."""

    def __init__(self, source, target, alpha, betas, delta, fixed, m, bonus, extra):
        self.f = source.field
        self.source, self.target = source, target
        self.alpha, self.betas, self.delta = alpha, betas, delta
        self.fixed = fixed
        self.m, self.extra = m, extra
        self.orders = list(range(m, m + extra + 1))
        self.unknowns = [
            (j, w) for j in self.orders for d in range(j + bonus + 1) for w in target.words_of_depth(d)
        ]
        self.index = {u: i for i, u in enumerate(self.unknowns)}

    def _terms(self, n: int, mp: int):
        """(order j, scalar, apply L_n?) pieces of the relation at (n, mp)."""
        f, r = self.f, self.source.rank
        yield mp, f.one, True
        if n <= 2 * r:
            yield mp, -self.source.weights[n - r], False
        for i, b in enumerate(self.betas, start=1):
            if mp + i - n >= 0:
                yield mp + i - n, i * b, False
        if mp - n >= 0:
            yield mp - n, -(self.alpha + (n + 1) * self.delta + f(mp - n)), False

    def solve(self):
        f = self.f
        r = self.source.rank
        columns: dict = {}  # (n, mp, word) -> {unknown index: coef}
        constants: dict = {}
        for n in range(r, 2 * r + 1):
            for mp in self.orders:
                for j, s, with_L in self._terms(n, mp):
                    if j < self.m:
                        vec = self.fixed[j]
                        if with_L:
                            vec = act(n, vec)
                        for w, a in vec.terms.items():
                            key = (n, mp, w)
                            constants[key] = constants.get(key, f.zero) + s * a
                        continue
                    for (jj, word) in self.unknowns:
                        if jj != j:
                            continue
                        basis = ModuleVector.basis(self.target, word)
                        vec = act(n, basis) if with_L else basis
                        col = self.index[(jj, word)]
                        for w, a in vec.terms.items():
                            row = columns.setdefault((n, mp, w), {})
                            row[col] = row.get(col, f.zero) + s * a
        keys = sorted(set(columns) | set(constants), key=repr)
        rows = [[columns.get(k, {}).get(i, f.zero) for i in range(len(self.unknowns))] for k in keys]
        rhs = [-constants.get(k, f.zero) for k in keys]
        return solve_affine(rows, rhs, len(self.unknowns), f.domain)

    def current(self, solution) -> Optional[ModuleVector]:
        cols = [i for i, (j, _) in enumerate(self.unknowns) if j == self.m]
        if not all(solution.determined(i) for i in cols):
            return None
        return ModuleVector(self.target, {self.unknowns[i][1]: solution.particular[i] for i in cols})


def _solve_coeffs(source, target, alpha, betas, delta, N: int) -> list[ModuleVector]:
    coeffs = [ModuleVector.cyclic(target)]
    for m in range(1, N + 1):
        reason = "inconsistent"
        for attempt, (bonus, extra) in enumerate(ATTEMPTS):
            if attempt:
                logger.warning("order %d: %s with cutoff, retrying with depth bonus %d", m, reason, bonus)
            window = _Window(source, target, alpha, betas, delta, coeffs, m, bonus, extra)
            solution = window.solve()
            if not solution.consistent:
                reason = "inconsistent"
                continue
            v = window.current(solution)
            if v is None:
                reason = "undetermined"
                continue
            coeffs.append(v)
            logger.debug("irregular VO: order %d solved (%d unknowns)", m, len(window.unknowns))
            break
        else:
            raise UnresolvedOrder(m, f"coefficients {reason} after raising the cutoff")
    return coeffs


def check_irregular_relations(vo: VOData, alpha=None) -> None:
    """Re-check the relation for r <= n <= 2r + depth at every solved order."""
    source = vo.source.mirrored() if vo.dual else vo.source
    alpha = ket_alpha(vo) if alpha is None else alpha
    r = source.rank
    top = 2 * r + max(v.max_depth for v in vo.coeffs)
    coeffs = [ModuleVector(vo.target.mirrored(), v.terms) if vo.dual else v for v in vo.coeffs]
    for m in range(len(coeffs)):
        for n in range(r, top + 1):
            res = relation_residual(n, m, source, coeffs, alpha, vo.betas, vo.delta)
            if not res.vanishes(coeffs[m]):
                raise MismatchAtOrder(m, res.to_json())


def ket_alpha(vo: VOData):
    """Exponent of the ket-form series behind a solved operator."""
    if vo.dual:
        return -vo.alpha - 2 * vo.delta
    return vo.alpha


def irregular_vo_coeffs(
    r: int,
    Lambda: Sequence,
    beta_r,
    delta,
    c,
    N: int,
    f: ScalarField = RATIONAL,
    lams: Optional[Sequence] = None,
    rho=None,
) -> VOData:
    """Solve the rank-r irregular vertex operator on M_Λ to order N.

    Ranks one and two use the closed forms in Λ; higher ranks need the
    free-field charges ``lams`` and background charge ``rho``.
    """
    if r < 1:
        raise ValueError("irregular operators have rank >= 1")
    Lambda = tuple(f(x) for x in Lambda)
    if f.is_zero(Lambda[-1]):
        raise ZeroTopWeight(f"Λ_{2 * r} vanishes")
    delta, c, beta_r = f(delta), f(c), f(beta_r)
    if lams is not None:
        alpha, betas = alpha_beta_from_charges(r, lams, beta_r, delta, rho, f)
    else:
        alpha, betas = alpha_beta_from_weights(r, Lambda, beta_r, delta, f)
    source = irregular(r, Lambda, c, f)
    target = irregular(r, target_weights(r, Lambda, beta_r, f), c, f)
    coeffs = _solve_coeffs(source, target, alpha, betas, delta, N)
    vo = VOData(source, target, delta, alpha, betas, tuple(coeffs), False, f)
    check_irregular_relations(vo)
    return vo


def dual_irregular_vo_coeffs(
    r: int,
    dual_weights: Sequence,
    beta_r,
    delta,
    c,
    N: int,
    f: ScalarField = RATIONAL,
    lams: Optional[Sequence] = None,
    rho=None,
) -> VOData:
    """⟨Λ|Φ(z) = z^{α*} exp(Σ β_i z^i) Σ ⟨w_m| z^{-m} for a dual irregular ⟨Λ|.

    ``dual_weights`` are the values of ⟨Λ|L_{-n}, n = r..2r. The mirrored
    coefficients equal x^{2Δ} times the ket solution in x = 1/z for the same
    weights, so α* = -α_ket - 2Δ.
    """
    ket = irregular_vo_coeffs(r, dual_weights, beta_r, delta, c, N, f, lams, rho)
    target = ket.target.mirrored()
    coeffs = tuple(ModuleVector(target, v.terms) for v in ket.coeffs)
    alpha = -ket.alpha - 2 * ket.delta
    return VOData(ket.source.mirrored(), target, ket.delta, alpha, ket.betas, coeffs, True, f)
