"""Irregular conformal blocks that enter the τ-series at s = ∞, plus two identities they rest on.

Every block is a ``PrefactoredSeries``; the exponent and the exponential
charges are whatever the vertex-operator solver produced.

* ``V_at_infty``:  <(ηθ, η²/4)| Φ^{θ_t²}(s) |θ_0²>, in x = 1/s
* ``IV_at_infty``: <(θ_*, 0, 1/4)| Φ^{θ_t²}(s) |0>, in x = 1/s
* ``three_point_rank1``: <Δ_5| Φ^{Δ}(t) |Λ> with Λ from charges (c_0, c_1), in t
* ``two_point_prelimit``: <0| Φ^{Δ_5}_{0,Δ_5}(z) |Λ'> in x = 1/z
"""

import logging
from typing import Any, Mapping

from errors import IncompatibleKinds, SingularPairing
from heisenberg import Lambda_of_lambdas
from scalars import RATIONAL, PrefactoredSeries, ScalarField
from vertexops.irregular import dual_irregular_vo_coeffs, irregular_vo_coeffs
from vertexops.regular import dual_regular_vo_coeffs
from virasoro import ModuleVector, irregular, pair, vacuum, verma

logger = logging.getLogger(__name__)

BLOCK_KINDS = ("V_at_infty", "IV_at_infty", "three_point_rank1", "two_point_prelimit")

C_ONE = 1


def _pair_all(dual_coeffs, ket: ModuleVector) -> tuple:
    try:
        return tuple(pair(w, ket) for w in dual_coeffs)
    except IncompatibleKinds as err:
        raise SingularPairing(str(err))


def _v_block(p: Mapping[str, Any], n: int, N: int, f: ScalarField) -> PrefactoredSeries:
    eta, theta, b = p["eta"], p["theta"], p["beta"] + f(n)
    weights = (eta * theta, eta * eta / f(4))
    vo = dual_irregular_vo_coeffs(1, weights, eta * b, p["theta_t"] ** 2, C_ONE, N, f)
    ket = ModuleVector.cyclic(verma(p["theta_0"] ** 2, C_ONE, f))
    s = vo.series()
    return PrefactoredSeries(s.alpha, s.betas, _pair_all(vo.coeffs, ket), f)


def _iv_block(p: Mapping[str, Any], n: int, N: int, f: ScalarField) -> PrefactoredSeries:
    b = p["beta"] + f(n)
    weights = (p["theta_star"], f.zero, f.one / f(4))
    vo = dual_irregular_vo_coeffs(2, weights, b / f(2), p["theta_t"] ** 2, C_ONE, N, f)
    # L_{-1}, L_0, L_1 kill the vacuum: only the empty word of each w_m survives
    ket = ModuleVector.cyclic(vacuum(C_ONE, f))
    s = vo.series()
    return PrefactoredSeries(s.alpha, s.betas, _pair_all(vo.coeffs, ket), f)


def _three_point(p: Mapping[str, Any], N: int, f: ScalarField) -> PrefactoredSeries:
    c0, c1 = (f(x) for x in p["c"])
    rho, beta = p.get("rho", f.zero), p["beta"]
    c = f.one - 12 * rho * rho
    Lambda = Lambda_of_lambdas((c0, c1), rho, f)
    vo = irregular_vo_coeffs(1, Lambda, -c1 * beta, p["delta"], c, N, f)
    bra = ModuleVector.cyclic(verma(p["delta_5"], c, f, dual=True))
    coeffs = tuple(pair(bra, v) for v in vo.coeffs)
    return PrefactoredSeries(vo.alpha, vo.betas, coeffs, f)


def _two_point(p: Mapping[str, Any], N: int, f: ScalarField) -> PrefactoredSeries:
    d5 = p["delta_5"]
    rho = p.get("rho", f.zero)
    c = f.one - 12 * rho * rho
    vo = dual_regular_vo_coeffs(f.zero, d5, d5, c, N, f)
    weights = (p["Lambda_1"], p.get("Lambda_2", f.one))
    ket = ModuleVector.cyclic(irregular(1, weights, c, f))
    s = vo.series()
    return PrefactoredSeries(s.alpha, (), _pair_all(vo.coeffs, ket), f)


def irregular_block_series(
    kind: str, params: Mapping[str, Any], n: int, N: int, f: ScalarField = RATIONAL
) -> PrefactoredSeries:
    """The block of ``kind`` to order N; ``n`` shifts β by an integer (Fourier mode)."""
    p = {k: (v if k == "c" else f(v)) for k, v in params.items() if k not in ("kind", "n", "order")}
    match kind:
        case "V_at_infty":
            out = _v_block(p, n, N, f)
        case "IV_at_infty":
            out = _iv_block(p, n, N, f)
        case "three_point_rank1":
            out = _three_point(p, N, f)
        case "two_point_prelimit":
            out = _two_point(p, N, f)
        case _:
            raise ValueError(f"unknown block kind {kind!r}")
    if not out.normalized:
        raise SingularPairing(f"{kind}: leading coefficient {out.coeffs[0]} is not 1")
    logger.debug("%s block, mode %d: %d orders", kind, n, N + 1)
    return out


def two_point_closed_form(delta_5, Lambda_1, N: int, f: ScalarField = RATIONAL) -> PrefactoredSeries:
    """z^{-2Δ_5} e^{Λ'_1/z} in x = 1/z."""
    coeffs = [f.one]
    for k in range(1, N + 1):
        coeffs.append(coeffs[-1] * f(Lambda_1) / f(k))
    return PrefactoredSeries(2 * f(delta_5), (), tuple(coeffs), f)
