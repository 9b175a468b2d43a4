"""Ratios C(·, β+n)/C(·, β) of Barnes-G structure constants.

Barnes G itself is never evaluated: G(z + 1) = Γ(z) G(z) telescopes every
ratio into a finite product of Gamma values,

    G(a + n)/G(a) = Γ(a) Γ(a+1) ... Γ(a+n-1)          (n >= 0)
    G(a - m)/G(a) = 1 / (Γ(a-1) Γ(a-2) ... Γ(a-m))    (m > 0)
"""

import logging
from typing import Any, Mapping

import mpmath

from config import DEFAULT_DIGITS
from errors import GammaPole
from scalars import RATIONAL, as_mp

logger = logging.getLogger(__name__)


def _gamma(z):
    if mpmath.isint(z) and mpmath.re(z) <= 0:
        raise GammaPole(mpmath.nstr(z, 15))
    return mpmath.gamma(z)


def g_ratio(a, n: int):
    """G(a + n) / G(a)."""
    acc = mpmath.mpf(1)
    if n >= 0:
        for k in range(n):
            acc *= _gamma(a + k)
    else:
        for k in range(1, -n + 1):
            acc /= _gamma(a - k)
    return acc


def _mp(params: Mapping[str, Any], key: str):
    return as_mp(params[key], RATIONAL)


def _vi_factors(t_a, t_b, t_0, t_inf, sigma):
    """(argument, σ-direction) of every G in C_VI, numerator first.

    C_VI = Π_{ε,ε'=±} G(1 + θ_a + εθ_0 + ε'σ) G(1 + θ_b + εθ_∞ + ε'σ) / Π_{ε=±} G(1 + 2εσ)
    """
    num = []
    for e in (1, -1):
        for e2 in (1, -1):
            num.append((1 + t_a + e * t_0 + e2 * sigma, e2))
            num.append((1 + t_b + e * t_inf + e2 * sigma, e2))
    den = [(1 + 2 * sigma, 2), (1 - 2 * sigma, -2)]
    return num, den


def structure_constant_ratio(kind: str, params: Mapping[str, Any], n: int, digits: int = DEFAULT_DIGITS):
    """C(·, β+n)/C(·, β) for the τ-series kinds.

    VI_at_0 shifts σ in the c = 1 constant with θ_t paired to θ_0 and θ_1 to
    θ_∞; VI_at_infty swaps θ_t and θ_1. V uses G(1 ± θ_0 + θ - β) G(1 + θ_t ± β),
    IV uses G(1 + θ_* - β) G(1 + θ_t ± β). Raises GammaPole when the telescoped
    product meets a pole.
    """
    with mpmath.workdps(digits + 10):
        match kind:
            case "VI_at_0" | "VI_at_infty":
                t0, tt, t1, tinf = (_mp(params, k) for k in ("theta_0", "theta_t", "theta_1", "theta_inf"))
                sigma = _mp(params, "sigma")
                if kind == "VI_at_infty":
                    tt, t1 = t1, tt
                num, den = _vi_factors(tt, t1, t0, tinf, sigma)
            case "V_at_infty":
                theta, tt, t0 = (_mp(params, k) for k in ("theta", "theta_t", "theta_0"))
                beta = _mp(params, "beta")
                num = [
                    (1 + t0 + theta - beta, -1),
                    (1 - t0 + theta - beta, -1),
                    (1 + tt + beta, 1),
                    (1 + tt - beta, -1),
                ]
                den = []
            case "IV_at_infty":
                ts, tt = _mp(params, "theta_star"), _mp(params, "theta_t")
                beta = _mp(params, "beta")
                num = [(1 + ts - beta, -1), (1 + tt + beta, 1), (1 + tt - beta, -1)]
                den = []
            case _:
                raise ValueError(f"unknown τ kind {kind!r}")
        acc = mpmath.mpf(1)
        for a, step in num:
            acc *= g_ratio(a, step * n)
        for a, step in den:
            acc /= g_ratio(a, step * n)
        return +acc
