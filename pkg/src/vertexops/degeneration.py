"""Exact ε-checks of the confluence limits rank r -> rank r+1.

The outer operator is ``:e^{λ_z φ(z)}:`` at ``z = ε``; the inner one is the
rank-r operator of weight Δ_w on the Fock module with charges λ_0..λ_r. With

    λ_z = Σ_{j=1}^{r+1} c_j/ε^j + c_0/2
    λ_j = -Σ_{i=j+1}^{r+1} c_i ε^{j-i} + (c_0/2) δ_{j,0}
    A   = Σ_{j=1}^{r+1} c_j β/ε^j + β(c_0 - 2ρ + β)/2 - Δ_w

every coefficient R_k of the rearranged expansion must have a finite ε -> 0
limit equal to the Fock image of the rank-(r+1) operator's v_k on the charges
(c_0 + β, c_1, ..., c_{r+1}).

Both sides are compared as Fock vectors truncated at ``level_cap``: R_k is
rebased onto the limit charges, and the target v_k is mapped through
``module_to_fock`` before the same truncation. A match is therefore equality
of the images below that level, not of the Virasoro-module vectors.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from config import DEFAULT_K
from errors import MismatchAtOrder, NegativeValuation
from heisenberg import FockConfig, Lambda_of_lambdas, delta_of_lambda, module_to_fock, rebase
from parallel import ordered_map
from scalars import EPS_FIELD, RATIONAL, eps_limit, scalar_to_json
from vertexops.irregular import irregular_vo_coeffs
from vertexops.rearranged import ExpOperator, compose_rearranged
from vertexops.regular import regular_vo_coeffs

logger = logging.getLogger(__name__)

SCHEME_RANK = {"rank0to1": 0, "rank1to2": 1, "rank2to3": 2}


@dataclass
class DegenerationSpec:
    scheme: str
    c: Sequence[Any]
    beta: Any
    delta_w: Any
    rho: Any
    K: Optional[int] = None
    level_cap: Optional[int] = None
    A_shift: Any = 0

    def __post_init__(self):
        if self.scheme not in SCHEME_RANK:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if len(self.c) != self.rank + 2:
            raise ValueError(f"{self.scheme} needs {self.rank + 2} target charges c_0..c_{self.rank + 1}")
        if self.K is None:
            self.K = DEFAULT_K.get(self.scheme, 2)
        if self.level_cap is None:
            self.level_cap = self.K

    @property
    def rank(self) -> int:
        return SCHEME_RANK[self.scheme]


@dataclass
class Substitution:
    lam_z: Any
    lams: tuple
    A: Any


def limit_substitution(spec: DegenerationSpec) -> Substitution:
    """λ_z, inner charges λ_0..λ_r and A as rational functions of ε."""
    f = EPS_FIELD
    eps = f.eps
    r = spec.rank
    c = [f(x) for x in spec.c]
    beta, rho, dw = f(spec.beta), f(spec.rho), f(spec.delta_w)
    half = f.one / f(2)
    lam_z = sum((c[j] / eps**j for j in range(1, r + 2)), f.zero) + half * c[0]
    lams = []
    for j in range(r + 1):
        lam = -sum((c[i] * eps**j / eps**i for i in range(j + 1, r + 2)), f.zero)
        if j == 0:
            lam += half * c[0]
        lams.append(lam)
    A = sum((c[j] * beta / eps**j for j in range(1, r + 2)), f.zero)
    A += half * beta * (c[0] - 2 * rho + beta) - dw + f(spec.A_shift)
    return Substitution(lam_z, tuple(lams), A)


@dataclass
class OrderVerdict:
    k: int
    valuation: Optional[int]
    verdict: str
    terms: int


@dataclass
class DegenerationReport:
    spec: DegenerationSpec
    orders: list[OrderVerdict] = field(default_factory=list)
    prefactor: dict = field(default_factory=dict)
    verdict: str = "match"

    def to_json(self) -> dict:
        s = self.spec
        return {
            "scheme": s.scheme,
            "K": s.K,
            "level_cap": s.level_cap,
            "verdict": self.verdict,
            "orders": [vars(o) for o in self.orders],
            "prefactor": self.prefactor,
        }


def _inner_operator(spec: DegenerationSpec, sub: Substitution, cfg: FockConfig):
    f = EPS_FIELD
    r = spec.rank
    beta, dw = f(spec.beta), f(spec.delta_w)
    if r == 0:
        lam = sub.lams[0]
        d1 = delta_of_lambda(lam, cfg.rho, f)
        d3 = delta_of_lambda(lam + beta, cfg.rho, f)
        return regular_vo_coeffs(d1, dw, d3, cfg.c, spec.K, f), (lam + beta,)
    Lambda = Lambda_of_lambdas(sub.lams, cfg.rho, f)
    beta_r = -sub.lams[r] * beta / f(r)
    vo = irregular_vo_coeffs(r, Lambda, beta_r, dw, cfg.c, spec.K, f, lams=sub.lams, rho=cfg.rho)
    return vo, (sub.lams[0] + beta,) + tuple(sub.lams[1:])


def target_operator(spec: DegenerationSpec):
    """The rank-(r+1) operator the composition should converge to, over the rationals."""
    f = RATIONAL
    r1 = spec.rank + 1
    c = [f(x) for x in spec.c]
    beta = f(spec.beta)
    Gamma = Lambda_of_lambdas(c, spec.rho, f)
    beta_top = -c[r1] * beta / f(r1)
    lams = c if r1 >= 3 else None
    rho = spec.rho if r1 >= 3 else None
    return irregular_vo_coeffs(r1, Gamma, beta_top, spec.delta_w, 1 - 12 * f(spec.rho) ** 2, spec.K, f, lams, rho)


def _prefactor_checks(spec: DegenerationSpec, sub: Substitution, inner, target) -> dict:
    f = EPS_FIELD
    eps = f.eps
    r1 = spec.rank + 1
    beta = f(spec.beta)
    lam0 = sub.lams[0] + beta
    rho = f(spec.rho)
    identity = (
        delta_of_lambda(lam0 + sub.lam_z, rho, f) - delta_of_lambda(sub.lam_z, rho, f) - delta_of_lambda(lam0, rho, f)
        == sub.lam_z * lam0
    )
    _, alpha = eps_limit(inner.alpha + sub.A)
    betas = []
    for j in range(1, r1 + 1):
        bw = inner.betas[j - 1] if j <= len(inner.betas) else f.zero
        _, b = eps_limit(bw - sub.A * eps**j / f(j))
        betas.append(b)
    want_betas = list(target.betas) + [RATIONAL.zero] * (r1 - len(target.betas))
    return {
        "alpha_z_identity": identity,
        "alpha_w": scalar_to_json(alpha, RATIONAL),
        "alpha_match": alpha == target.alpha,
        "betas_w": [scalar_to_json(b, RATIONAL) for b in betas],
        "betas_match": betas == want_betas,
    }


def degeneration_report(spec: DegenerationSpec, threads: int = 1) -> DegenerationReport:
    """Check every R_k, k <= K, against the rank-(r+1) target.

    Raises NegativeValuation on the first ε-pole and MismatchAtOrder when a
    limit differs from the target coefficient.
    """
    f = EPS_FIELD
    cfg = FockConfig(spec.rho, f)
    sub = limit_substitution(spec)
    inner, inner_charges = _inner_operator(spec, sub, cfg)
    outer = ExpOperator(sub.lam_z, f.eps, spec.level_cap)
    expansion = compose_rearranged(outer, inner, sub.A, spec.K, cfg, inner_charges, threads)
    target = target_operator(spec)
    limit_charges = (RATIONAL(spec.c[0]) + RATIONAL(spec.beta),) + tuple(RATIONAL(x) for x in spec.c[1:])
    rat_cfg = FockConfig(spec.rho, RATIONAL)
    report = DegenerationReport(spec)
    eps_charges = (f(spec.c[0]) + f(spec.beta),) + tuple(f(x) for x in spec.c[1:])

    def check(k: int) -> OrderVerdict:
        R = rebase(expansion.coeffs[k], eps_charges, spec.level_cap)
        try:
            valuation, limit = eps_limit(R)
        except NegativeValuation as err:
            raise NegativeValuation(f"R_{k} {err.where}", err.valuation)
        if valuation is not None and valuation < 0:
            raise NegativeValuation(f"R_{k}", valuation)
        want = module_to_fock(target.coeffs[k], limit_charges, rat_cfg).truncate(spec.level_cap)
        if limit != want:
            raise MismatchAtOrder(k, (limit - want).to_json())
        logger.debug("degeneration: order %d matches (valuation %s)", k, valuation)
        return OrderVerdict(k, valuation, "match", len(limit.terms))

    report.orders = ordered_map(check, range(spec.K + 1), threads)
    report.prefactor = _prefactor_checks(spec, sub, inner, target)
    if not (report.prefactor["alpha_match"] and report.prefactor["betas_match"]):
        report.verdict = "prefactor-mismatch"
    return report
