"""The c = 1 four-point block from pairs of Young diagrams, and its Verma cross-check.

    <θ_∞²| Φ^{θ_1²}(1) Φ^{θ_t²}(t) |θ_0²>
        = t^{σ²-θ_0²-θ_t²} (1-t)^{2θ_tθ_1} Σ_{λ,μ} N_{λ,μ} t^{|λ|+|μ|}

The (1-t) exponent is 2θ_tθ_1: the order-1 coefficient of the Verma-module
computation is (σ²+θ_t²-θ_0²)(σ²+θ_1²-θ_∞²)/(2σ²), while Σ_{|λ|+|μ|=1} N
exceeds it by exactly 2θ_tθ_1.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from combinatorics import Partition, hook, partition_pairs
from errors import MismatchAtOrder, ZeroDenominator
from parallel import ordered_map
from scalars import RATIONAL, PrefactoredSeries, ScalarField, binomial_series, scalar_to_json
from vertexops.regular import dual_regular_vo_coeffs, regular_vo_coeffs, vo_on_descendant
from virasoro import pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockParams:
    theta_0: Any
    theta_t: Any
    theta_1: Any
    theta_inf: Any
    sigma: Any
    field: ScalarField = field(default=RATIONAL, compare=False)

    def __post_init__(self):
        for name in ("theta_0", "theta_t", "theta_1", "theta_inf", "sigma"):
            object.__setattr__(self, name, self.field(getattr(self, name)))

    @classmethod
    def from_dict(cls, data: dict, f: ScalarField = RATIONAL) -> "BlockParams":
        return cls(data["theta_0"], data["theta_t"], data["theta_1"], data["theta_inf"], data["sigma"], f)

    def with_sigma(self, sigma) -> "BlockParams":
        return BlockParams(self.theta_0, self.theta_t, self.theta_1, self.theta_inf, sigma, self.field)

    @property
    def exponent(self):
        return self.sigma**2 - self.theta_0**2 - self.theta_t**2

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "theta_0": enc(self.theta_0),
            "theta_t": enc(self.theta_t),
            "theta_1": enc(self.theta_1),
            "theta_inf": enc(self.theta_inf),
            "sigma": enc(self.sigma),
        }


def _diagram_factor(lam: Partition, other: Partition, sigma, p: BlockParams):
    f = p.field
    acc = f.one
    for i, j in lam.cells():
        shift = f(i - j)
        num = ((p.theta_t + sigma + shift) ** 2 - p.theta_0**2) * ((p.theta_1 + sigma + shift) ** 2 - p.theta_inf**2)
        h = f(hook(lam, i, j))
        cross = f(lam.column(j) + other.row(i) - i - j + 1) + 2 * sigma
        if f.is_zero(cross):
            raise ZeroDenominator((i, j), "λ′_j + μ_i - i - j + 1 ± 2σ")
        acc = acc * num / (h * h * cross * cross)
    return acc


def nekrasov_pair_weight(lam: Partition, mu: Partition, p: BlockParams):
    """N_{λ,μ}: the λ-product at +σ times the μ-product at -σ."""
    return _diagram_factor(lam, mu, p.sigma, p) * _diagram_factor(mu, lam, -p.sigma, p)


def combinatorial_sum(p: BlockParams, N: int, threads: int = 1) -> list:
    """Σ_{|λ|+|μ|=k} N_{λ,μ} for k = 0..N."""
    f = p.field

    def level(k: int):
        return sum((nekrasov_pair_weight(lam, mu, p) for lam, mu in partition_pairs(k)), f.zero)

    return ordered_map(level, range(N + 1), threads)


def block_series_agt(p: BlockParams, N: int, threads: int = 1) -> PrefactoredSeries:
    f = p.field
    sums = combinatorial_sum(p, N, threads)
    prefactor = binomial_series(2 * p.theta_t * p.theta_1, N, f, sign=-1)
    logger.debug("agt block: %d orders", N + 1)
    return PrefactoredSeries(p.exponent, (), _convolve(prefactor.coeffs, sums, f), f)


def _convolve(a, b, f: ScalarField) -> tuple:
    n = min(len(a), len(b))
    return tuple(sum((a[i] * b[k - i] for i in range(k + 1)), f.zero) for k in range(n))


def verma_block_series(
    p: BlockParams, N: int, c=1, threads: int = 1, delta_shift: Any = 0
) -> PrefactoredSeries:
    """Block from the two vertex operators: coefficient k is <w_k|v_k>.

    ``delta_shift`` moves the intermediate weight σ² away from the value the
    combinatorial side uses.
    """
    f = p.field
    d_mid = p.sigma**2 + f(delta_shift)
    inner = regular_vo_coeffs(p.theta_0**2, p.theta_t**2, d_mid, c, N, f, threads)
    outer = dual_regular_vo_coeffs(p.theta_inf**2, p.theta_1**2, d_mid, c, N, f, threads)
    coeffs = ordered_map(lambda k: pair(outer.coeffs[k], inner.coeffs[k]), range(N + 1), threads)
    return PrefactoredSeries(inner.alpha, (), tuple(coeffs), f)


def descendant_block_series(
    p: BlockParams, N: int, c=1, threads: int = 1, delta_shift: Any = 0
) -> PrefactoredSeries:
    """Same block, pushing the outer operator through every word of v_k instead of solving its dual."""
    f = p.field
    d_mid = p.sigma**2 + f(delta_shift)
    inner = regular_vo_coeffs(p.theta_0**2, p.theta_t**2, d_mid, c, N, f, threads)
    outer = regular_vo_coeffs(d_mid, p.theta_1**2, p.theta_inf**2, c, 0, f)

    def coefficient(k: int):
        total = f.zero
        for word, x in inner.coeffs[k].terms.items():
            top = vo_on_descendant(outer, word, order=0).coeffs[0]
            total += x * top.coeff(())
        return total

    coeffs = ordered_map(coefficient, range(N + 1), threads)
    return PrefactoredSeries(inner.alpha, (), tuple(coeffs), f)


@dataclass
class CrosscheckReport:
    params: BlockParams
    order: int
    agt: Optional[PrefactoredSeries] = None
    verma: Optional[PrefactoredSeries] = None
    descendant: Optional[PrefactoredSeries] = None
    verdict: str = "match"

    def to_json(self) -> dict:
        series = lambda s: None if s is None else [scalar_to_json(x, s.field) for x in s.coeffs]
        return {
            "params": self.params.to_json(),
            "order": self.order,
            "verdict": self.verdict,
            "exponent": scalar_to_json(self.params.exponent, self.params.field),
            "agt": series(self.agt),
            "verma": series(self.verma),
            "descendant": series(self.descendant),
        }


def crosscheck_block(p: BlockParams, N: int, threads: int = 1, delta_shift: Any = 0) -> CrosscheckReport:
    """Compare the three constructions order by order; raises MismatchAtOrder on the first difference."""
    f = p.field
    report = CrosscheckReport(p, N)
    report.agt = block_series_agt(p, N, threads)
    report.verma = verma_block_series(p, N, 1, threads, delta_shift)
    report.descendant = descendant_block_series(p, N, 1, threads, delta_shift)
    for k in range(N + 1):
        a, v, d = report.agt.coeffs[k], report.verma.coeffs[k], report.descendant.coeffs[k]
        if v != d:
            raise MismatchAtOrder(k, {"verma_minus_descendant": scalar_to_json(v - d, f)})
        if a != v:
            raise MismatchAtOrder(k, {"agt_minus_verma": scalar_to_json(a - v, f)})
        logger.debug("agt crosscheck: order %d matches", k)
    return report
