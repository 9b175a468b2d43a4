"""τ-functions as Fourier sums of blocks.

    τ = Σ_{|n| <= n_max} e^{2πinρ} (C(β+n)/C(β)) (extra V factors) B(β+n)

with β standing for σ in the PVI kinds. Every mode is a ``PrefactoredSeries``
in its own expansion variable x (t at t = 0, 1/t or 1/(s - z_2) at infinity);
the evaluator sums modes numerically, in the order 0, -1, 1, -2, 2, ...
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional

import mpmath

from agt import BlockParams, block_series_agt
from config import DEFAULT_DIGITS
from errors import ConfigError, PastOptimalTruncation, TauVanishes
from painleve.blocks import irregular_block_series
from painleve.gamma_ratios import structure_constant_ratio
from parallel import ordered_map
from scalars import RATIONAL, PrefactoredSeries, as_mp, evaluate, scalar_to_json, series_derivative

logger = logging.getLogger(__name__)

TAU_KINDS = ("VI_at_0", "VI_at_infty", "V_at_infty", "IV_at_infty")

PARAMS_FOR_KIND = {
    "VI_at_0": ("theta_0", "theta_t", "theta_1", "theta_inf", "sigma"),
    "VI_at_infty": ("theta_0", "theta_t", "theta_1", "theta_inf", "sigma"),
    "V_at_infty": ("theta", "theta_t", "theta_0", "eta", "beta"),
    "IV_at_infty": ("theta_star", "theta_t", "beta"),
}

# Phase of the confluent limit that lands on this kind; reported, never used to assemble τ.
RHO_PRIME = {
    "V_at_infty": (
        "e^{2πiρ'} = e^{2πiρ} Γ(1±θ_0+η/ε+β) Γ(1+θ_t+(η/ε-θ+β)) Γ²(1-η/ε+θ-2β)"
        " / (Γ(1+θ_t-(η/ε-θ+β)) Γ²(1+η/ε-θ+2β)) · η ε^{2(θ-2β)-1} (-1)^{-η/ε-θ+2β}"
    ),
    "IV_at_infty": "e^{2πiρ'} = e^{2πiρ} Γ^{-1}(1/ε²-β) ε^{-1/ε²-2β+1} e^{-ηε} (-1)^{-1/ε²-2β}",
}


@dataclass
class TauSpec:
    kind: str
    params: dict
    rho: Any = 0
    n_max: int = 1
    order: int = 6
    z_2: Any = 0
    digits: int = DEFAULT_DIGITS
    force: bool = False

    def __post_init__(self):
        if self.kind not in TAU_KINDS:
            raise ConfigError(f"unknown τ kind {self.kind!r}", key="kind")
        missing = [k for k in PARAMS_FOR_KIND[self.kind] if k not in self.params]
        if missing:
            raise ConfigError(f"{self.kind} needs {', '.join(missing)}", key=missing[0])
        if self.n_max < 0:
            raise ConfigError("n_max must be non-negative", key="n_max")
        if self.order < 1:
            raise ConfigError("block order must be at least 1", key="order")
        self.params = {k: RATIONAL(self.params[k]) for k in PARAMS_FOR_KIND[self.kind]}
        self.rho = RATIONAL(self.rho)
        self.z_2 = RATIONAL(self.z_2)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TauSpec":
        kind = data["kind"]
        params = {k: data[k] for k in PARAMS_FOR_KIND.get(kind, ()) if k in data}
        return cls(
            kind,
            params,
            rho=data.get("rho", 0),
            n_max=data.get("n_max", 1),
            order=data.get("order", 6),
            z_2=data.get("z_2", 0),
            digits=data.get("digits", DEFAULT_DIGITS),
            force=data.get("force", False),
        )

    @property
    def shift_key(self) -> str:
        return "sigma" if self.kind.startswith("VI") else "beta"

    @property
    def at_infinity(self) -> bool:
        return self.kind != "VI_at_0"

    def mode_numbers(self) -> list[int]:
        out = [0]
        for k in range(1, self.n_max + 1):
            out += [-k, k]
        return out

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, RATIONAL)
        return {
            "kind": self.kind,
            "params": {k: enc(v) for k, v in self.params.items()},
            "rho": enc(self.rho),
            "n_max": self.n_max,
            "order": self.order,
            "z_2": enc(self.z_2),
            "digits": self.digits,
        }


def fourier_phase(n: int, rho, digits: int = DEFAULT_DIGITS):
    """e^{2πinρ} with nρ reduced mod 1 exactly, so ρ -> ρ + 1 is an identity."""
    r = RATIONAL.domain.to_sympy(RATIONAL(rho))
    q = Fraction(int(r.p), int(r.q)) * n
    frac = q - (q.numerator // q.denominator)
    with mpmath.workdps(digits + 10):
        return +mpmath.expjpi(2 * mpmath.mpf(frac.numerator) / frac.denominator)


def v_mode_factor(n: int, eta):
    """η^{-2n²} (-1)^{n(n+1)/2}, exact."""
    eta = RATIONAL(eta)
    sign = -1 if (n * (n + 1) // 2) % 2 else 1
    return sign * RATIONAL.power(eta, RATIONAL(-2 * n * n))


@dataclass
class TauMode:
    n: int
    ratio: Any
    weight: Any
    block: PrefactoredSeries
    # the same block one order further; its last term is the first one dropped
    extended: Optional[PrefactoredSeries] = None

    def series(self, extended: bool = False) -> PrefactoredSeries:
        return self.extended if extended and self.extended is not None else self.block

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ratio": mpmath.nstr(self.ratio, 20),
            "weight": mpmath.nstr(self.weight, 20),
            "exponent": scalar_to_json(self.block.alpha, self.block.field),
            "betas": [scalar_to_json(b, self.block.field) for b in self.block.betas],
            "coeffs": [scalar_to_json(c, self.block.field) for c in self.block.coeffs],
        }


@dataclass
class TauValue:
    point: Any
    # τ and its derivatives in the natural variable (t or s)
    derivatives: list
    last_term: Any
    smallest_index: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "point": mpmath.nstr(self.point, 20),
            "tau": [mpmath.nstr(d, 20) for d in self.derivatives],
            "last_term": mpmath.nstr(self.last_term, 10),
            "smallest_index": {str(n): k for n, k in self.smallest_index.items()},
        }


def _mode_block(spec: TauSpec, n: int, N: int) -> PrefactoredSeries:
    p = dict(spec.params)
    match spec.kind:
        case "VI_at_0":
            bp = BlockParams(p["theta_0"], p["theta_t"], p["theta_1"], p["theta_inf"], p["sigma"] + n)
            return block_series_agt(bp, N)
        case "VI_at_infty":
            sigma = p["sigma"] + n
            # same coefficients as the t = 0 block with θ_t and θ_1 swapped; x = 1/t
            bp = BlockParams(p["theta_0"], p["theta_1"], p["theta_t"], p["theta_inf"], sigma)
            coeffs = block_series_agt(bp, N).coeffs
            alpha = -(p["theta_inf"] ** 2 - p["theta_t"] ** 2 - sigma**2)
            return PrefactoredSeries(alpha, (), coeffs, RATIONAL)
        case _:
            return irregular_block_series(spec.kind, p, n, N)


def _mode(spec: TauSpec, n: int) -> TauMode:
    ratio = structure_constant_ratio(spec.kind, spec.params, n, spec.digits)
    with mpmath.workdps(spec.digits + 10):
        weight = fourier_phase(n, spec.rho, spec.digits) * ratio
        if spec.kind == "V_at_infty":
            weight *= RATIONAL.to_mpc(v_mode_factor(n, spec.params["eta"]))
        weight = +weight
    extended = _mode_block(spec, n, spec.order + 1)
    block = extended.truncate(spec.order)
    logger.debug("τ mode %d: exponent %s", n, RATIONAL.to_str(block.alpha))
    return TauMode(n, ratio, weight, block, extended)


def _natural_derivative(s: PrefactoredSeries, inverted: bool) -> PrefactoredSeries:
    d = series_derivative(s)
    if not inverted:
        return d
    # d/dy = -x² d/dx for x = 1/y
    return PrefactoredSeries(d.alpha + 2, d.betas, tuple(-c for c in d.coeffs), d.field)


@dataclass
class TauSeries:
    spec: TauSpec
    modes: list[TauMode]

    def expansion_variable(self, point):
        y = as_mp(point, RATIONAL)
        match self.spec.kind:
            case "VI_at_0":
                return y
            case "V_at_infty":
                return 1 / (y - RATIONAL.to_mpc(self.spec.z_2))
            case _:
                return 1 / y

    def overall_factor(self):
        """e^{z_2ηθ} for the V kind, 1 otherwise."""
        if self.spec.kind != "V_at_infty":
            return mpmath.mpf(1)
        p = self.spec.params
        return mpmath.exp(RATIONAL.to_mpc(self.spec.z_2 * p["eta"] * p["theta"]))

    def _smallest_term(self, block: PrefactoredSeries, x) -> int:
        mags = [
            (abs(block.field.to_mpc(c)) * abs(x) ** k, k)
            for k, c in enumerate(block.coeffs)
            if not block.field.is_zero(c)
        ]
        return min(mags)[1]

    def evaluate(self, point, derivatives: int = 3, extended: bool = False) -> TauValue:
        """τ and d^k τ / dy^k, k <= ``derivatives``, at the point y of the natural variable.

        ``extended`` sums every mode one order further (the first dropped
        order) and skips the optimal-truncation guard.
        """
        spec = self.spec
        digits = spec.digits
        with mpmath.workdps(digits + 10):
            x = self.expansion_variable(point)
            totals = [mpmath.mpc(0)] * (derivatives + 1)
            last = mpmath.mpf(0)
            smallest = {}
            for mode in self.modes:
                if spec.at_infinity and not extended:
                    k = self._smallest_term(mode.block, x)
                    smallest[mode.n] = k
                    if k < spec.order:
                        if not spec.force:
                            raise PastOptimalTruncation(spec.order, k)
                        logger.warning("mode %d: order %d is past the smallest term %d", mode.n, spec.order, k)
                s = mode.series(extended)
                for j in range(derivatives + 1):
                    value, tail = evaluate(s, x, digits)
                    totals[j] += mode.weight * value
                    if j == 0:
                        last += abs(mode.weight) * tail
                    if j < derivatives:
                        s = _natural_derivative(s, spec.at_infinity)
            factor = self.overall_factor()
            totals = [+(factor * t) for t in totals]
            if totals[0] == 0:
                raise TauVanishes(f"τ = 0 at {point}")
            return TauValue(as_mp(point, RATIONAL), totals, +(abs(factor) * last), smallest)

    def to_json(self) -> dict:
        out = {"spec": self.spec.to_json(), "modes": [m.to_json() for m in self.modes]}
        if self.spec.kind in RHO_PRIME:
            out["rho_prime"] = RHO_PRIME[self.spec.kind]
        return out


def tau_series(spec: TauSpec, threads: int = 1) -> TauSeries:
    modes = ordered_map(lambda n: _mode(spec, n), spec.mode_numbers(), threads)
    logger.info("τ %s: %d modes to order %d", spec.kind, len(modes), spec.order)
    return TauSeries(spec, modes)


def default_point(kind: str):
    """Evaluation point per kind; the s = ∞ points sit where every mode's exponential is a pure phase."""
    match kind:
        case "VI_at_0":
            return mpmath.mpf(1) / 20
        case "VI_at_infty":
            return mpmath.mpf(20)
        case "V_at_infty":
            return mpmath.mpc(0, 20)
        case _:
            return 20 * mpmath.expjpi(mpmath.mpf(1) / 4)
