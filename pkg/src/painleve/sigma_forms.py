"""σ-form equations and their numeric residuals on τ-series.

Plain forms take (σ, σ′, σ″, t); the tilde forms take (f, f′, f″, s) with
f = -d/ds log τ. Each form is kept as its list of summands so the residual
can be judged against the largest of them.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Union

import mpmath

from config import RESIDUAL_BUDGET
from errors import ConfigError, ResidualTooLarge, TauVanishes
from painleve.tau import TauSeries, TauValue
from scalars import RATIONAL, as_mp

logger = logging.getLogger(__name__)

FORM_KINDS = ("E_VI", "E_V", "E_IV", "Etilde_V", "Etilde_IV")

FORM_PARAMS = {
    "E_VI": ("theta_0", "theta_t", "theta_1", "theta_inf"),
    "E_V": ("theta", "theta_0", "theta_t"),
    "E_IV": ("theta_star", "theta_t"),
    "Etilde_V": ("theta", "theta_0", "theta_t", "eta"),
    "Etilde_IV": ("theta_star", "theta_t"),
}

DEFAULT_FORM = {
    "VI_at_0": "E_VI",
    "VI_at_infty": "E_VI",
    "V_at_infty": "Etilde_V",
    "IV_at_infty": "Etilde_IV",
}


def _e_vi(p, y, y1, y2, t):
    t0, tt, t1, tinf = p["theta_0"], p["theta_t"], p["theta_1"], p["theta_inf"]
    inner = -(y1**2) + 2 * (t * y1 - y) * y1 - (t0**2 - t1**2) * (tt**2 - tinf**2)
    return [
        (t - 1) ** 2 * t**2 * y1 * y2**2,
        inner**2,
        -(y1 + (t0 - t1) ** 2) * (y1 + (t0 + t1) ** 2) * (y1 + (tt - tinf) ** 2) * (y1 + (tt + tinf) ** 2),
    ]


def _e_v(p, y, y1, y2, t):
    theta, t0, tt = p["theta"], p["theta_0"], p["theta_t"]
    return [
        (t * y2) ** 2,
        -((y - t * y1 + 2 * y1**2) ** 2),
        ((2 * y1 - theta) ** 2 - 4 * t0**2) * ((2 * y1 + theta) ** 2 - 4 * tt**2) / 4,
    ]


def _e_iv(p, y, y1, y2, t):
    ts, tt = p["theta_star"], p["theta_t"]
    return [y2**2, -((t * y1 - y) ** 2), 4 * y1 * (y1 - ts - tt) * (y1 - 2 * tt)]


def _etilde_v(p, f, f1, f2, s, z_2):
    theta, t0, tt, eta = p["theta"], p["theta_0"], p["theta_t"], p["eta"]
    u = s - z_2
    g = u * f1 + f
    return [
        (eta**2 * f * u - g * (2 * g + eta * (2 * theta + eta * u))) ** 2,
        4 * (eta * (theta - t0) + g) * (eta * (theta + t0) + g) * (eta * tt + g) * (eta * tt - g),
        -(eta**2) * u**2 * (u * f2 + 2 * f1) ** 2,
    ]


def _etilde_iv(p, f, f1, f2, s):
    ts, tt = p["theta_star"], p["theta_t"]
    return [f2**2, -((f - s * f1) ** 2), 4 * (tt - f1) * (f1 + ts) * (f1 + tt)]


def _real(x):
    return RATIONAL.to_mpc(x).real


@dataclass
class SigmaForm:
    kind: str
    params: Mapping[str, Any]
    z_2: Any = 0

    def __post_init__(self):
        if self.kind not in FORM_KINDS:
            raise ConfigError(f"unknown σ-form {self.kind!r}", key="form")
        missing = [k for k in FORM_PARAMS[self.kind] if k not in self.params]
        if missing:
            raise ConfigError(f"{self.kind} needs {', '.join(missing)}", key=missing[0])
        self.params = {k: RATIONAL(self.params[k]) for k in FORM_PARAMS[self.kind]}
        self.z_2 = RATIONAL(self.z_2)

    @property
    def tilde(self) -> bool:
        return self.kind.startswith("Etilde")

    def terms(self, y, y1, y2, t) -> list:
        """Summands of the left-hand side at the current working precision; their sum is the residual."""
        p = {k: _real(v) for k, v in self.params.items()}
        match self.kind:
            case "E_VI":
                return _e_vi(p, y, y1, y2, t)
            case "E_V":
                return _e_v(p, y, y1, y2, t)
            case "E_IV":
                return _e_iv(p, y, y1, y2, t)
            case "Etilde_V":
                return _etilde_v(p, y, y1, y2, t, _real(self.z_2))
            case _:
                return _etilde_iv(p, y, y1, y2, t)

    def __call__(self, y, y1, y2, t):
        return mpmath.fsum(self.terms(y, y1, y2, t))


def log_derivatives(derivatives: list) -> tuple:
    """(log τ)′, (log τ)″, (log τ)‴ from τ, τ′, τ″, τ‴."""
    tau, d1, d2, d3 = derivatives[:4]
    if tau == 0:
        raise TauVanishes("τ = 0 at the evaluation point")
    l1 = d1 / tau
    l2 = d2 / tau - l1**2
    l3 = d3 / tau - 3 * d2 * d1 / tau**2 + 2 * l1**3
    return l1, l2, l3


def sigma_from_tau(tau_kind: str, params: Mapping[str, Any], value: TauValue, z_2: Any = 0, eta: Any = 1) -> tuple:
    """(σ, σ′, σ″, t) of the plain form belonging to ``tau_kind``.

    VI:  σ = t(t-1) d/dt log(t^A (1-t)^B τ)
    V:   σ = t d/dt log(t^{-θ²/2} e^{-θt/2} τ), with t = η(s - z_2)
    IV:  σ = d/dt log(e^{θ_* t²/2} τ)
    """
    l1, l2, l3 = log_derivatives(value.derivatives)
    p = {k: as_mp(v, RATIONAL) for k, v in params.items()}
    y = value.point
    match tau_kind:
        case "VI_at_0" | "VI_at_infty":
            t0, tt, t1, tinf = p["theta_0"], p["theta_t"], p["theta_1"], p["theta_inf"]
            a = (t0**2 + tt**2 - t1**2 - tinf**2) / 2
            b = (tt**2 + t1**2 - t0**2 - tinf**2) / 2
            t = y
            sigma = a * (t - 1) + b * t + t * (t - 1) * l1
            s1 = a + b + (2 * t - 1) * l1 + t * (t - 1) * l2
            s2 = 2 * l1 + 2 * (2 * t - 1) * l2 + t * (t - 1) * l3
            return sigma, s1, s2, t
        case "V_at_infty":
            theta = p["theta"]
            eta = as_mp(eta, RATIONAL)
            u = y - as_mp(z_2, RATIONAL)
            sigma = -(theta**2) / 2 - theta * eta * u / 2 + u * l1
            s1 = -theta / 2 + (l1 + u * l2) / eta
            s2 = (2 * l2 + u * l3) / eta**2
            return sigma, s1, s2, eta * u
        case "IV_at_infty":
            # the exponential carries θ_*; the tilde form pulls back with θ_t instead
            ts = p["theta_star"]
            return ts * y + l1, ts + l2, l3, y
        case _:
            raise ConfigError(f"unknown τ kind {tau_kind!r}", key="kind")


@dataclass
class Residual:
    form: str
    point: Any
    value: Any
    scale: Any
    # how far the residual moves when the first dropped order is added,
    # never below the working precision times the largest term
    truncation: Any = 0
    budget: int = RESIDUAL_BUDGET

    @property
    def bound(self):
        return self.budget * self.truncation

    def check(self) -> "Residual":
        if abs(self.value) > self.bound:
            raise ResidualTooLarge(mpmath.nstr(abs(self.value), 10), mpmath.nstr(self.bound, 10))
        return self

    def to_json(self) -> dict:
        return {
            "form": self.form,
            "point": mpmath.nstr(self.point, 20),
            "residual": mpmath.nstr(self.value, 15),
            "abs_residual": mpmath.nstr(abs(self.value), 10),
            "scale": mpmath.nstr(self.scale, 10),
            "truncation": mpmath.nstr(self.truncation, 10),
            "bound": mpmath.nstr(self.bound, 10),
        }


SigmaFunction = Callable[[Any], tuple]


def _form_args(form: SigmaForm, tau: TauSeries, value: TauValue) -> tuple:
    if form.tilde:
        l1, l2, l3 = log_derivatives(value.derivatives)
        return -l1, -l2, -l3, value.point
    eta = tau.spec.params.get("eta", 1)
    return sigma_from_tau(tau.spec.kind, tau.spec.params, value, tau.spec.z_2, eta)


def sigma_ode_residual(
    form: SigmaForm,
    tau: Union[TauSeries, SigmaFunction],
    t0: Any,
    digits: int = 50,
) -> Residual:
    """Left-hand side of ``form`` at ``t0``.

    ``tau`` is either a τ-series, evaluated with three term-wise derivatives,
    or a callable returning (σ, σ′, σ″) at a point of the form's own variable.
    For a τ-series the residual is also taken one block order further; the
    difference is the first dropped order's share of the residual, which
    sets the bound.
    """
    with mpmath.workdps(digits + 10):
        if isinstance(tau, TauSeries):
            terms = form.terms(*_form_args(form, tau, tau.evaluate(t0, derivatives=3)))
            further = form.terms(*_form_args(form, tau, tau.evaluate(t0, derivatives=3, extended=True)))
            total = mpmath.fsum(terms)
            truncation = abs(mpmath.fsum(further) - total)
        else:
            t = as_mp(t0, RATIONAL)
            terms = form.terms(*tau(t), t)
            total = mpmath.fsum(terms)
            truncation = mpmath.mpf(0)
        scale = max(abs(x) for x in terms)
        truncation = max(truncation, scale * mpmath.mpf(10) ** -digits)
        logger.debug("%s residual at %s: %s", form.kind, t0, mpmath.nstr(total, 8))
        return Residual(form.kind, as_mp(t0, RATIONAL), +total, +scale, +truncation)


def form_for(tau: TauSeries, kind: str = "") -> SigmaForm:
    """The σ-form that ``tau`` is checked against, defaulting per τ kind."""
    kind = kind or DEFAULT_FORM[tau.spec.kind]
    return SigmaForm(kind, dict(tau.spec.params), z_2=tau.spec.z_2)
