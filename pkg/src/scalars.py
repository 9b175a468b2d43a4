"""Coefficient fields and the prefactored-series algebra.

Three backends share one interface (``ScalarField``):

* ``rat``  exact rationals (sympy ``QQ``),
* ``eps``  rational functions in ε over ``QQ`` (``QQ.frac_field(epsilon)``),
* ``cplx`` complex big-floats (sympy ``ComplexField``) at a fixed number of digits.

A ``PrefactoredSeries`` stands for
``x^alpha * exp(sum_i beta_i x^-i) * sum_k c_k x^k + O(x^(alpha+N+1))``.
Coefficients are field elements or vectors (anything with ``scale``/``+``).
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence

import mpmath
import sympy
from sympy.polys.domains import QQ, ComplexField

from config import DEFAULT_DIGITS
from errors import (
    EvaluationAtZero,
    NegativeValuation,
    PrecisionUnderflow,
    PrefactorMismatch,
    ZeroLeadingCoefficient,
)

logger = logging.getLogger(__name__)

EPSILON = sympy.Symbol("epsilon")

RAT, CPLX, EPS = "rat", "cplx", "eps"


def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """Exact real and imaginary parts of strings like ``"3/5-2/7i"``, ``"20i"`` or ``"1/4"``."""
    s = text.replace(" ", "").replace("j", "i")
    if not s.endswith("i"):
        return Fraction(s), Fraction(0)
    body = s[:-1]
    cut = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] not in "eE"), default=0)
    real, imag = body[:cut], body[cut:]
    if imag in ("", "+", "-"):
        imag += "1"
    return Fraction(real or 0), Fraction(imag)


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


@lru_cache(maxsize=None)
def _domain(kind: str, digits: int):
    match kind:
        case "rat":
            return QQ
        case "eps":
            return QQ.frac_field(EPSILON)
        case "cplx":
            return ComplexField(dps=digits)
        case _:
            raise ValueError(f"unknown scalar kind {kind!r}")


@dataclass(frozen=True)
class ScalarField:
    kind: str = RAT
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if self.kind == CPLX and self.digits < DEFAULT_DIGITS:
            raise ValueError(f"complex fields need at least {DEFAULT_DIGITS} digits")

    def working(self):
        """mpmath precision for arithmetic on this field's complex elements."""
        return mpmath.workdps(self.digits + 10)

    @property
    def domain(self):
        return _domain(self.kind, self.digits if self.kind == CPLX else 0)

    @property
    def exact(self) -> bool:
        return self.kind != CPLX

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def eps(self):
        if self.kind != EPS:
            raise TypeError("only the eps field has an indeterminate")
        return self.domain.from_sympy(EPSILON)

    def __call__(self, value: Any):
        """Convert ints, Fractions, numeric strings, complex numbers or elements."""
        K = self.domain
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, int):
            return K.convert(value)
        if isinstance(value, dict):
            return scalar_from_json(value, self)
        if isinstance(value, str):
            value = value.strip()
            if "j" in value or "i" in value:
                real, imag = parse_complex(value)
                with self.working():
                    value = mpmath.mpc(_mpf(real), _mpf(imag))
            else:
                value = Fraction(value)
        if isinstance(value, Fraction):
            return K.from_sympy(sympy.Rational(value.numerator, value.denominator))
        if isinstance(value, float):
            return self(Fraction(value))
        if isinstance(value, (complex, mpmath.mpc, mpmath.mpf)):
            if self.kind != CPLX:
                raise TypeError(f"complex value {value} needs the cplx field")
            with self.working():
                return K.dtype(str(mpmath.mpf(value.real)), str(mpmath.mpf(value.imag)))
        if isinstance(value, sympy.Basic):
            return K.from_sympy(value)
        if K.of_type(value):
            return value
        return K.convert(value)

    def lift(self, value: Any, source: "ScalarField"):
        """Move an element of ``source`` into this field."""
        if source == self:
            return value
        return self.domain.from_sympy(source.domain.to_sympy(value))

    def is_zero(self, x) -> bool:
        return self.domain.is_zero(x)

    def negligible(self, x, size=1) -> bool:
        """Zero on exact fields; on cplx, below 10^(10 - digits) times max(1, ``size``)."""
        if self.exact:
            return self.is_zero(x)
        with self.working():
            return abs(self.to_mpc(x)) <= mpmath.mpf(10) ** (10 - self.digits) * max(1, size)

    def to_mpc(self, x) -> mpmath.mpc:
        match self.kind:
            case "rat":
                r = self.domain.to_sympy(x)
                return mpmath.mpc(mpmath.mpf(int(r.p)) / int(r.q))
            case "cplx":
                return mpmath.mpc(x.real, x.imag)
            case _:
                raise TypeError("take eps_limit before evaluating an eps scalar")

    def to_str(self, x) -> str:
        if self.kind == CPLX:
            with self.working():
                return mpmath.nstr(self.to_mpc(x), self.digits)
        return str(self.domain.to_sympy(x))

    def sqrt(self, x):
        """Principal square root; exact fields need a perfect square."""
        if self.kind == CPLX:
            with self.working():
                return self(mpmath.sqrt(self.to_mpc(x)))
        root = sympy.sqrt(self.domain.to_sympy(x))
        if self.kind == RAT and not root.is_Rational:
            raise ValueError(f"{x} is not a rational square")
        return self.domain.from_sympy(root)

    def power(self, x, exponent):
        """x**exponent for integer exponents, principal branch on cplx."""
        if self.is_integer(exponent):
            n = self.as_int(exponent)
            return x**n if n >= 0 else self.one / x ** (-n)
        if self.kind == CPLX:
            with self.working():
                return self(mpmath.power(self.to_mpc(x), self.to_mpc(exponent)))
        if x == self.one:
            return self.one
        raise ValueError(f"non-integer power {exponent} of {x} is not exact")

    def is_integer(self, x) -> bool:
        if self.kind == CPLX:
            with self.working():
                z = self.to_mpc(x)
                return z.imag == 0 and mpmath.isint(z.real)
        s = self.domain.to_sympy(x)
        return bool(s.is_Integer)

    def as_int(self, x) -> int:
        if self.kind == CPLX:
            return int(self.to_mpc(x).real)
        return int(self.domain.to_sympy(x))


RATIONAL = ScalarField(RAT)
EPS_FIELD = ScalarField(EPS)


def complex_field(digits: int = DEFAULT_DIGITS) -> ScalarField:
    return ScalarField(CPLX, max(digits, DEFAULT_DIGITS))


# --- JSON ---


def _rat_str(q) -> str:
    return str(QQ.to_sympy(q))


def scalar_to_json(x, f: ScalarField) -> dict:
    match f.kind:
        case "rat":
            return {"rat": _rat_str(x)}
        case "cplx":
            with f.working():
                z = f.to_mpc(x)
                return {
                    "cplx": [mpmath.nstr(z.real, f.digits), mpmath.nstr(z.imag, f.digits)],
                    "digits": f.digits,
                }
        case _:
            num, den = _monic(x)
            return {"eps": {"num": num, "den": den}}


def _monic(x) -> tuple[list[str], list[str]]:
    num, den = dict(x.numer), dict(x.denom)
    top = max(den)
    lead = den[top]
    width = lambda p: max(m[0] for m in p) + 1 if p else 0
    as_list = lambda p: [
        _rat_str(QQ.quo(p.get((k,), QQ.zero), lead)) for k in range(width(p))
    ]
    return as_list(num), as_list(den)


def scalar_from_json(data: dict, f: ScalarField):
    if "rat" in data:
        return f(Fraction(data["rat"]))
    if "cplx" in data:
        re, im = data["cplx"]
        with mpmath.workdps(int(data.get("digits", f.digits))):
            return f(mpmath.mpc(re, im))
    if "eps" in data:
        eps = sympy.Symbol("epsilon")
        poly = lambda cs: sum(sympy.Rational(c) * eps**k for k, c in enumerate(cs))
        return f.domain.from_sympy(poly(data["eps"]["num"]) / poly(data["eps"]["den"]))
    raise ValueError(f"not a scalar: {data}")


# --- epsilon valuations ---


def eps_valuation(x) -> Optional[int]:
    """Lowest ε-order of a reduced rational function; None for zero."""
    num = dict(x.numer)
    if not num:
        return None
    den = dict(x.denom)
    return min(m[0] for m in num) - min(m[0] for m in den)


def eps_constant_term(x):
    """ε^0 part of x (a QQ element); x must have valuation ≥ 0."""
    v = eps_valuation(x)
    if v is None or v > 0:
        return QQ.zero
    if v < 0:
        raise NegativeValuation(x, v)
    num, den = dict(x.numer), dict(x.denom)
    low_n, low_d = min(num), min(den)
    return QQ.quo(num[low_n], den[low_d])


def eps_limit(s: Any) -> tuple[Optional[int], Any]:
    """(valuation, ε^0 part) of a scalar or a series of ε-rational coefficients.

    Raises NegativeValuation naming the offending coefficient.
    """
    if isinstance(s, PrefactoredSeries):
        lowest: Optional[int] = None
        limits = []
        for k, c in enumerate(s.coeffs):
            try:
                v, lim = eps_limit(c)
            except NegativeValuation as err:
                raise NegativeValuation(f"coefficient {k}: {err.where}", err.valuation)
            if v is not None and (lowest is None or v < lowest):
                lowest = v
            limits.append(lim)
        return lowest, replace(s, coeffs=tuple(limits), field=RATIONAL)
    if hasattr(s, "eps_limit"):
        return s.eps_limit()
    v = eps_valuation(s)
    if v is not None and v < 0:
        raise NegativeValuation(EPS_FIELD.to_str(s), v)
    return v, eps_constant_term(s)


# --- prefactored series ---


def scale(s, c):
    """s * c for a scalar s and a scalar or vector c."""
    if hasattr(c, "scale"):
        return c.scale(s)
    return s * c


def _add_coeff(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


@dataclass(frozen=True)
class PrefactoredSeries:
    alpha: Any
    betas: tuple = ()
    coeffs: tuple = ()
    field: ScalarField = field(default=RATIONAL, compare=False)

    def __post_init__(self):
        betas = tuple(self.betas)
        while betas and self.field.is_zero(betas[-1]):
            betas = betas[:-1]
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def rank(self) -> int:
        return len(self.betas)

    @property
    def is_scalar(self) -> bool:
        return not any(hasattr(c, "scale") for c in self.coeffs)

    @property
    def normalized(self) -> bool:
        return bool(self.coeffs) and self.coeffs[0] == self.field.one

    def truncate(self, order: int) -> "PrefactoredSeries":
        if order > self.order:
            raise ValueError(f"cannot raise truncation order {self.order} to {order}")
        return replace(self, coeffs=self.coeffs[: order + 1])

    def same_prefactor(self, other: "PrefactoredSeries") -> bool:
        return self.alpha == other.alpha and self.betas == other.betas

    def map(self, fn: Callable[[Any], Any], field_: Optional[ScalarField] = None):
        return replace(self, coeffs=tuple(fn(c) for c in self.coeffs), field=field_ or self.field)

    @classmethod
    def power_series(cls, coeffs: Sequence, f: ScalarField = RATIONAL) -> "PrefactoredSeries":
        return cls(f.zero, (), tuple(f(c) if not hasattr(c, "scale") else c for c in coeffs), f)

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "alpha": enc(self.alpha),
            "betas": [enc(b) for b in self.betas],
            "order": self.order,
            "coeffs": [c.to_json() if hasattr(c, "to_json") else enc(c) for c in self.coeffs],
        }


def _pad(betas: tuple, r: int, f: ScalarField) -> tuple:
    return tuple(betas) + (f.zero,) * (r - len(betas))


def _add(a: PrefactoredSeries, b: PrefactoredSeries) -> PrefactoredSeries:
    if not a.same_prefactor(b):
        raise PrefactorMismatch(
            f"cannot add x^{a.alpha} exp{a.betas} and x^{b.alpha} exp{b.betas}"
        )
    n = min(a.order, b.order)
    return replace(a, coeffs=tuple(a.coeffs[k] + b.coeffs[k] for k in range(n + 1)))


def _mul(a: PrefactoredSeries, b: PrefactoredSeries) -> PrefactoredSeries:
    f = a.field
    if not a.is_scalar and not b.is_scalar:
        raise TypeError("at most one factor may carry vector coefficients")
    if not a.is_scalar:
        a, b = b, a
    r = max(a.rank, b.rank)
    betas = tuple(x + y for x, y in zip(_pad(a.betas, r, f), _pad(b.betas, r, f)))
    n = min(a.order, b.order)
    coeffs = []
    for k in range(n + 1):
        acc = None
        for i in range(k + 1):
            if f.is_zero(a.coeffs[i]):
                continue
            acc = _add_coeff(acc, scale(a.coeffs[i], b.coeffs[k - i]))
        if acc is None:
            acc = scale(f.zero, b.coeffs[k])
        coeffs.append(acc)
    return PrefactoredSeries(a.alpha + b.alpha, betas, tuple(coeffs), f)


def _power_coeffs(c: Sequence, s, f: ScalarField) -> list:
    """Coefficients of (sum c_k x^k)^s via the J.C.P. Miller recurrence."""
    if f.is_zero(c[0]):
        raise ZeroLeadingCoefficient("power of a series with vanishing c_0")
    out = [f.power(c[0], s)]
    for k in range(1, len(c)):
        acc = f.zero
        for j in range(1, k + 1):
            acc += (s * j + j - k) * c[j] * out[k - j]
        out.append(acc / (k * c[0]))
    return out


def _pow(a: PrefactoredSeries, s) -> PrefactoredSeries:
    f = a.field
    coeffs = _power_coeffs(a.coeffs, s, f)
    return PrefactoredSeries(a.alpha * s, tuple(b * s for b in a.betas), tuple(coeffs), f)


def _div(a: PrefactoredSeries, b: PrefactoredSeries) -> PrefactoredSeries:
    if not b.coeffs or b.field.is_zero(b.coeffs[0]):
        raise ZeroLeadingCoefficient("division by a series with vanishing c_0")
    return _mul(a, _pow(b, b.field(-1)))


def _exp(a: PrefactoredSeries) -> PrefactoredSeries:
    f = a.field
    if not f.is_zero(a.alpha) or a.betas:
        raise PrefactorMismatch("exp is defined on plain power series")
    c = a.coeffs
    lead = f.one
    if not f.is_zero(c[0]):
        if f.exact:
            raise PrefactorMismatch("exp of a non-zero constant is not exact")
        with f.working():
            lead = f(mpmath.exp(f.to_mpc(c[0])))
    out = [lead]
    for k in range(1, len(c)):
        acc = f.zero
        for j in range(1, k + 1):
            acc += j * c[j] * out[k - j]
        out.append(acc / k)
    return PrefactoredSeries(f.zero, (), tuple(out), f)


def _log(a: PrefactoredSeries) -> PrefactoredSeries:
    f = a.field
    if not f.is_zero(a.alpha) or a.betas:
        raise PrefactorMismatch("log is defined on plain power series")
    c = a.coeffs
    if f.is_zero(c[0]):
        raise ZeroLeadingCoefficient("log of a series with vanishing c_0")
    if c[0] == f.one:
        lead = f.zero
    elif not f.exact:
        with f.working():
            lead = f(mpmath.log(f.to_mpc(c[0])))
    else:
        raise PrefactorMismatch("log of a constant other than 1 is not exact")
    out = [lead]
    for k in range(1, len(c)):
        acc = c[k]
        for j in range(1, k):
            acc -= j * out[j] * c[k - j] / k
        out.append(acc / c[0])
    return PrefactoredSeries(f.zero, (), tuple(out), f)


def series_combine(op: str, a: PrefactoredSeries, b: Any = None) -> PrefactoredSeries:
    """add | mul | div | pow | exp | log; for pow, ``b`` is the Scalar exponent."""
    match op:
        case "add":
            return _add(a, b)
        case "mul":
            return _mul(a, b)
        case "div":
            return _div(a, b)
        case "pow":
            return _pow(a, b)
        case "exp":
            return _exp(a)
        case "log":
            return _log(a)
        case _:
            raise ValueError(f"unknown series operation {op!r}")


def binomial_series(A, order: int, f: ScalarField = RATIONAL, sign: int = -1) -> PrefactoredSeries:
    """(1 + sign*x)^A to the given order."""
    base = PrefactoredSeries.power_series([1, sign] + [0] * max(order - 1, 0), f)
    return _pow(base.truncate(order), A)


def series_derivative(s: PrefactoredSeries) -> PrefactoredSeries:
    """Term-wise d/dx, re-expressed with prefactor x^(alpha-r-1)."""
    f = s.field
    r = s.rank
    n = s.order
    coeffs = [f.zero] * (n + 1)
    for k, c in enumerate(s.coeffs):
        if k + r <= n:
            coeffs[k + r] += (s.alpha + k) * c
        for i, b in enumerate(s.betas, start=1):
            j = k + r - i
            if j <= n:
                coeffs[j] -= i * b * c
    return PrefactoredSeries(s.alpha - r - 1, s.betas, tuple(coeffs), f)


def evaluate(
    s: PrefactoredSeries, x0: Any, digits: Optional[int] = None
) -> tuple[mpmath.mpc, mpmath.mpf]:
    """Value at x0 (principal branch of x0^alpha) and the last kept term's magnitude."""
    f = s.field
    digits = digits or max(f.digits, DEFAULT_DIGITS)
    with mpmath.workdps(digits + 10):
        x = as_mp(x0, f)
        if x == 0:
            raise EvaluationAtZero("series evaluated at x0 = 0")
        pref = mpmath.power(x, f.to_mpc(s.alpha))
        pref *= mpmath.exp(sum(f.to_mpc(b) * mpmath.power(x, -i) for i, b in enumerate(s.betas, 1)))
        terms = [f.to_mpc(c) * mpmath.power(x, k) for k, c in enumerate(s.coeffs)]
        total = mpmath.fsum(terms)
        biggest = max((abs(t) for t in terms), default=mpmath.mpf(0))
        if biggest and (total == 0 or mpmath.log10(biggest / abs(total)) >= digits):
            raise PrecisionUnderflow(f"cancellation exceeds {digits} digits at x0 = {x}")
        last = abs(terms[-1] * pref) if terms else mpmath.mpf(0)
        return +(pref * total), +last


def as_mp(x0: Any, f: ScalarField):
    if isinstance(x0, (mpmath.mpc, mpmath.mpf, int, float, complex)):
        return mpmath.mpmathify(x0)
    if isinstance(x0, str) and ("i" in x0 or "j" in x0):
        real, imag = parse_complex(x0)
        return mpmath.mpc(_mpf(real), _mpf(imag))
    if isinstance(x0, (str, Fraction)):
        return _mpf(Fraction(x0))
    return f.to_mpc(x0)
