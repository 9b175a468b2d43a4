"""Free-boson Fock spaces and the free-field Virasoro action.

Modes obey ``[a_m, a_n] = m δ_{m+n,0}``. A Fock vector is a combination of
creation words ``a_{-p_1} ... a_{-p_k}`` (keyed by the partition p) over the
base vector ``exp(Σ_{k>=1} (λ_k/k) a_{-k}) |λ_0⟩``, which is kept implicit and
described by its charges ``(λ_0, ..., λ_R)``. For R >= 1 the base vector is
irregular of rank R: ``a_k`` acts on it by ``λ_k``.

Free-field Virasoro with background charge ρ:
``L_n = ½ Σ_k :a_{n-k} a_k: - ρ(n+1) a_n`` with ``c = 1 - 12ρ²``.

The zero-mode partner q of a_0 only appears in ``:e^{λφ}:`` as the charge
shift ``λ_0 -> λ_0 + λ`` and never enters a computed quantity.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Mapping, Optional, Sequence

from combinatorics import EMPTY, Partition, enumerate_partitions
from errors import IncompatibleKinds, ZeroTopWeight
from linalg import solve_square
from scalars import (
    RATIONAL,
    PrefactoredSeries,
    ScalarField,
    eps_limit,
    scalar_to_json,
)
from virasoro import VERMA, ModuleKind, ModuleVector, irregular, verma, verma_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockConfig:
    rho: Any
    field: ScalarField = RATIONAL

    def __post_init__(self):
        object.__setattr__(self, "rho", self.field(self.rho))

    @property
    def c(self):
        return self.field.one - 12 * self.rho * self.rho


def _with_part(p: Partition, k: int) -> Partition:
    return Partition(tuple(sorted(p.parts + (k,), reverse=True)))


def _without_part(p: Partition, k: int) -> Partition:
    parts = list(p.parts)
    parts.remove(k)
    return Partition(tuple(parts))


def _merge(p: Partition, q: Partition) -> Partition:
    if not q.parts:
        return p
    return Partition(tuple(sorted(p.parts + q.parts, reverse=True)))


@dataclass(frozen=True, eq=False)
class FockVector:
    charges: tuple
    terms: Mapping[Partition, Any] = field(default_factory=dict)
    field: ScalarField = RATIONAL

    def __post_init__(self):
        f = self.field
        object.__setattr__(self, "charges", tuple(f(x) for x in self.charges))
        object.__setattr__(self, "terms", {p: a for p, a in self.terms.items() if not f.is_zero(a)})
        if not self.charges:
            raise ValueError("a Fock vector needs at least the charge λ_0")

    @classmethod
    def vacuum(cls, charges: Sequence, f: ScalarField = RATIONAL) -> "FockVector":
        return cls(tuple(charges), {EMPTY: f.one}, f)

    def like(self, terms: Mapping[Partition, Any]) -> "FockVector":
        return FockVector(self.charges, terms, self.field)

    @property
    def rank(self) -> int:
        return len(self.charges) - 1

    def charge(self, k: int):
        return self.charges[k] if 0 <= k < len(self.charges) else self.field.zero

    @property
    def level(self) -> int:
        return max((p.size for p in self.terms), default=0)

    @property
    def reach(self) -> int:
        """Largest k for which a_k can act non-trivially."""
        top = max((p.parts[0] for p in self.terms if p.parts), default=0)
        return max(top, self.rank)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, p: Partition):
        return self.terms.get(p, self.field.zero)

    def items(self):
        return iter(sorted(self.terms.items(), key=lambda t: (t[0].size, tuple(-x for x in t[0].parts))))

    def _check(self, other: "FockVector") -> None:
        if self.charges != other.charges:
            raise IncompatibleKinds("Fock vectors over different charges")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._check(other)
        acc = dict(self.terms)
        for p, a in other.terms.items():
            acc[p] = acc[p] + a if p in acc else a
        return self.like(acc)

    def __neg__(self) -> "FockVector":
        return self.like({p: -a for p, a in self.terms.items()})

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-other)

    def scale(self, s) -> "FockVector":
        return self.like({p: s * a for p, a in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.charges == other.charges and self.terms == other.terms

    def __repr__(self) -> str:
        body = " + ".join(f"({self.field.to_str(a)})a{[-k for k in p.parts]}" for p, a in self.items())
        return f"FockVector({body or '0'})"

    def truncate(self, level: int) -> "FockVector":
        return self.like({p: a for p, a in self.terms.items() if p.size <= level})

    def at_level(self, level: int) -> "FockVector":
        return self.like({p: a for p, a in self.terms.items() if p.size == level})

    def map_coeffs(self, fn, f: Optional[ScalarField] = None) -> "FockVector":
        f = f or self.field
        return FockVector(
            tuple(fn(x) for x in self.charges), {p: fn(a) for p, a in self.terms.items()}, f
        )

    def eps_limit(self) -> tuple[Optional[int], "FockVector"]:
        lowest = None
        limits = {}
        for p, a in self.items():
            v, lim = eps_limit(a)
            if v is not None and (lowest is None or v < lowest):
                lowest = v
            limits[p] = lim
        charges = tuple(eps_limit(x)[1] for x in self.charges)
        return lowest, FockVector(charges, limits, RATIONAL)

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "charges": [enc(x) for x in self.charges],
            "terms": [{"word": [-k for k in p.parts], "coef": enc(a)} for p, a in self.items()],
        }


def act_a(n: int, v: FockVector) -> FockVector:
    """a_n v."""
    f = v.field
    if n < 0:
        return v.like({_with_part(p, -n): a for p, a in v.terms.items()})
    if n == 0:
        return v.scale(v.charges[0])
    acc: dict = {}
    lam = v.charge(n)
    for p, a in v.terms.items():
        m = p.parts.count(n)
        if m:
            q = _without_part(p, n)
            acc[q] = acc.get(q, f.zero) + n * m * a
        if not f.is_zero(lam):
            acc[p] = acc.get(p, f.zero) + lam * a
    return v.like(acc)


def act_L_fock(n: int, v: FockVector, cfg: FockConfig) -> FockVector:
    """Free-field L_n v."""
    f = v.field
    out = v.like({})
    top = v.reach
    # :a_{n-j} a_j: with the larger index j on the right; a_j kills v for j > top
    for j in range(-(-n // 2), top + 1):
        w = act_a(n - j, act_a(j, v))
        if 2 * j == n:
            w = w.scale(f(Fraction(1, 2)))
        out = out + w
    if n != -1:
        out = out + act_a(n, v).scale(-(n + 1) * cfg.rho)
    return out


def act_L_word(word: Sequence[int], v: FockVector, cfg: FockConfig) -> FockVector:
    for n in reversed(tuple(word)):
        v = act_L_fock(n, v, cfg)
    return v


def delta_of_lambda(lam, rho, f: ScalarField = RATIONAL):
    """Δ(λ) = ½ λ(λ - 2ρ)."""
    lam, rho = f(lam), f(rho)
    return lam * (lam - 2 * rho) / f(2)


def lambda_for_delta(delta, cfg: FockConfig, root: int = 1):
    """λ = ρ ± sqrt(ρ² + 2Δ), principal square root; ``root`` picks the sign."""
    f = cfg.field
    disc = cfg.rho * cfg.rho + 2 * f(delta)
    return cfg.rho + root * f.sqrt(disc)


def Lambda_of_lambdas(lams: Sequence, rho, f: ScalarField = RATIONAL) -> tuple:
    """(Λ_r, ..., Λ_2r) of the irregular base vector with charges λ_0..λ_r."""
    lams = [f(x) for x in lams]
    rho = f(rho)
    r = len(lams) - 1
    if r >= 1 and f.is_zero(lams[r]):
        raise ZeroTopWeight(f"top charge λ_{r} vanishes")
    out = []
    for n in range(r, 2 * r + 1):
        acc = f.zero
        for k in range(max(0, n - r), min(n, r) + 1):
            acc += lams[n - k] * lams[k]
        acc = acc / f(2)
        if n == r:
            acc -= (r + 1) * rho * lams[r]
        out.append(acc)
    return tuple(out)


def fock_kind(charges: Sequence, cfg: FockConfig) -> ModuleKind:
    """The Virasoro module kind generated by the base vector with these charges."""
    f = cfg.field
    r = len(charges) - 1
    return irregular(r, Lambda_of_lambdas(charges, cfg.rho, f), cfg.c, f)


def module_to_fock(v: ModuleVector, charges: Sequence, cfg: FockConfig) -> FockVector:
    """Image of a (Verma or irregular) module vector under the free-field map."""
    f = cfg.field
    kind = fock_kind(charges, cfg)
    if (kind.variant, kind.rank, kind.weights, kind.c) != (v.kind.variant, v.kind.rank, v.kind.weights, v.kind.c):
        raise IncompatibleKinds("charges do not generate the module of this vector")
    base = FockVector.vacuum(charges, f)
    out = base.like({})
    for word, a in v.terms.items():
        out = out + act_L_word(word, base, cfg).scale(a)
    return out


def fock_dictionary(direction: str, v, cfg: FockConfig, lam=None, root: int = 1):
    """Verma <-> Fock isomorphism at generic weight.

    ``to_fock`` takes a Verma ModuleVector and returns its free-field image over
    |λ⟩, with λ from ``lam`` or ``lambda_for_delta``. ``to_verma`` inverts the
    map level by level against the images of the Verma basis.
    """
    f = cfg.field
    match direction:
        case "to_fock":
            if v.kind.variant != VERMA:
                raise IncompatibleKinds("the dictionary maps Verma modules only")
            lam = f(lam) if lam is not None else lambda_for_delta(v.kind.delta, cfg, root)
            if delta_of_lambda(lam, cfg.rho, f) != v.kind.delta:
                raise ValueError("Δ(λ) does not match the Verma weight")
            return module_to_fock(v, (lam,), cfg)
        case "to_verma":
            if v.rank != 0:
                raise IncompatibleKinds("only rank-0 Fock vectors correspond to Verma vectors")
            lam = v.charges[0]
            kind = verma(delta_of_lambda(lam, cfg.rho, f), cfg.c, f)
            terms: dict = {}
            for level in range(v.level + 1):
                part = v.at_level(level)
                if part.is_zero:
                    continue
                basis = enumerate_partitions(level)
                words = [verma_word(p) for p in basis]
                base = FockVector.vacuum((lam,), f)
                images = [act_L_word(w, base, cfg) for w in words]
                rows = [[img.coeff(mu) for img in images] for mu in basis]
                rhs = [part.coeff(mu) for mu in basis]
                x = solve_square(rows, rhs, f.domain, level)
                terms.update(zip(words, x))
                logger.debug("dictionary: level %d solved (%d unknowns)", level, len(words))
            return ModuleVector(kind, terms)
        case _:
            raise ValueError(f"unknown direction {direction!r}")


# --- exponential operators ---


def _exp_creation(weights: Mapping[int, Any], max_level: int, f: ScalarField) -> dict:
    """exp(Σ_n (x_n/n) a_{-n}) expanded over partitions up to ``max_level``.

    Returns partition -> Π_n x_n^{m_n} / (n^{m_n} m_n!).
    """
    out = {}
    for level in range(max_level + 1):
        for q in enumerate_partitions(level):
            mult = Counter(q.parts)
            w = f.one
            for n, m in mult.items():
                x = weights.get(n, f.zero)
                if f.is_zero(x):
                    w = f.zero
                    break
                w = w * x**m / f(n**m * factorial(m))
            if not f.is_zero(w):
                out[q] = w
    return out


def _substitute(v: FockVector, shift: Any, z) -> dict:
    """Expand a_{-j} -> a_{-j} - shift z^{-j} in every word.

    Returns (kept partition, removed level) -> coefficient; ``z`` is None for a
    formal variable (the removed level then records the power z^{-s}).
    """
    f = v.field
    out: dict = {}
    for p, a in v.terms.items():
        partial = {((), 0): a}
        for k in p.parts:
            step: dict = {}
            for (kept, s), c in partial.items():
                key = (kept + (k,), s)
                step[key] = step.get(key, f.zero) + c
                factor = -shift if z is None else -shift / z**k
                key = (kept, s + k)
                step[key] = step.get(key, f.zero) + c * factor
            partial = step
        for (kept, s), c in partial.items():
            key = (Partition(kept), s if z is None else 0)
            out[key] = out.get(key, f.zero) + c
    return out


def apply_exp_vo(lam_z, v: FockVector, order: int) -> PrefactoredSeries:
    """:e^{λ_z φ(z)}: v as z^{λ_zλ_0 - D} exp(-Σ λ_kλ_z/(k z^k)) Σ_m w_m z^m.

    D is the level of v. Coefficients live over the charges (λ_0 + λ_z, λ_1..λ_R).
    """
    f = v.field
    lam_z = f(lam_z)
    D = v.level
    charges = (v.charges[0] + lam_z,) + v.charges[1:]
    substituted = _substitute(v, lam_z, None)
    creation = _exp_creation({n: lam_z for n in range(1, order + 1)}, order, f)
    coeffs = []
    for m in range(order + 1):
        acc: dict = {}
        for (kept, s), c in substituted.items():
            need = m - D + s
            if need < 0:
                continue
            for q in enumerate_partitions(need):
                w = creation.get(q)
                if w is None:
                    continue
                key = _merge(kept, q)
                acc[key] = acc.get(key, f.zero) + c * w
        coeffs.append(FockVector(charges, acc, f))
    betas = tuple(-v.charge(k) * lam_z / f(k) for k in range(1, v.rank + 1))
    return PrefactoredSeries(lam_z * v.charges[0] - D, betas, tuple(coeffs), f)


def exp_vo_at_point(lam_z, v: FockVector, z, level_cap: int) -> FockVector:
    """:e^{λ_z φ(z)}: v at a point z of the field, without its scalar prefactor.

    The creation exponential is folded into the charges, λ_k -> λ_k + λ_z z^k
    for k <= level_cap; words are truncated at level_cap.
    """
    f = v.field
    lam_z, z = f(lam_z), f(z)
    charges = [v.charges[0] + lam_z] + [v.charge(k) + lam_z * z**k for k in range(1, max(level_cap, v.rank) + 1)]
    terms: dict = {}
    for (kept, _), c in _substitute(v, lam_z, z).items():
        if kept.size <= level_cap:
            terms[kept] = terms.get(kept, f.zero) + c
    return FockVector(tuple(charges), terms, f)


def rebase(v: FockVector, charges: Sequence, level: int) -> FockVector:
    """Re-express v over a base vector with the same λ_0 and other charges.

    Uses exp(Σ λ_k/k a_{-k}) = exp(Σ δ_k/k a_{-k}) exp(Σ λ'_k/k a_{-k}) with
    δ_k = λ_k - λ'_k; the result is truncated at ``level``.
    """
    f = v.field
    target = FockVector(tuple(charges), {}, f)
    if target.charges[0] != v.charges[0]:
        raise IncompatibleKinds("rebase keeps the zero-mode charge")
    top = max(v.rank, target.rank, level)
    deltas = {k: v.charge(k) - target.charge(k) for k in range(1, top + 1)}
    shift = _exp_creation(deltas, level, f)
    acc: dict = {}
    for p, a in v.terms.items():
        for q, w in shift.items():
            if p.size + q.size > level:
                continue
            key = _merge(p, q)
            acc[key] = acc.get(key, f.zero) + a * w
    return target.like(acc)
