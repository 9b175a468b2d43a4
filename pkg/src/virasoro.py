"""Virasoro modules in a canonical word basis.

A word is a tuple of generator indices ``(n_1, ..., n_k)`` with
``n_1 <= ... <= n_k``; it stands for ``L_{n_1} ... L_{n_k}`` applied to the
cyclic vector, rightmost generator first.

Every module here is cyclic over a vector on which a window of generators acts
by scalars: a Verma module is the rank-0 case (``L_0 = Δ``), a rank-r
irregular module has ``L_n = Λ_n`` for ``r <= n <= 2r`` and free generators
``n <= r - 1``. The vacuum module is free in ``n <= -2`` and killed by
``n >= -1``.

Dual vectors are stored mirrored under ``L_n -> L_{-n}``: the dual vector
``<cyc| L_{-m_k} ... L_{-m_1}`` is kept as the word ``(m_1, ..., m_k)`` of the
same-shaped module, so one reduction routine serves both sides.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator, Mapping, Optional, Sequence

from combinatorics import Partition, enumerate_partitions
from errors import IncompatibleKinds
from linalg import det
from parallel import ordered_map
from scalars import RATIONAL, ScalarField, scalar_from_json, scalar_to_json

logger = logging.getLogger(__name__)

VERMA, IRREGULAR, VACUUM = "verma", "irregular", "vacuum"

Word = tuple[int, ...]


@dataclass(frozen=True)
class ModuleKind:
    variant: str
    c: Any
    rank: int = 0
    # Λ_r .. Λ_2r for kets; for dual kinds the values of Λ_{-r} .. Λ_{-2r}.
    weights: tuple = ()
    dual: bool = False
    field: ScalarField = field(default=RATIONAL, compare=False)

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        if self.variant == VACUUM:
            if self.weights or self.rank:
                raise ValueError("the vacuum module carries no weights")
        elif len(self.weights) != self.rank + 1:
            raise ValueError(f"rank {self.rank} needs {self.rank + 1} weights, got {len(self.weights)}")

    @property
    def free_max(self) -> int:
        """Largest generator index that acts freely on the cyclic vector."""
        if self.variant == VACUUM:
            return -2
        return self.rank - 1

    @property
    def delta(self):
        if self.variant != VERMA:
            raise TypeError(f"{self.variant} module has no highest weight")
        return self.weights[0]

    def eigenvalue(self, n: int):
        """Scalar by which a non-free L_n acts on the cyclic vector."""
        if self.variant == VACUUM or n > 2 * self.rank:
            return self.field.zero
        return self.weights[n - self.rank]

    def mirrored(self) -> "ModuleKind":
        return ModuleKind(self.variant, self.c, self.rank, self.weights, not self.dual, self.field)

    def depth(self, word: Word) -> int:
        """Σ (r - n_i); the level for Verma and vacuum words."""
        return sum(self.rank - n for n in word)

    def is_canonical(self, word: Word) -> bool:
        return all(n <= self.free_max for n in word) and all(a <= b for a, b in zip(word, word[1:]))

    def words_of_depth(self, d: int) -> list[Word]:
        """Canonical words of the given depth, in partition enumeration order."""
        out = []
        for p in enumerate_partitions(d):
            if self.variant == VACUUM and any(q < 2 for q in p):
                continue
            out.append(tuple(self.rank - q for q in p))
        return out

    def to_json(self) -> dict:
        enc = lambda x: scalar_to_json(x, self.field)
        return {
            "variant": self.variant,
            "dual": self.dual,
            "rank": self.rank,
            "c": enc(self.c),
            "weights": [enc(w) for w in self.weights],
        }


def verma(delta, c, f: ScalarField = RATIONAL, dual: bool = False) -> ModuleKind:
    return ModuleKind(VERMA, f(c), 0, (f(delta),), dual, f)


def dual_verma(delta, c, f: ScalarField = RATIONAL) -> ModuleKind:
    return verma(delta, c, f, dual=True)


def irregular(r: int, weights: Sequence, c, f: ScalarField = RATIONAL, dual: bool = False) -> ModuleKind:
    if r == 0:
        return verma(weights[0], c, f, dual)
    return ModuleKind(IRREGULAR, f(c), r, tuple(f(w) for w in weights), dual, f)


def dual_irregular(r: int, weights: Sequence, c, f: ScalarField = RATIONAL) -> ModuleKind:
    return irregular(r, weights, c, f, dual=True)


def vacuum(c, f: ScalarField = RATIONAL, dual: bool = False) -> ModuleKind:
    return ModuleKind(VACUUM, f(c), 0, (), dual, f)


def _accumulate(acc: dict, word: Word, coef) -> None:
    if word in acc:
        acc[word] = acc[word] + coef
    else:
        acc[word] = coef


@lru_cache(maxsize=None)
def _apply(kind: ModuleKind, n: int, word: Word) -> tuple[tuple[Word, Any], ...]:
    """L_n on a canonical basis word, as canonical (word, coefficient) pairs."""
    f = kind.field
    if not word:
        if n <= kind.free_max:
            return (((n,), f.one),)
        w = kind.eigenvalue(n)
        return () if f.is_zero(w) else (((), w),)
    h, rest = word[0], word[1:]
    if n <= kind.free_max and n <= h:
        return (((n,) + word, f.one),)
    # L_n L_h R = L_h (L_n R) + (n - h) L_{n+h} R + (c/12)(n^3 - n) δ_{n+h,0} R
    acc: dict = {}
    for u, a in _apply(kind, n, rest):
        for u2, b in _apply(kind, h, u):
            _accumulate(acc, u2, a * b)
    if n != h:
        for u, a in _apply(kind, n + h, rest):
            _accumulate(acc, u, (n - h) * a)
    if n + h == 0 and n * n != 1 and n != 0:
        _accumulate(acc, rest, kind.c * f(Fraction(n**3 - n, 12)))
    return tuple((u, a) for u, a in acc.items() if not f.is_zero(a))


def clear_caches() -> None:
    _apply.cache_clear()


@dataclass(frozen=True, eq=False)
class ModuleVector:
    kind: ModuleKind
    terms: Mapping[Word, Any] = field(default_factory=dict)

    def __post_init__(self):
        f = self.kind.field
        object.__setattr__(
            self, "terms", {tuple(w): a for w, a in self.terms.items() if not f.is_zero(a)}
        )

    @classmethod
    def cyclic(cls, kind: ModuleKind) -> "ModuleVector":
        return cls(kind, {(): kind.field.one})

    @classmethod
    def basis(cls, kind: ModuleKind, word: Sequence[int]) -> "ModuleVector":
        word = tuple(word)
        if not kind.is_canonical(word):
            raise ValueError(f"{word} is not a canonical word of {kind.variant} rank {kind.rank}")
        return cls(kind, {word: kind.field.one})

    @classmethod
    def zero(cls, kind: ModuleKind) -> "ModuleVector":
        return cls(kind, {})

    def _check(self, other: "ModuleVector") -> None:
        if other.kind != self.kind:
            raise IncompatibleKinds("vectors live in different modules")

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        acc = dict(self.terms)
        for w, a in other.terms.items():
            _accumulate(acc, w, a)
        return ModuleVector(self.kind, acc)

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.kind, {w: -a for w, a in self.terms.items()})

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        return self + (-other)

    def scale(self, s) -> "ModuleVector":
        return ModuleVector(self.kind, {w: s * a for w, a in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.kind == other.kind and self.terms == other.terms

    def __repr__(self) -> str:
        f = self.kind.field
        body = " + ".join(f"({f.to_str(a)}){list(w)}" for w, a in self.items()) or "0"
        return f"ModuleVector[{self.kind.variant}{'*' if self.kind.dual else ''}]({body})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def vanishes(self, *others: "ModuleVector") -> bool:
        """Zero up to the field's working precision, relative to the largest coefficient of ``others``."""
        f = self.kind.field
        if f.exact:
            return self.is_zero
        size = max((abs(f.to_mpc(a)) for v in others for a in v.terms.values()), default=1)
        return all(f.negligible(a, size) for a in self.terms.values())

    def coeff(self, word: Sequence[int]):
        return self.terms.get(tuple(word), self.kind.field.zero)

    def items(self) -> Iterator[tuple[Word, Any]]:
        return iter(sorted(self.terms.items(), key=lambda t: (self.kind.depth(t[0]), t[0])))

    @property
    def max_depth(self) -> int:
        return max((self.kind.depth(w) for w in self.terms), default=0)

    def map_coeffs(self, fn, kind: Optional[ModuleKind] = None) -> "ModuleVector":
        return ModuleVector(kind or self.kind, {w: fn(a) for w, a in self.terms.items()})

    def to_json(self) -> dict:
        f = self.kind.field
        return {
            "kind": self.kind.to_json(),
            "terms": [{"word": list(w), "coef": scalar_to_json(a, f)} for w, a in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict, kind: ModuleKind) -> "ModuleVector":
        return cls(kind, {tuple(t["word"]): scalar_from_json(t["coef"], kind.field) for t in data["terms"]})


def act(n: int, v: ModuleVector) -> ModuleVector:
    """L_n v."""
    acc: dict = {}
    for w, a in v.terms.items():
        for u, b in _apply(v.kind, n, w):
            _accumulate(acc, u, a * b)
    return ModuleVector(v.kind, acc)


def act_word(word: Sequence[int], v: ModuleVector) -> ModuleVector:
    for n in reversed(tuple(word)):
        v = act(n, v)
    return v


def reduce_word(word: Sequence[int], kind: ModuleKind) -> ModuleVector:
    """Canonical expansion of ``L_{word}`` applied to the cyclic vector of ``kind``."""
    return act_word(word, ModuleVector.cyclic(kind))


def act_dual(n: int, u: ModuleVector) -> ModuleVector:
    """Right action ``<u| L_n`` on a (mirrored) dual vector."""
    if not u.kind.dual:
        raise IncompatibleKinds("act_dual needs a dual vector")
    return act(-n, u)


# --- pairings ---


# (dual variant, dual rank, ket variant, ket rank) with a finite pairing
PAIRINGS = frozenset(
    {
        (VERMA, 0, IRREGULAR, 1),
        (VACUUM, 0, IRREGULAR, 2),
        (IRREGULAR, 1, VERMA, 0),
        (IRREGULAR, 2, VACUUM, 0),
    }
)


def _compatible(du: ModuleKind, kv: ModuleKind) -> bool:
    key = (du.variant, du.rank, kv.variant, kv.rank)
    if key == (VERMA, 0, VERMA, 0):
        return du.weights == kv.weights
    return key in PAIRINGS


def _dual_value(du: ModuleKind, word: Word):
    """<cyc| L_{word} |...> evaluated from the left on a canonical ket word."""
    f = du.field
    if du.variant == VACUUM:
        if not word:
            return f.one
        if word[0] <= 1:
            return f.zero
        raise IncompatibleKinds(f"dual vacuum cannot absorb L_{word[0]}")
    r = du.rank
    acc = f.one
    for n in word:
        k = -n
        if k > 2 * r:
            return f.zero
        if k < r:
            raise IncompatibleKinds(f"dual cyclic vector of rank {r} cannot absorb L_{n}")
        acc = acc * du.weights[k - r]
    return acc


def pair(u: ModuleVector, v: ModuleVector):
    """<u|v> for a mirrored dual vector u and a ket v, normalized by <cyc|cyc> = 1."""
    du, kv = u.kind, v.kind
    if not du.dual or kv.dual:
        raise IncompatibleKinds("pair(u, v) needs a dual u and a ket v")
    if du.c != kv.c:
        raise IncompatibleKinds("central charges differ")
    if not _compatible(du, kv):
        raise IncompatibleKinds(
            f"no pairing between dual {du.variant} rank {du.rank} and {kv.variant} rank {kv.rank}"
        )
    f = kv.field
    total = f.zero
    for mw, a in u.terms.items():
        w = v
        for m in mw:
            w = act(-m, w)
            if w.is_zero:
                break
        for word, b in w.terms.items():
            val = _dual_value(du, word)
            if not f.is_zero(val):
                total += a * b * val
    return total


# --- Gram matrices and Kac weights ---


def verma_word(p: Partition) -> Word:
    """L_{-p_1} ... L_{-p_k} as a canonical word."""
    return tuple(-q for q in p.parts)


def shapovalov(delta, c, level: int, f: ScalarField = RATIONAL, threads: int = 1) -> list[list]:
    """Gram matrix <Δ| L_μ L_{-ν} |Δ> over partitions of ``level`` (enumeration order)."""
    kind = verma(delta, c, f)
    dual = kind.mirrored()
    words = [verma_word(p) for p in enumerate_partitions(level)]
    kets = [ModuleVector.basis(kind, w) for w in words]
    row = lambda mu: [pair(ModuleVector.basis(dual, mu), ket) for ket in kets]
    return ordered_map(row, words, threads)


def kac_determinant(delta, c, level: int, f: ScalarField = RATIONAL):
    return det(shapovalov(delta, c, level, f), f.domain)


def central_charge(t, f: ScalarField = RATIONAL):
    """c = 13 + 6(t + 1/t), with t = b^2."""
    t = f(t)
    return f(13) + 6 * (t + f.one / t)


def kac_weight(r: int, s: int, t, f: ScalarField = RATIONAL):
    """Δ_{r,s} = ((1 - r^2) t + (1 - s^2)/t + 2 - 2rs) / 4 at c = central_charge(t)."""
    t = f(t)
    return ((1 - r * r) * t + (1 - s * s) * (f.one / t) + f(2 - 2 * r * s)) / f(4)
