import pytest

from errors import IncompatibleKinds
from scalars import RATIONAL
from virasoro import (
    ModuleVector,
    act,
    act_dual,
    act_word,
    central_charge,
    irregular,
    kac_determinant,
    kac_weight,
    pair,
    reduce_word,
    shapovalov,
    vacuum,
    verma,
)

Q = RATIONAL


def test_shapovalov_levels_one_and_two(rand_q):
    delta, c = Q(rand_q()), Q(rand_q())
    assert shapovalov(delta, c, 1) == [[2 * delta]]
    assert shapovalov(delta, c, 2) == [
        [4 * delta + c / 2, 6 * delta],
        [6 * delta, 4 * delta * (2 * delta + 1)],
    ]


@pytest.mark.parametrize("r, s", [(1, 2), (2, 1), (1, 3)])
def test_kac_determinant_vanishes_at_degenerate_weights(r, s):
    t = Q("3/5")
    level = r * s
    assert kac_determinant(kac_weight(r, s, t), central_charge(t), level) == 0


def test_kac_determinant_is_generic_elsewhere():
    t = Q("3/5")
    assert kac_determinant(Q("2/9"), central_charge(t), 2) != 0


def test_commutators_on_highest_weight(rand_q):
    delta, c = Q(rand_q()), Q(rand_q())
    kind = verma(delta, c)
    cyc = ModuleVector.cyclic(kind)
    assert act(1, act(-1, cyc)) == cyc.scale(2 * delta)
    assert act(2, act(-2, cyc)) == cyc.scale(4 * delta + c / 2)
    assert act(1, cyc).is_zero


def test_reordering_to_canonical_words():
    kind = verma(Q("1/3"), Q("1/2"))
    v = reduce_word((-1, -2), kind)
    # L_{-1} L_{-2} = L_{-2} L_{-1} + L_{-3}
    assert v.coeff((-2, -1)) == 1
    assert v.coeff((-3,)) == 1


def test_irregular_cyclic_vector_eigenvalues():
    lam1, lam2 = Q("2/3"), Q("5/7")
    kind = irregular(1, (lam1, lam2), Q(1))
    cyc = ModuleVector.cyclic(kind)
    assert act(1, cyc) == cyc.scale(lam1)
    assert act(2, cyc) == cyc.scale(lam2)
    assert act(3, cyc).is_zero
    assert act(0, cyc).coeff((0,)) == 1


def test_vacuum_is_translation_invariant():
    cyc = ModuleVector.cyclic(vacuum(Q(1)))
    assert act(-1, cyc).is_zero
    assert not act(-2, cyc).is_zero


def test_pairing_is_adjoint():
    kind = verma(Q("4/11"), Q("3/7"))
    u = ModuleVector.basis(kind.mirrored(), (-2,))
    v = ModuleVector.basis(kind, (-1,))
    assert pair(act_dual(-1, u), v) == pair(u, act(-1, v))


def test_pairing_normalization_and_level_mismatch():
    kind = verma(Q("4/11"), Q("3/7"))
    dual = kind.mirrored()
    assert pair(ModuleVector.cyclic(dual), ModuleVector.cyclic(kind)) == 1
    assert pair(ModuleVector.basis(dual, (-2,)), ModuleVector.basis(kind, (-1, -1))) == 6 * Q("4/11")
    assert pair(ModuleVector.cyclic(dual), ModuleVector.basis(kind, (-1,))) == 0


def test_rank_one_dual_against_verma():
    kind = verma(Q("1/5"), Q(1))
    dual = irregular(1, (Q("2/3"), Q("1/4")), Q(1), dual=True)
    # <Λ|L_{-1}|Δ> = Λ_1, <Λ|L_{-2}|Δ> = Λ_2, <Λ|L_{-3}|Δ> = 0
    assert pair(ModuleVector.cyclic(dual), ModuleVector.basis(kind, (-1,))) == Q("2/3")
    assert pair(ModuleVector.cyclic(dual), ModuleVector.basis(kind, (-2,))) == Q("1/4")
    assert pair(ModuleVector.cyclic(dual), ModuleVector.basis(kind, (-3,))) == 0


def test_incompatible_pairings():
    a = verma(Q("1/3"), Q(1))
    b = verma(Q("1/2"), Q(1))
    with pytest.raises(IncompatibleKinds):
        pair(ModuleVector.cyclic(a.mirrored()), ModuleVector.cyclic(b))
    with pytest.raises(IncompatibleKinds):
        act_dual(1, ModuleVector.cyclic(a))


@pytest.mark.parametrize(
    "bra, ket",
    [
        (irregular(1, (Q("2/3"), Q("1/4")), Q(1), dual=True), vacuum(Q(1))),
        (irregular(2, (Q("1/5"), Q(0), Q("1/4")), Q(1), dual=True), verma(Q("1/3"), Q(1))),
        (vacuum(Q(1), dual=True), irregular(1, (Q("2/3"), Q("1/4")), Q(1))),
        (verma(Q("1/3"), Q(1), dual=True), irregular(2, (Q("1/5"), Q(0), Q("1/4")), Q(1))),
    ],
)
def test_mismatched_module_kinds_do_not_pair(bra, ket):
    with pytest.raises(IncompatibleKinds, match="no pairing"):
        pair(ModuleVector.cyclic(bra), ModuleVector.cyclic(ket))


def test_matching_module_kinds_pair():
    bra = ModuleVector.cyclic(irregular(2, (Q("1/5"), Q(0), Q("1/4")), Q(1), dual=True))
    assert pair(bra, ModuleVector.cyclic(vacuum(Q(1)))) == 1
    bra = ModuleVector.cyclic(verma(Q("1/3"), Q(1), dual=True))
    assert pair(bra, ModuleVector.cyclic(irregular(1, (Q("2/3"), Q("1/4")), Q(1)))) == 1


def test_word_action_matches_repeated_action():
    kind = verma(Q("1/3"), Q("1/2"))
    cyc = ModuleVector.cyclic(kind)
    assert act_word((1, -2), cyc) == act(1, act(-2, cyc))
