import pytest

from combinatorics import EMPTY, Partition
from errors import IncompatibleKinds, ZeroTopWeight
from heisenberg import (
    FockConfig,
    FockVector,
    Lambda_of_lambdas,
    act_a,
    act_L_fock,
    act_L_word,
    apply_exp_vo,
    delta_of_lambda,
    fock_dictionary,
    lambda_for_delta,
    module_to_fock,
)
from scalars import RATIONAL
from virasoro import ModuleVector, verma

Q = RATIONAL


@pytest.fixture
def cfg():
    return FockConfig(Q("1/6"))


def test_central_charge_from_background_charge(cfg):
    assert cfg.c == 1 - 12 * Q("1/36")


def test_conformal_weight_of_charge():
    assert delta_of_lambda(Q(3), Q("1/2")) == Q(3)
    assert lambda_for_delta(2, FockConfig(Q(0))) == Q(2)


def test_heisenberg_commutator():
    v = FockVector((Q("1/3"),), {Partition((2, 1)): Q(1)})
    lhs = act_a(2, act_a(-2, v)) - act_a(-2, act_a(2, v))
    assert lhs == v.scale(Q(2))


def test_L0_on_charged_vacuum(cfg):
    lam = Q("2/5")
    v = FockVector.vacuum((lam,))
    assert act_L_fock(0, v, cfg) == v.scale(delta_of_lambda(lam, cfg.rho))


@pytest.mark.parametrize("m, n", [(1, -1), (2, -2), (2, -1), (3, -3)])
def test_free_field_virasoro_algebra(cfg, m, n):
    v = FockVector((Q("3/7"),), {Partition((2, 1)): Q(1), Partition((1,)): Q("1/2")})
    bracket = act_L_word((m, n), v, cfg) - act_L_word((n, m), v, cfg)
    want = act_L_fock(m + n, v, cfg).scale(Q(m - n))
    if m + n == 0:
        want = want + v.scale(cfg.c * Q(m**3 - m) / 12)
    assert bracket == want


def test_rank_one_weights():
    c0, c1, rho = Q("1/2"), Q("3/5"), Q("1/7")
    assert Lambda_of_lambdas((c0, c1), rho) == (c1 * (c0 - 2 * rho), c1 * c1 / 2)


def test_zero_top_charge():
    with pytest.raises(ZeroTopWeight):
        Lambda_of_lambdas((Q(1), Q(0)), Q(0))


def test_irregular_base_vector_is_eigenvector(cfg):
    lams = (Q("1/2"), Q("3/5"))
    v = FockVector.vacuum(lams)
    Lambda = Lambda_of_lambdas(lams, cfg.rho)
    assert act_L_fock(1, v, cfg) == v.scale(Lambda[0])
    assert act_L_fock(2, v, cfg) == v.scale(Lambda[1])


def test_dictionary_round_trip(cfg):
    lam = Q("2/3")
    kind = verma(delta_of_lambda(lam, cfg.rho), cfg.c)
    v = ModuleVector(kind, {(-2,): Q(3), (-1, -1): Q("1/2"), (-1,): Q(1)})
    image = fock_dictionary("to_fock", v, cfg, lam=lam)
    assert fock_dictionary("to_verma", image, cfg) == v


def test_module_to_fock_checks_charges(cfg):
    kind = verma(Q("1/9"), cfg.c)
    with pytest.raises(IncompatibleKinds):
        module_to_fock(ModuleVector.cyclic(kind), (Q(5),), cfg)


def test_exponential_operator_on_vacuum():
    lam0, lam_z = Q("1/3"), Q("1/2")
    s = apply_exp_vo(lam_z, FockVector.vacuum((lam0,)), 2)
    assert s.alpha == lam_z * lam0
    assert s.coeffs[0].coeff(EMPTY) == 1
    assert s.coeffs[1].coeff(Partition((1,))) == lam_z
    assert s.coeffs[0].charges == (lam0 + lam_z,)
