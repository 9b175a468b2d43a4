import pytest

from errors import InsufficientOrder
from heisenberg import FockConfig, delta_of_lambda
from scalars import RATIONAL
from vertexops.rearranged import (
    ExpOperator,
    binomial,
    check_reexpansion,
    compose_rearranged,
    reexpand,
    rising,
)
from vertexops.regular import regular_vo_coeffs

Q = RATIONAL

C = Q("1/2")


@pytest.fixture(scope="module")
def pair_of_operators():
    inner = regular_vo_coeffs("1/7", "2/11", "3/13", C, 2)
    outer = regular_vo_coeffs("3/13", "1/5", "2/9", C, 2)
    return outer, inner


def test_rising_and_binomial():
    A = Q("2/3")
    assert rising(A, 0, Q) == Q(1)
    assert rising(A, 2, Q) == A * (A + 1) / 2
    assert binomial(A, 2, Q) == A * (A - 1) / 2
    assert binomial(Q(2), 3, Q) == Q(0)


def test_zero_exponent_keeps_the_direct_product(pair_of_operators):
    outer, inner = pair_of_operators
    exp = compose_rearranged(outer, inner, 0, 2)
    for k in range(3):
        assert list(exp.coeffs[k].coeffs) == list(exp.direct[k])


def test_regular_route_reexpands(pair_of_operators):
    outer, inner = pair_of_operators
    exp = compose_rearranged(outer, inner, "1/3", 2, verify=False)
    assert exp.order == 2
    assert exp.alpha_z == outer.alpha
    assert exp.alpha_w == inner.alpha
    check_reexpansion(exp)
    assert len(reexpand(exp)) == 3


def test_first_rearranged_coefficient(pair_of_operators):
    outer, inner = pair_of_operators
    A = Q("1/3")
    exp = compose_rearranged(outer, inner, A, 1)
    R1 = exp.coeffs[1]
    for j in range(outer.order + 1):
        assert R1.coeffs[j] == exp.direct[1][j] + exp.direct[0][j].scale(A)


def test_exponential_route():
    cfg = FockConfig(Q("1/6"))
    lam, beta = Q("2/5"), Q("1/3")
    inner = regular_vo_coeffs(
        delta_of_lambda(lam, cfg.rho), Q("1/4"), delta_of_lambda(lam + beta, cfg.rho), cfg.c, 2
    )
    outer = ExpOperator(Q("1/2"), Q(3), 2)
    exp = compose_rearranged(outer, inner, "2/7", 2, cfg, (lam + beta,))
    assert exp.point == Q(3)
    assert exp.alpha_z == Q("1/2") * (lam + beta)
    assert exp.betas_z == ()


def test_exponential_route_needs_charges(pair_of_operators):
    _, inner = pair_of_operators
    with pytest.raises(ValueError):
        compose_rearranged(ExpOperator(Q(1), Q(2), 1), inner, 0, 1)


def test_order_beyond_inner(pair_of_operators):
    outer, inner = pair_of_operators
    with pytest.raises(InsufficientOrder):
        compose_rearranged(outer, inner, 0, 3)
