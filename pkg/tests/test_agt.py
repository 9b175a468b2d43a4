import pytest

from agt import (
    BlockParams,
    block_series_agt,
    combinatorial_sum,
    crosscheck_block,
    descendant_block_series,
    nekrasov_pair_weight,
    verma_block_series,
)
from combinatorics import EMPTY, Partition
from errors import MismatchAtOrder, ZeroDenominator
from scalars import RATIONAL

Q = RATIONAL


@pytest.fixture
def params():
    return BlockParams("1/3", "2/7", "3/11", "5/13", "3/8")


def test_exponent(params):
    assert params.exponent == Q("3/8") ** 2 - Q("1/3") ** 2 - Q("2/7") ** 2
    assert block_series_agt(params, 2).alpha == params.exponent


def test_empty_pair_weight(params):
    assert nekrasov_pair_weight(EMPTY, EMPTY, params) == Q(1)
    assert combinatorial_sum(params, 0) == [Q(1)]


def test_first_order_against_verma(params):
    p = params
    s2 = p.sigma**2
    want = (s2 + p.theta_t**2 - p.theta_0**2) * (s2 + p.theta_1**2 - p.theta_inf**2) / (2 * s2)
    assert verma_block_series(p, 1).coeffs[1] == want
    assert block_series_agt(p, 1).coeffs[1] == want
    # the bare Young-diagram sum still carries the (1-t)^{-2θ_tθ_1} factor
    assert combinatorial_sum(p, 1)[1] == want + 2 * p.theta_t * p.theta_1


def test_verma_and_descendant_routes_agree(params):
    assert verma_block_series(params, 3).coeffs == descendant_block_series(params, 3).coeffs


def test_crosscheck_to_order_three(params):
    report = crosscheck_block(params, 3)
    assert report.verdict == "match"
    assert report.agt.coeffs[0] == Q(1)
    assert len(report.to_json()["agt"]) == 4


def test_crosscheck_is_thread_independent(params):
    assert crosscheck_block(params, 2).to_json() == crosscheck_block(params, 2, threads=4).to_json()


def test_shifted_intermediate_weight_fails_at_first_order(params):
    with pytest.raises(MismatchAtOrder) as err:
        crosscheck_block(params, 2, delta_shift=1)
    assert err.value.order == 1


def test_zero_denominator_at_vanishing_sigma():
    p = BlockParams("1/3", "2/7", "3/11", "5/13", 0)
    with pytest.raises(ZeroDenominator):
        nekrasov_pair_weight(Partition((1,)), EMPTY, p)


@pytest.mark.slow
def test_crosscheck_to_order_five(params):
    assert crosscheck_block(params, 5).verdict == "match"


def test_crosscheck_at_random_points(rand_q):
    for _ in range(3):
        sigma = rand_q()
        while (2 * sigma).denominator == 1:
            sigma = rand_q()
        p = BlockParams(rand_q(), rand_q(), rand_q(), rand_q(), sigma)
        assert crosscheck_block(p, 4).verdict == "match"
