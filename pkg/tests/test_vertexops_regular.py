from dataclasses import replace

import pytest

from errors import InsufficientOrder, MismatchAtOrder
from scalars import RATIONAL, complex_field
from vertexops.regular import (
    check_regular_relations,
    dual_regular_vo_coeffs,
    matrix_element,
    regular_vo_coeffs,
    vo_on_descendant,
)
from virasoro import ModuleVector, dual_verma

Q = RATIONAL

D1, D2, D3, C = Q("1/7"), Q("2/11"), Q("3/13"), Q("1/2")


@pytest.fixture(scope="module")
def vo():
    return regular_vo_coeffs(D1, D2, D3, C, 3)


def test_exponent_and_normalization(vo):
    assert vo.alpha == D3 - D2 - D1
    assert vo.order == 3
    assert vo.coeffs[0] == ModuleVector.cyclic(vo.target)


def test_first_coefficient(vo):
    assert vo.coeffs[1].coeff((-1,)) == (D3 + D2 - D1) / (2 * D3)


def test_relations_hold(vo):
    check_regular_relations(vo)


def test_relations_hold_over_complex_field(number_field):
    vo = regular_vo_coeffs("1/5", "1/3", "2/9", "3/4", 2, number_field)
    check_regular_relations(vo)


def test_complex_relations_still_catch_a_wrong_coefficient():
    f = complex_field()
    vo = regular_vo_coeffs("1/5", "1/3", "2/9", "3/4", 2, f)
    broken = replace(vo, coeffs=(vo.coeffs[0], vo.coeffs[1].scale(f("1.001")), vo.coeffs[2]))
    with pytest.raises(MismatchAtOrder):
        check_regular_relations(broken)


def test_dual_exponent_and_series_variable():
    dual = dual_regular_vo_coeffs(D3, D2, D1, C, 2)
    assert dual.dual
    assert dual.alpha == D3 - D2 - D1
    assert dual.series().alpha == -(D3 - D2 - D1)


def test_dual_coefficients_mirror_the_ket():
    dual = dual_regular_vo_coeffs(D3, D2, D1, C, 2)
    ket = regular_vo_coeffs(D3, D2, D1, C, 2)
    assert [v.terms for v in dual.coeffs] == [v.terms for v in ket.coeffs]


def test_empty_word_returns_the_operator(vo):
    s = vo_on_descendant(vo, ())
    assert s.alpha == vo.alpha
    assert list(s.coeffs) == list(vo.coeffs)


def test_three_point_function_on_first_descendant(vo):
    top = ModuleVector.cyclic(dual_verma(D3, C))
    s = matrix_element(top, vo_on_descendant(vo, (-1,), order=2))
    assert s.alpha == vo.alpha - 1
    assert s.coeffs[0] == D1 + D2 - D3


def test_primary_matrix_element_is_a_monomial(vo):
    top = ModuleVector.cyclic(dual_verma(D3, C))
    s = matrix_element(top, vo.series())
    assert s.coeffs[0] == Q(1)
    assert all(c == 0 for c in s.coeffs[1:])


def test_descendant_past_solved_order(vo):
    with pytest.raises(InsufficientOrder):
        vo_on_descendant(vo, (-1,), order=4)


def test_descendant_rejects_raising_operators(vo):
    with pytest.raises(ValueError):
        vo_on_descendant(vo, (1,))
