import mpmath
import pytest

from errors import GammaPole
from painleve.gamma_ratios import g_ratio, structure_constant_ratio

VI = {"theta_0": "1/3", "theta_t": "1/4", "theta_1": "1/5", "theta_inf": "1/6", "sigma": "3/10"}
V = {"theta": "1/3", "theta_t": "2/5", "theta_0": "1/7", "eta": "1", "beta": "2/9"}
IV = {"theta_star": "1/5", "theta_t": "2/5", "beta": "2/9"}


def close(a, b, digits=40):
    return mpmath.almosteq(a, b, rel_eps=mpmath.mpf(10) ** -digits)


def test_zero_shift_is_one():
    assert g_ratio(mpmath.mpf("0.3"), 0) == 1
    for kind, params in (("VI_at_0", VI), ("V_at_infty", V), ("IV_at_infty", IV)):
        assert structure_constant_ratio(kind, params, 0) == 1


def test_single_step_is_gamma():
    with mpmath.workdps(60):
        x = mpmath.mpf(1) / 3
        assert close(g_ratio(1 + x, 1), mpmath.gamma(1 + x))


@pytest.mark.parametrize("n", [-3, -1, 2, 4])
def test_against_barnes_g(n):
    with mpmath.workdps(60):
        a = mpmath.mpf(7) / 3
        assert close(g_ratio(a, n), mpmath.barnesg(a + n) / mpmath.barnesg(a))


def c_vi(t0, tt, t1, tinf, s):
    G = mpmath.barnesg
    num = mpmath.mpf(1)
    for e in (1, -1):
        for e2 in (1, -1):
            num *= G(1 + tt + e * t0 + e2 * s) * G(1 + t1 + e * tinf + e2 * s)
    return num / (G(1 + 2 * s) * G(1 - 2 * s))


@pytest.mark.parametrize("n", [-1, 1, 2])
def test_vi_ratio_against_direct_constant(n):
    with mpmath.workdps(60):
        t0, tt, t1, tinf, s = (mpmath.mpf(1) / 3, mpmath.mpf(1) / 4, mpmath.mpf(1) / 5, mpmath.mpf(1) / 6, mpmath.mpf(3) / 10)
        want = c_vi(t0, tt, t1, tinf, s + n) / c_vi(t0, tt, t1, tinf, s)
        assert close(structure_constant_ratio("VI_at_0", VI, n), want)


def test_vi_at_infinity_swaps_theta_t_and_theta_1():
    swapped = dict(VI, theta_t=VI["theta_1"], theta_1=VI["theta_t"])
    assert structure_constant_ratio("VI_at_infty", VI, 1) == structure_constant_ratio("VI_at_0", swapped, 1)


@pytest.mark.parametrize("kind, params, shifted", [("V_at_infty", V, "11/9"), ("IV_at_infty", IV, "11/9")])
def test_ratios_compose(kind, params, shifted):
    with mpmath.workdps(60):
        two = structure_constant_ratio(kind, params, 2)
        step = structure_constant_ratio(kind, params, 1) * structure_constant_ratio(kind, dict(params, beta=shifted), 1)
        assert close(two, step)


def test_pole_is_reported():
    params = dict(V, theta_t="1/4", beta="1/4")
    with pytest.raises(GammaPole):
        structure_constant_ratio("V_at_infty", params, 1)


def test_unknown_kind():
    with pytest.raises(ValueError):
        structure_constant_ratio("III", {}, 1)
