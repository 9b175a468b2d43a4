import mpmath
import pytest

from errors import ConfigError, ResidualTooLarge, TauVanishes
from painleve.sigma_forms import (
    Residual,
    SigmaForm,
    form_for,
    log_derivatives,
    sigma_from_tau,
    sigma_ode_residual,
)
from painleve.tau import TauMode, TauSeries, TauSpec, TauValue, default_point, tau_series
from scalars import RATIONAL, PrefactoredSeries

Q = RATIONAL

VI = {"theta_0": "1/3", "theta_t": "1/4", "theta_1": "1/5", "theta_inf": "1/6"}
V = {"theta": "1/3", "theta_0": "1/7", "theta_t": "2/5", "eta": "2"}
IV = {"theta_star": "1/5", "theta_t": "2/5"}


def tiny(x, digits=40):
    return abs(x) < mpmath.mpf(10) ** -digits


def test_constant_sigma_solves_e_vi():
    res = sigma_ode_residual(SigmaForm("E_VI", VI), lambda t: (mpmath.mpf("0.7"), 0, 0), "1/3")
    assert tiny(res.value)
    assert mpmath.almosteq(res.truncation, res.scale * mpmath.mpf(10) ** -50)
    res.check()


def test_zero_sigma_in_e_iv():
    assert SigmaForm("E_IV", IV)(0, 0, 0, mpmath.mpf(2)) == 0


def test_zero_sigma_in_e_v():
    with mpmath.workdps(60):
        form = SigmaForm("E_V", V)
        theta, t0, tt = mpmath.mpf(1) / 3, mpmath.mpf(1) / 7, mpmath.mpf(2) / 5
        want = (theta**2 - 4 * t0**2) * (theta**2 - 4 * tt**2) / 4
        assert tiny(form(0, 0, 0, mpmath.mpf(3)) - want)


@pytest.fixture
def sample_point():
    # arbitrary values of (F, F', F'', s): the pull-backs are polynomial identities
    return mpmath.mpc("0.3", "0.1"), mpmath.mpf("-0.7"), mpmath.mpc("1.1", "-0.4"), mpmath.mpc("2.5", "0.5")


def test_tilde_v_is_the_pulled_back_e_v(sample_point):
    with mpmath.workdps(60):
        F, F1, F2, s = sample_point
        z2 = mpmath.mpf(1) / 2
        eta, theta = mpmath.mpf(2), mpmath.mpf(1) / 3
        u = s - z2
        sigma = -(theta**2) / 2 - theta * eta * u / 2 + u * F
        s1 = -theta / 2 + (F + u * F1) / eta
        s2 = (2 * F1 + u * F2) / eta**2
        plain = SigmaForm("E_V", V)(sigma, s1, s2, eta * u)
        tilde = SigmaForm("Etilde_V", V, z_2="1/2")(-F, -F1, -F2, s)
        assert tiny(tilde + eta**4 * plain)


def test_tilde_iv_is_the_pulled_back_e_iv(sample_point):
    with mpmath.workdps(60):
        F, F1, F2, s = sample_point
        tt = mpmath.mpf(2) / 5
        plain = SigmaForm("E_IV", IV)(tt * s + F, tt + F1, F2, s)
        tilde = SigmaForm("Etilde_IV", IV)(-F, -F1, -F2, s)
        assert tiny(tilde - plain)


def test_log_derivatives_of_an_exponential():
    a = mpmath.mpf(3)
    assert log_derivatives([1, a, a**2, a**3]) == (a, 0, 0)


def test_log_derivatives_need_nonzero_tau():
    with pytest.raises(TauVanishes):
        log_derivatives([0, 1, 1, 1])


def test_sigma_from_tau_iv():
    value = TauValue(mpmath.mpf(2), [1, mpmath.mpf(3), 9, 27], 0)
    sigma, s1, s2, t = sigma_from_tau("IV_at_infty", {"theta_star": "1/5"}, value)
    assert sigma == mpmath.mpf(2) / 5 + 3
    assert s1 == mpmath.mpf(1) / 5
    assert s2 == 0
    assert t == 2


def test_sigma_from_tau_vi_pure_power():
    # τ = t^a: σ = A(t-1) + Bt + (t-1)a
    eps = mpmath.mpf(10) ** -20
    with mpmath.workdps(30):
        a, t = mpmath.mpf(2), mpmath.mpf(1) / 4
        value = TauValue(t, [t**a, a * t ** (a - 1), a * (a - 1) * t ** (a - 2), a * (a - 1) * (a - 2) * t ** (a - 3)], 0)
        sigma, s1, s2, _ = sigma_from_tau("VI_at_0", VI, value)
        A = (mpmath.mpf(1) / 9 + mpmath.mpf(1) / 16 - mpmath.mpf(1) / 25 - mpmath.mpf(1) / 36) / 2
        B = (mpmath.mpf(1) / 16 + mpmath.mpf(1) / 25 - mpmath.mpf(1) / 9 - mpmath.mpf(1) / 36) / 2
        assert mpmath.almosteq(sigma, A * (t - 1) + B * t + (t - 1) * a, rel_eps=eps)
        assert mpmath.almosteq(s1, A + B + a, rel_eps=eps)
        assert mpmath.almosteq(s2, 0, abs_eps=eps)


def test_exact_tau_satisfies_tilde_iv():
    # τ = exp(-θ_t s²/2) gives f = θ_t s, a solution of the tilde form
    spec = TauSpec("IV_at_infty", {**IV, "beta": "2/9"}, n_max=0, order=1, force=True)
    block = PrefactoredSeries(Q(0), (Q(0), -Q("2/5") / 2), tuple([Q(1)] + [Q(0)] * 8), Q)
    tau = TauSeries(spec, [TauMode(0, mpmath.mpf(1), mpmath.mpf(1), block)])
    res = sigma_ode_residual(form_for(tau), tau, "3")
    assert res.form == "Etilde_IV"
    assert tiny(res.value)


def test_residual_bound():
    Residual("E_IV", 1, 0, 0).check()
    res = Residual("E_IV", 1, mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf("0.01"))
    assert mpmath.almosteq(res.bound, mpmath.mpf("0.1"))
    with pytest.raises(ResidualTooLarge):
        res.check()
    assert set(res.to_json()) == {"form", "point", "residual", "abs_residual", "scale", "truncation", "bound"}


def test_form_defaults_per_kind():
    spec = TauSpec("VI_at_0", {**VI, "sigma": "3/10"}, n_max=0, order=1)
    tau = TauSeries(spec, [])
    assert form_for(tau).kind == "E_VI"
    with pytest.raises(ConfigError):
        form_for(tau, "E_IV")


@pytest.mark.parametrize("kind, params", [("E_VII", VI), ("E_V", IV), ("Etilde_V", {"theta": 1})])
def test_form_validation(kind, params):
    with pytest.raises(ConfigError):
        SigmaForm(kind, params)


def test_series_residual_bound_comes_from_the_next_order():
    spec = TauSpec("VI_at_0", {**VI, "sigma": "3/10"}, rho="1/7", n_max=1, order=3)
    tau = tau_series(spec)
    res = sigma_ode_residual(form_for(tau), tau, "1/20")
    assert res.truncation > 0
    assert res.bound == res.budget * res.truncation
    with mpmath.workdps(60):
        further = form_for(tau).terms(
            *sigma_from_tau("VI_at_0", spec.params, tau.evaluate("1/20", extended=True))
        )
        assert mpmath.almosteq(res.truncation, abs(mpmath.fsum(further) - res.value), rel_eps=mpmath.mpf(10) ** -30)


@pytest.mark.slow
def test_vi_residual_at_small_t():
    # n_max = 2 at t = 1/20 with 100 digits: within the first dropped order, and 10x smaller two orders on
    def residual(order):
        spec = TauSpec("VI_at_0", {**VI, "sigma": "3/10"}, rho="1/7", n_max=2, order=order, digits=100)
        tau = tau_series(spec)
        return sigma_ode_residual(form_for(tau), tau, "1/20", digits=100)

    six, eight = residual(6), residual(8)
    six.check()
    assert 10 * abs(eight.value) <= abs(six.value)


def test_v_residual_decreases_inside_the_truncation_window():
    params = {**V, "beta": "2/9"}
    point = default_point("V_at_infty")
    residuals = []
    for order in (2, 3):
        tau = tau_series(TauSpec("V_at_infty", params, rho="1/7", n_max=1, order=order))
        residuals.append(sigma_ode_residual(form_for(tau), tau, point).check())
    assert abs(residuals[1].value) < abs(residuals[0].value)
