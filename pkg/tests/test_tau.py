import mpmath
import pytest

from errors import ConfigError, PastOptimalTruncation
from painleve.tau import (
    TauSpec,
    default_point,
    fourier_phase,
    tau_series,
    v_mode_factor,
)
from scalars import RATIONAL, evaluate

Q = RATIONAL

VI = {"theta_0": "1/3", "theta_t": "1/4", "theta_1": "1/5", "theta_inf": "1/6", "sigma": "3/10"}
V = {"theta": "1/3", "theta_t": "2/5", "theta_0": "1/7", "eta": "2", "beta": "2/9"}


def close(a, b, digits=30):
    return mpmath.almosteq(a, b, rel_eps=mpmath.mpf(10) ** -digits)


def test_mode_order():
    spec = TauSpec("VI_at_0", VI, n_max=2)
    assert spec.mode_numbers() == [0, -1, 1, -2, 2]
    assert TauSpec("VI_at_0", VI, n_max=0).mode_numbers() == [0]


@pytest.mark.parametrize(
    "kind, params, kw",
    [
        ("VII_at_infty", VI, {}),
        ("V_at_infty", VI, {}),
        ("VI_at_0", VI, {"n_max": -1}),
        ("VI_at_0", VI, {"order": 0}),
    ],
)
def test_spec_validation(kind, params, kw):
    with pytest.raises(ConfigError):
        TauSpec(kind, params, **kw)


def test_from_dict_ignores_other_kinds_keys():
    spec = TauSpec.from_dict({"kind": "IV_at_infty", "theta_star": "1/5", "theta_t": "2/5", "beta": "2/9", **VI})
    assert set(spec.params) == {"theta_star", "theta_t", "beta"}
    assert spec.shift_key == "beta"
    assert spec.at_infinity


def test_fourier_phase():
    assert fourier_phase(0, Q("1/7")) == 1
    assert fourier_phase(3, Q("1/7")) == fourier_phase(3, Q("8/7"))
    assert close(fourier_phase(1, Q("1/4")), mpmath.mpc(0, 1))


def test_v_mode_factor():
    assert v_mode_factor(0, 2) == Q(1)
    assert v_mode_factor(1, 2) == -Q("1/4")
    assert v_mode_factor(-1, 2) == Q("1/4")
    assert v_mode_factor(2, 2) == -Q(1) / 2**8


def test_single_mode_is_the_block():
    tau = tau_series(TauSpec("VI_at_0", VI, n_max=0, order=4))
    (mode,) = tau.modes
    assert mode.weight == 1
    sigma, t0, tt = Q("3/10"), Q("1/3"), Q("1/4")
    assert mode.block.alpha == sigma**2 - t0**2 - tt**2
    value = tau.evaluate("1/20", derivatives=0)
    block_value, _ = evaluate(mode.block, "1/20")
    assert close(value.derivatives[0], block_value, 40)


def test_vi_mode_exponents():
    tau = tau_series(TauSpec("VI_at_0", VI, n_max=1, order=3))
    for mode in tau.modes:
        sigma = Q("3/10") + mode.n
        assert mode.block.alpha == sigma**2 - Q("1/9") - Q("1/16")


def test_vi_at_infinity_exponents():
    tau = tau_series(TauSpec("VI_at_infty", VI, n_max=1, order=3))
    for mode in tau.modes:
        sigma = Q("3/10") + mode.n
        assert mode.block.alpha == sigma**2 + Q("1/16") - Q("1/36")


def test_v_weights_carry_the_eta_factor():
    spec = TauSpec("V_at_infty", V, rho="1/7", n_max=1, order=2)
    tau = tau_series(spec)
    with mpmath.workdps(60):
        for mode in tau.modes:
            phase = fourier_phase(mode.n, spec.rho)
            factor = Q.to_mpc(v_mode_factor(mode.n, spec.params["eta"]))
            assert close(mode.weight, phase * mode.ratio * factor, 40)


def test_rho_shift_by_one_is_exact():
    a = tau_series(TauSpec("VI_at_0", VI, rho="1/7", n_max=1, order=3)).evaluate("1/20")
    b = tau_series(TauSpec("VI_at_0", VI, rho="8/7", n_max=1, order=3)).evaluate("1/20")
    assert a.derivatives == b.derivatives


def test_series_is_thread_independent():
    spec = TauSpec("VI_at_0", VI, n_max=2, order=3)
    assert tau_series(spec).to_json() == tau_series(spec, threads=3).to_json()


def test_derivatives_match_finite_differences():
    tau = tau_series(TauSpec("VI_at_0", VI, rho="1/7", n_max=1, order=3))
    with mpmath.workdps(60):
        t0, h = mpmath.mpf(1) / 20, mpmath.mpf(10) ** -12
        value = tau.evaluate(t0, derivatives=1)
        plus = tau.evaluate(t0 + h, derivatives=0).derivatives[0]
        minus = tau.evaluate(t0 - h, derivatives=0).derivatives[0]
        assert close(value.derivatives[1], (plus - minus) / (2 * h), 15)


def test_higher_modes_are_suppressed_near_zero():
    tau = tau_series(TauSpec("VI_at_0", VI, n_max=3, order=1))
    t = mpmath.mpf(1) / 20
    size = {}
    for mode in tau.modes:
        contribution = abs(mode.weight) * t ** float(Q.to_mpc(mode.block.alpha).real)
        size[abs(mode.n)] = max(size.get(abs(mode.n), 0), contribution)
    assert size[1] > size[2] > size[3]


def test_asymptotic_series_refuses_to_overshoot():
    spec = TauSpec("V_at_infty", V, n_max=0, order=3)
    tau = tau_series(spec)
    with pytest.raises(PastOptimalTruncation):
        tau.evaluate("1/10000")
    forced = tau_series(TauSpec("V_at_infty", V, n_max=0, order=3, force=True)).evaluate("1/10000")
    assert forced.smallest_index[0] < 3


def test_default_points():
    assert default_point("VI_at_0") == mpmath.mpf(1) / 20
    assert default_point("V_at_infty") == mpmath.mpc(0, 20)
    assert close(abs(default_point("IV_at_infty")), 20)


def test_limit_phase_is_reported_for_confluent_kinds():
    v = tau_series(TauSpec("V_at_infty", V, n_max=0, order=1)).to_json()
    vi = tau_series(TauSpec("VI_at_0", VI, n_max=0, order=1)).to_json()
    assert v["rho_prime"].startswith("e^{2πiρ'}")
    assert "rho_prime" not in vi
