import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetacosmo.errors import AccuracyNotAttainable, ConfigError
from zetacosmo.riemann_siegel import (
    DEFAULT_CONFIG,
    THETA_SWITCH,
    EvalConfig,
    _rs_values,
    _theta_asymptotic,
    _theta_direct,
    _z_from_zeta,
    chi,
    realness_residual,
    rs_error_budget,
    theta,
    z_eval,
    z_values,
    zeta_on_line,
)

# mpmath at 40 digits (siegelz / siegeltheta / zeta)
ZETA_HALF = -1.4603545088095868129
ORACLE = {
    25.0: (-0.014872483897970998206, 1.3678247330304299003, 0.36211614517662239456, 4.3706188101874913477),
    100.0: (2.692697056664463475, 0.22244209487830922251, -4.3945734338804254324, 87.972165231787219625),
    1000.5: (2.5492611355555555643, 0.63460955751339878365, -11.790410435230046938, 2035.8139600703492806),
    5000.25: (0.052100543914359267735, 3.280685625620408578, -5.5433036410383100872, 14198.732535242563267),
    9999.5: (-3.7551205643157854361, 3.9721507153488786296, 26.852922353648028796, 31860.080721259637505),
}


def test_z_at_origin_is_zeta_half():
    p = z_eval(0.0)
    assert abs(p.z - ZETA_HALF) < 1e-12
    assert abs(zeta_on_line(0.0) - ZETA_HALF) < 1e-12


@pytest.mark.parametrize("t", sorted(ORACLE))
def test_z_and_derivatives_match_independent_values(t):
    z, dz, d2z, th = ORACLE[t]
    p = z_eval(t)
    scale = 1 + abs(d2z)
    assert abs(p.z - z) < 2e-10
    assert abs(p.dz - dz) < 1e-9
    assert abs(p.d2z - d2z) < 1e-8 * scale
    assert abs(p.theta - th) < 1e-10 * max(1.0, abs(th) / 100)


def test_theta_is_odd_with_even_derivative():
    for t in (0.3, 7.0, 29.9, 30.1, 500.0):
        a, b = theta(t), theta(-t)
        assert b[0] == -a[0]
        assert b[1] == a[1]
        assert b[2] == -a[2]


def test_theta_branches_agree_at_switchover():
    t = np.array([THETA_SWITCH])
    direct = _theta_direct(t)
    asym = _theta_asymptotic(t)
    for d, a in zip(direct, asym):
        assert abs(float(d[0]) - float(a[0])) < 1e-12


def test_theta_continuous_across_switch():
    ts = np.linspace(THETA_SWITCH - 1e-3, THETA_SWITCH + 1e-3, 41)
    th = np.array([theta(t)[0] for t in ts])
    dth = np.array([theta(t)[1] for t in ts])
    assert np.all(np.diff(th) > 0)
    assert np.max(np.abs(np.diff(th) - dth[:-1] * np.diff(ts))) < 1e-9


@pytest.mark.parametrize("t", [0.5, 14.0, 25.0, 31.4, 1234.5, 9.9e4])
def test_chi_argument_is_minus_twice_theta(t):
    c = chi(t)
    assert abs(abs(c) - 1) < 1e-12
    d = (math.atan2(c.imag, c.real) + 2 * theta(t)[0]) % (2 * math.pi)
    assert min(d, 2 * math.pi - d) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.1, max_value=3000.0))
def test_z_even_and_derivative_odd(t):
    z1, d1, s1 = (v[0] for v in z_values([t]))
    z2, d2, s2 = (v[0] for v in z_values([-t]))
    assert z1 == z2
    assert d1 == -d2
    assert s1 == s2


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=1.0, max_value=5000.0))
def test_z_is_real(t):
    assert realness_residual(t) < 1e-10


def test_conjugate_symmetry_of_zeta_on_line():
    assert zeta_on_line(-33.3) == zeta_on_line(33.3).conjugate()


def test_fast_path_agrees_with_oracle_where_budget_allows():
    cfg = EvalConfig(target_abs_error=1e-6)
    t = np.linspace(250.0, 1e4, 400)
    assert np.all(rs_error_budget(t, 4) <= 1e-6)
    fast = z_values(t, cfg, path="fast")
    slow = z_values(t, DEFAULT_CONFIG, path="oracle")
    budget = rs_error_budget(t, 4)
    assert np.all(np.abs(fast[0] - slow[0]) <= budget)


@pytest.mark.parametrize("order", range(5))
def test_rs_error_within_budget_for_each_order(order):
    t = np.linspace(250.0, 3000.0, 60)
    rs = _rs_values(t, order)[0]
    em = _z_from_zeta(t, DEFAULT_CONFIG)[0]
    assert np.all(np.abs(rs - em) <= rs_error_budget(t, order))


def test_budget_decreases_with_order_and_height():
    t = np.array([300.0, 1000.0, 5000.0])
    b = np.array([rs_error_budget(t, k) for k in range(5)])
    assert np.all(np.diff(b, axis=0) < 0)
    assert np.all(np.diff(b, axis=1) < 0)
    assert np.isinf(rs_error_budget(np.array([150.0]), 4)[0])


def test_fast_path_refuses_unattainable_accuracy():
    with pytest.raises(AccuracyNotAttainable):
        z_eval(500.0, DEFAULT_CONFIG, path="fast")
    strict = EvalConfig(allow_fallback=False)
    with pytest.raises(AccuracyNotAttainable):
        z_eval(500.0, strict)
    # below the fast-path range the oracle is always used
    assert z_eval(40.0, strict).path == "oracle"


def test_auto_path_switches_to_fast_at_large_t():
    assert z_eval(9000.0).path == "fast"
    assert z_eval(1000.0).path == "oracle"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"target_abs_error": 0.0},
        {"target_abs_error": float("nan")},
        {"em_terms": 3},
        {"rs_correction_order": 5},
        {"fd_step_scale": -1.0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        EvalConfig(**kwargs)


def test_config_digest_distinguishes_settings():
    assert EvalConfig().digest() != EvalConfig(target_abs_error=1e-8).digest()
    assert EvalConfig().digest() == DEFAULT_CONFIG.digest()
