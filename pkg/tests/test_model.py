import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tpdicke.model import (
    ModelParams,
    ParameterError,
    beta,
    collapse_coupling,
    derived_rates,
    gamma_prime,
    params_from_mapping,
    parse_config,
    quadrature_potential,
    threshold_coupling,
    validate_params,
)

pos = st.floats(min_value=1e-2, max_value=1e2)


def test_gamma_prime_zero_rates():
    p = ModelParams(1.0, 2.0, 0.5, 10, 1.0, 0.0, 0.0)
    assert gamma_prime(p) == 0.0


def test_gamma_prime_substitution(strong_params):
    assert gamma_prime(strong_params) == 7.5


def test_threshold_coupling_matches_det_zero(strong_params):
    expected = math.sqrt(5 * 60.25 / 32)
    assert threshold_coupling(strong_params) == pytest.approx(expected, rel=1e-14)
    assert threshold_coupling(strong_params) == pytest.approx(3.0682, abs=1e-4)

    # independent route: zero of the coupled-block determinant found by bisection
    import numpy as np
    from scipy.optimize import brentq

    from tpdicke.stability import jacobian_normal

    def det(g):
        m = jacobian_normal(strong_params.replace(g=g))
        return np.linalg.det(m[np.ix_([0, 1, 3, 4], [0, 1, 3, 4])])

    assert brentq(det, 1.0, 5.0, xtol=1e-14) == pytest.approx(expected, rel=1e-10)


def test_beta_requires_decay():
    with pytest.raises(ParameterError, match="beta undefined"):
        derived_rates(ModelParams(1.0, 1.0, 1.0, 10, 1.0, 0.0, 1.0))


def test_derived_rates_values(strong_params):
    r = derived_rates(strong_params)
    assert r.gamma_prime == 7.5
    assert r.beta == pytest.approx(7.5 / 600)
    assert r.g_t == pytest.approx(3.0682344271583943)


@pytest.mark.parametrize("n, expected", [(1, 1.0), (100, 0.1)])
def test_collapse_coupling(n, expected):
    p = ModelParams(1.0, 1.0, 0.0, n, 1.0, 1.0, 1.0)
    assert collapse_coupling(p) == pytest.approx(expected)
    assert quadrature_potential(p, expected).coeff_x == pytest.approx(0.0, abs=1e-15)


def test_inverted_potential():
    pot = quadrature_potential(ModelParams(2.0, 1.0, 1.5, 4, 1.0, 1.0, 1.0))
    assert pot.coeff_x == -0.25
    assert pot.inverted


@given(g=st.floats(0, 1e3), wc=pos, n=st.integers(1, 10**6))
def test_quadrature_coefficients_sum(g, wc, n):
    pot = quadrature_potential(ModelParams(wc, 1.0, g, n, 1.0, 1.0, 1.0))
    assert pot.coeff_x + pot.coeff_p == pytest.approx(wc / 2, abs=1e-14 * (wc + g * math.sqrt(n)))


@given(wc=pos, w0=pos, g=pos, k=pos, gd=pos, gp=pos, n=st.integers(1, 10**4), lam=st.floats(1e-2, 1e2))
def test_scale_covariance(wc, w0, g, k, gd, gp, n, lam):
    p = ModelParams(wc, w0, g, n, k, gd, gp)
    q = p.scaled(lam)
    assert gamma_prime(q) == pytest.approx(lam * gamma_prime(p), rel=1e-12)
    assert threshold_coupling(q) == pytest.approx(lam * threshold_coupling(p), rel=1e-12)
    assert beta(q) == pytest.approx(beta(p), rel=1e-12)


@given(gd=pos, gp=pos)
def test_beta_vanishes_at_large_n(gd, gp):
    p = ModelParams(1.0, 1.0, 1.0, 10, 1.0, gd, gp)
    assert beta(p.replace(n_qubits=10**9)) < beta(p) * 1e-7


def test_threshold_coupling_lower_bound():
    p = ModelParams(1.0, 2.0, 0.0, 1, 0.0, 0.0, 0.0)
    assert threshold_coupling(p) == pytest.approx(math.sqrt(1.0 * 2.0) / math.sqrt(2))
    assert threshold_coupling(p.replace(kappa=0.3, gamma_phi=0.2)) > threshold_coupling(p)


def test_validate_ok(strong_params):
    assert validate_params(strong_params) == []
    assert validate_params(strong_params, steady_state=True) == []


def test_validate_reports_every_violation():
    p = ModelParams(0.0, 1.0, -1.0, 0, 0.0, 1.0, 1.0)
    problems = validate_params(p, steady_state=True)
    assert "omega_c must be > 0" in problems
    assert "g must be >= 0" in problems
    assert "n_qubits must be a positive integer" in problems
    assert "kappa must be > 0 for steady-state formulas" in problems
    assert validate_params(p.replace(omega_c=1.0, g=1.0, n_qubits=3)) == []


def test_parse_config_and_rescale():
    text = """
    # two-photon Dicke parameters
    omega_c = 2
    omega_0 = 2
    g = 1.0   # coupling
    n_qubits = 100
    kappa = 2
    gamma_down = 6
    gamma_phi = 6
    """
    values = parse_config(text)
    assert values["n_qubits"] == 100
    p = params_from_mapping(values)
    assert p == ModelParams(1.0, 1.0, 0.5, 100, 1.0, 3.0, 3.0)


@pytest.mark.parametrize("text", ["omega_c 1", "omega_x = 1", "g = abc"])
def test_parse_config_rejects(text):
    with pytest.raises(ParameterError):
        parse_config(text)


def test_params_from_mapping_missing():
    with pytest.raises(ParameterError, match="kappa"):
        params_from_mapping({"omega_c": 1, "omega_0": 1, "g": 1, "n_qubits": 1, "gamma_down": 1, "gamma_phi": 1})


def test_replace_gamma_locks_pair(strong_params):
    p = strong_params.replace(gamma=1.5)
    assert (p.gamma_down, p.gamma_phi) == (1.5, 1.5)
