import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from twomode.errors import ParameterDomainError
from twomode.model import (
    SystemParams,
    build_drift_diffusion,
    characteristic_polynomial,
    check_stability,
    derive_constants,
    drift_eigenvalues,
    resonant_delta,
    thermal_occupation,
)

from conftest import fig_params


def test_derived_constants_collapse_without_drive():
    p = SystemParams(delta=1.0, omega0=1.0, lambda_drive=0.0, g_coupling=0.0, kappa=0.2, gamma=0.2)
    c = derive_constants(p)
    assert c.omega_minus == 1.0 and c.omega_plus == 1.0
    assert c.delta_aux == pytest.approx(math.sqrt(1.04), rel=1e-15)
    assert c.gamma_aux == pytest.approx(math.sqrt(1.04), rel=1e-15)
    assert c.gamma1_aux == pytest.approx(math.sqrt(1.04), rel=1e-15)
    assert c.eta == pytest.approx(1.0816, rel=1e-14)
    assert c.n_caps == (1.0, 1.0)
    assert (c.kappa1, c.kappa2) == pytest.approx((0.6, 0.6))


def test_split_frequencies():
    p = SystemParams(lambda_drive=0.25)
    assert p.omega == 0.5 and p.Omega == 1.5
    assert p.Omega - p.omega == 1.0 == 4 * p.lambda_drive


def test_eta_against_arbitrary_precision():
    p = fig_params(0.05, 0.2)
    mpmath.mp.dps = 50
    lam, G, k, g = (mpmath.mpf(x) for x in ("0.2", "0.05", "0.2", "0.2"))
    w, W = 1, 1 + 4 * lam
    De = mpmath.sqrt(w * W)
    eta_mp = (De**2 + k**2) * (g**2 + w * W) - G**2 * De * w
    assert derive_constants(p).eta == pytest.approx(float(eta_mp), rel=1e-14)


def test_negative_radicand_kept_signed():
    # omega * Omega < -gamma^2 once Lambda > omega0/2 by enough
    p = SystemParams(lambda_drive=1.0, gamma=0.2)
    c = derive_constants(p)
    assert c.gamma_aux_sq == pytest.approx(0.04 - 3.0)
    assert c.gamma_aux is None
    assert c.eta == pytest.approx(c.delta_aux**2 * c.gamma_aux_sq - p.G**2 * p.delta * p.omega)


@pytest.mark.parametrize(
    "kw",
    [dict(kappa=0.0), dict(gamma=-0.1), dict(nbar1=-1e-3), dict(nbar2=-2.0), dict(delta=float("nan"))],
)
def test_invalid_params_rejected(kw):
    with pytest.raises(ParameterDomainError):
        SystemParams(**kw)


def test_decoupled_drift_is_block_diagonal():
    p = SystemParams(delta=1.3, lambda_drive=0.0, g_coupling=0.0, kappa=0.1, gamma=0.3)
    a = build_drift_diffusion(p).a_matrix
    assert np.all(a[:2, 2:] == 0.0) and np.all(a[2:, :2] == 0.0)
    assert np.array_equal(a[:2, :2], [[-0.1, 1.3], [-1.3, -0.1]])
    assert np.array_equal(a[2:, 2:], [[-0.3, 1.0], [-1.0, -0.3]])


def test_vacuum_diffusion():
    p = SystemParams(kappa=0.1, gamma=0.3)
    assert np.array_equal(build_drift_diffusion(p).d_matrix, np.diag([0.1, 0.1, 0.3, 0.3]))


def test_fig4_drift_entries():
    p = fig_params(0.5, 0.1)
    dd = build_drift_diffusion(p)
    De = math.sqrt(1.4)
    expected = np.array(
        [
            [-0.2, De, 0.0, 0.0],
            [-De, -0.2, 0.5, 0.0],
            [0.0, 0.0, -0.2, 1.0],
            [0.5, 0.0, -1.4, -0.2],
        ]
    )
    np.testing.assert_allclose(dd.a_matrix, expected, rtol=1e-15, atol=0)
    np.testing.assert_array_equal(dd.a_irr, np.diag([-0.2, -0.2, -0.2, -0.2]))


def test_matrices_are_read_only():
    dd = build_drift_diffusion(SystemParams())
    with pytest.raises(ValueError):
        dd.a_matrix[0, 0] = 1.0


params_strategy = st.builds(
    SystemParams,
    delta=st.floats(0.05, 3.0),
    omega0=st.just(1.0),
    lambda_drive=st.floats(0.0, 0.45),
    g_coupling=st.floats(0.0, 1.0),
    kappa=st.floats(0.01, 1.0),
    gamma=st.floats(0.01, 1.0),
    nbar1=st.floats(0.0, 10.0),
    nbar2=st.floats(0.0, 10.0),
)


@settings(max_examples=300, deadline=None)
@given(params_strategy)
def test_structural_invariants(p):
    dd = build_drift_diffusion(p)
    assert np.trace(dd.a_matrix) == pytest.approx(-2.0 * (p.kappa + p.gamma), abs=1e-14)
    assert np.all(np.diag(dd.a_matrix - dd.a_irr) == 0.0)
    np.testing.assert_array_equal(dd.d_matrix @ dd.a_irr, dd.a_irr @ dd.d_matrix)
    assert np.all(np.diag(dd.d_matrix) > 0.0)
    assert p.Omega - p.omega == pytest.approx(4.0 * p.lambda_drive, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(params_strategy)
def test_eta_sign_matches_eigenvalues(p):
    assume(p.omega > 0.0)
    report = check_stability(p)
    eig = np.linalg.eigvals(build_drift_diffusion(p).a_matrix)
    # stay away from the boundary where either verdict is rounding-limited
    assume(abs(report.routh_hurwitz_eta) > 1e-9)
    assume(abs(eig.real.max()) > 1e-9)
    assert (report.routh_hurwitz_eta > 0.0) == (eig.real.max() < 0.0)
    assert report.stable == (eig.real.max() < 0.0)


def test_characteristic_polynomial_matches_numpy():
    a = build_drift_diffusion(fig_params(0.5, 0.1)).a_matrix
    np.testing.assert_allclose(characteristic_polynomial(a), np.poly(a), rtol=1e-12, atol=1e-14)
    ours, ref = drift_eigenvalues(a), np.linalg.eigvals(a)
    # all real parts are -0.2 here, so order by imaginary part
    np.testing.assert_allclose(ours[np.argsort(ours.imag)], ref[np.argsort(ref.imag)], atol=1e-12)


def test_decoupled_eigenvalues():
    p = SystemParams(delta=1.5, lambda_drive=0.0, g_coupling=0.0, kappa=0.1, gamma=0.3)
    eig = np.sort_complex(drift_eigenvalues(build_drift_diffusion(p).a_matrix))
    expected = np.sort_complex(np.array([-0.1 + 1.5j, -0.1 - 1.5j, -0.3 + 1j, -0.3 - 1j]))
    np.testing.assert_allclose(eig, expected, atol=1e-12)
    assert check_stability(p).stable


def test_positive_eta_is_stable():
    report = check_stability(fig_params(0.05, 0.2))
    assert report.routh_hurwitz_eta > 0 and report.stable and report.max_real_eigenvalue < 0


def test_eta_crossing_coincides_with_eigenvalue_crossing():
    # scan G upward at the fig3 resonance point until eta changes sign
    lam = 0.2
    Gs = np.linspace(0.05, 3.0, 2951)
    etas = [check_stability(fig_params(G, lam)).routh_hurwitz_eta for G in Gs]
    i = next(i for i, e in enumerate(etas) if e <= 0.0)
    before, after = check_stability(fig_params(Gs[i - 1], lam)), check_stability(fig_params(Gs[i], lam))
    assert before.stable and before.max_real_eigenvalue < 0
    assert not after.stable and after.max_real_eigenvalue >= 0
    # boundary G from eta = 0 in closed form
    w, W = 1, 1 + 4 * lam
    De = math.sqrt(w * W)
    G_crit = math.sqrt((De**2 + 0.04) * (0.04 + w * W) / (De * w))
    assert Gs[i - 1] < G_crit <= Gs[i]


def test_thermal_occupation():
    assert thermal_occupation(1.0, 1.0) == pytest.approx(1.0 / (math.e - 1.0))
    # high temperature: nbar ~ T/omega - 1/2
    assert thermal_occupation(1000.0, 1.0) == pytest.approx(999.5, rel=1e-6)
    with pytest.raises(ParameterDomainError):
        thermal_occupation(0.0, 1.0)


def test_resonant_delta():
    assert resonant_delta(1.0, 0.1) == pytest.approx(math.sqrt(0.96))
    with pytest.raises(ParameterDomainError):
        resonant_delta(1.0, 0.5)
