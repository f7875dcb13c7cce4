import numpy as np
import pytest

from twomode.errors import InstabilityError
from twomode.lyapunov import solve_steady_state
from twomode.model import SystemParams, build_drift_diffusion
from twomode.trajectory import StepSizeWarning, TrajectoryConfig, simulate_covariance

from conftest import fig_params

SHORT = TrajectoryConfig(dt=2e-3, burn_in=20.0, sample_time=400.0, n_trajectories=8, n_blocks=4, seed=3)


def test_uncoupled_vacuum_is_reproduced():
    p = SystemParams(delta=1.0, omega0=1.0, g_coupling=0.0, kappa=0.5, gamma=0.5)
    out = simulate_covariance(build_drift_diffusion(p), SHORT)
    z = np.abs(out.sigma_emp.sigma - 0.5 * np.eye(4)) / out.stderr
    assert np.all(z < 4.5)


def test_fixed_seed_is_deterministic():
    dd = build_drift_diffusion(fig_params(0.5, 0.1))
    a = simulate_covariance(dd, SHORT)
    b = simulate_covariance(dd, SHORT)
    assert np.array_equal(a.sigma_emp.sigma, b.sigma_emp.sigma)
    assert np.array_equal(a.stderr, b.stderr)
    c = simulate_covariance(dd, TrajectoryConfig(**{**SHORT.__dict__, "seed": 4}))
    assert not np.array_equal(a.sigma_emp.sigma, c.sigma_emp.sigma)


def test_reduced_oracle_at_fig4_point():
    dd = build_drift_diffusion(fig_params(0.5, 0.1))
    exact = solve_steady_state(dd).sigma
    out = simulate_covariance(dd, SHORT)
    z = np.abs(out.sigma_emp.sigma - exact) / out.stderr
    assert np.all(z < 4.5), z
    assert out.metadata["n_batches"] == 32 and out.metadata["scheme"] == "Euler-Maruyama"


def test_unstable_rejected():
    with pytest.raises(InstabilityError):
        simulate_covariance(build_drift_diffusion(fig_params(3.0, 0.2)), SHORT)


def test_coarse_step_warns():
    cfg = TrajectoryConfig(dt=0.2, burn_in=1.0, sample_time=10.0, n_trajectories=2, n_blocks=2)
    with pytest.warns(StepSizeWarning):
        simulate_covariance(build_drift_diffusion(fig_params(0.05, 0.2)), cfg)


@pytest.mark.parametrize(
    "kw", [dict(dt=0.0), dict(burn_in=-1.0), dict(sample_time=0.0), dict(n_trajectories=0), dict(n_trajectories=1, n_blocks=1)]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        TrajectoryConfig(**kw)
