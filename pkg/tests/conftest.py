import math

import numpy as np
import pytest

from twomode.model import SystemParams

_ACCEPTANCE_LINES = []


def fig_params(G, lam, **kw):
    """Preset parameters (kappa = gamma = 0.2, omega = omega0 - 2 Lambda = 1) at the resonance delta."""
    base = dict(delta=math.sqrt(1.0 + 4.0 * lam), omega0=1.0 + 2.0 * lam, lambda_drive=lam, kappa=0.2, gamma=0.2)
    base.update(kw)
    return SystemParams.from_big_g(G, **base)


@pytest.fixture
def fig3_point():
    return fig_params(0.05, 0.2)


@pytest.fixture
def fig4_point():
    return fig_params(0.5, 0.1)


@pytest.fixture
def resonance_point():
    # Lambda = 0, kappa = gamma = 0.2, delta = omega0 = 1, G = 0.5
    return SystemParams.from_big_g(0.5, delta=1.0, omega0=1.0, lambda_drive=0.0, kappa=0.2, gamma=0.2)


def numeric_coefficients(params):
    """a_ij from two Lyapunov solves with unit bath factors (sigma is linear in N1, N2)."""
    import dataclasses

    from twomode.lyapunov import solve_steady_state
    from twomode.model import build_drift_diffusion

    def offd(n1, n2):
        # nbar = (N - 1)/2 is negative for N = 0, so build D by hand
        dd = build_drift_diffusion(dataclasses.replace(params, nbar1=0.0, nbar2=0.0))
        d = np.diag([params.kappa * n1, params.kappa * n1, params.gamma * n2, params.gamma * n2])
        dd = dataclasses.replace(dd, d_matrix=d)
        s = solve_steady_state(dd).sigma
        return 2.0 * np.array([s[0, 3], s[1, 2], s[2, 3]])

    c1, c2 = offd(1.0, 0.0), offd(0.0, 1.0)
    return {"a11": c1[0], "a21": c1[1], "a31": c1[2], "a12": c2[0], "a22": c2[1], "a32": c2[2]}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
