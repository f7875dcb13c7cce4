"""One-call steady-state analysis tying the numerical and analytic routes together."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .closedform import ClosedFormCoefficients, coefficients, off_diagonal_covariances
from .entropy import EntropyBudget, decompose, entropy_production_offdiag, entropy_production_trace, wigner_entropy
from .errors import ClosedFormDomainError, InstabilityError
from .lyapunov import CovarianceMatrix, lyapunov_residual, solve_steady_state, symplectic_eigenvalues
from .model import DriftDiffusion, StabilityReport, SystemParams, build_drift_diffusion, check_stability

__all__ = ["SteadyStateReport", "analyze", "rel_error", "IDENTITY_TOL"]

IDENTITY_TOL = 1e-10


def rel_error(a: float, b: float) -> float:
    """``|a - b| / max(|a|, |b|)``, zero when both vanish."""
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


@dataclass(frozen=True)
class SteadyStateReport:
    params: SystemParams
    stability: StabilityReport
    drift: DriftDiffusion
    sigma: CovarianceMatrix
    symplectic: tuple
    wigner_entropy: float
    pi_s_trace: float
    pi_s_offdiag: float
    lyapunov_residual: float
    coeffs: Optional[ClosedFormCoefficients] = None
    budget: Optional[EntropyBudget] = None
    checks: dict = field(default_factory=dict)

    @property
    def all_checks_pass(self) -> bool:
        return all(self.checks.values())


def analyze(params: SystemParams, tol: float = IDENTITY_TOL) -> SteadyStateReport:
    """Stability, steady covariance, full entropy budget and cross-formula checks.

    The closed-form budget is skipped (``budget is None``) when ``omega <= 0``;
    the trace and off-diagonal totals are always available.

    Raises
    ------
    InstabilityError
        If the drift matrix is not stable.
    """
    stab = check_stability(params)
    if not stab.stable:
        raise InstabilityError(
            f"unstable parameters: max Re eigenvalue = {stab.max_real_eigenvalue:.6g}, "
            f"eta = {stab.routh_hurwitz_eta:.6g}"
        )
    dd = build_drift_diffusion(params)
    sigma = solve_steady_state(dd)
    nu = symplectic_eigenvalues(sigma)
    pi_trace, _ = entropy_production_trace(dd, sigma)
    pi_off = entropy_production_offdiag(params, sigma)

    checks = {
        "trace_vs_offdiag": rel_error(pi_trace, pi_off) <= tol,
        "physical": nu[1] >= 0.5 - 1e-10,
        "second_law": pi_trace >= -1e-10,
    }
    coeffs = budget = None
    try:
        coeffs = coefficients(params)
    except (ClosedFormDomainError, InstabilityError):
        pass
    if coeffs is not None:
        budget = decompose(params, coeffs, sigma)
        s = sigma.sigma
        closed = off_diagonal_covariances(params, coeffs)
        checks["closed_form_vs_lyapunov"] = all(
            rel_error(c, n) <= tol for c, n in zip(closed, (s[0, 3], s[1, 2], s[2, 3]))
        )
        checks["trace_vs_pi0_pi1"] = rel_error(pi_trace, budget.pi0 + budget.pi1) <= tol
        checks["pi0_vs_components"] = rel_error(budget.pi0, sum(budget.pi_components)) <= tol
        checks["pi12_vs_pi21"] = rel_error(budget.pi_12, budget.pi_21) <= tol
        checks["occupations_vs_sigma"] = (
            rel_error(budget.occupations[0], s[0, 0] + s[1, 1]) <= tol
            and rel_error(budget.occupations[1], s[2, 2] + s[3, 3]) <= tol
        )

    return SteadyStateReport(
        params=params,
        stability=stab,
        drift=dd,
        sigma=sigma,
        symplectic=nu,
        wigner_entropy=wigner_entropy(sigma),
        pi_s_trace=pi_trace,
        pi_s_offdiag=pi_off,
        lyapunov_residual=lyapunov_residual(dd, sigma),
        coeffs=coeffs,
        budget=budget,
        checks=checks,
    )
