"""Randomized property suite over stable parameter sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .closedform import coefficients, off_diagonal_covariances, total_current_closed, vacuum_components_closed
from .entropy import SIGN_THRESHOLD, decompose, entropy_production_offdiag, entropy_production_trace
from .lyapunov import solve_steady_state, symplectic_eigenvalues
from .model import SystemParams, build_drift_diffusion, check_stability
from .pipeline import IDENTITY_TOL, rel_error
from .sweep import preset_point
from .trajectory import TrajectoryConfig, simulate_covariance

__all__ = [
    "PropertyResult",
    "VerifyReport",
    "sample_parameter_sets",
    "run_verify",
    "ensemble_rows",
]

DELTA_RANGE = (0.2, 2.0)


def sample_parameter_sets(n: int, seed: int = 0) -> list[SystemParams]:
    """Draw ``n`` stable parameter sets with ``omega > 0`` and ``eta > 0``.

    kappa, gamma log-uniform on [0.01, 1]; g on [0, 0.5]; Lambda on [0, 0.4];
    nbar_i on [0, 10]; delta on [0.2, 2]; omega0 = 1.  Draws failing the
    stability test are rejected, so the sequence depends only on ``seed``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    while len(out) < n:
        k, g = np.exp(rng.uniform(math.log(0.01), math.log(1.0), size=2))
        p = SystemParams(
            delta=rng.uniform(*DELTA_RANGE),
            omega0=1.0,
            lambda_drive=rng.uniform(0.0, 0.4),
            g_coupling=rng.uniform(0.0, 0.5),
            kappa=k,
            gamma=g,
            nbar1=rng.uniform(0.0, 10.0),
            nbar2=rng.uniform(0.0, 10.0),
        )
        if p.omega <= 0.0:
            continue
        stab = check_stability(p)
        if stab.routh_hurwitz_eta > 0.0 and stab.stable:
            out.append(p)
    return out


def ensemble_rows(params_list: Iterable[SystemParams]) -> list[dict]:
    """Numerical and closed-form quantities for each parameter set, as flat dicts."""
    rows = []
    for p in params_list:
        dd = build_drift_diffusion(p)
        sigma = solve_steady_state(dd)
        s = sigma.sigma
        c = coefficients(p)
        b = decompose(p, c, sigma)
        trace, _ = entropy_production_trace(dd, sigma)
        closed = off_diagonal_covariances(p, c)
        vc = vacuum_components_closed(p, c)
        rows.append(
            {
                "params": p,
                "sigma": s,
                "coeffs": c,
                "budget": b,
                "pi_trace": trace,
                "pi_offdiag": entropy_production_offdiag(p, sigma),
                "pi_sum": b.pi0 + b.pi1,
                "closed_offdiag": closed,
                "lyap_offdiag": (s[0, 3], s[1, 2], s[2, 3]),
                "vacuum_closed": vc,
                "total_current_closed": total_current_closed(p, c),
                "nu": symplectic_eigenvalues(sigma),
            }
        )
    return rows


@dataclass
class PropertyResult:
    name: str
    kind: str  # "identity" (relative tolerance) or "sign"
    n_checked: int = 0
    n_passed: int = 0
    max_residual: float = 0.0
    tol: float = IDENTITY_TOL

    @property
    def passed(self) -> bool:
        return self.n_checked == self.n_passed

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "n_checked": self.n_checked,
            "n_passed": self.n_passed,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class VerifyReport:
    n_samples: int
    seed: int
    tol: float
    results: list = field(default_factory=list)
    sample_digest: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tol": self.tol,
            "sample_digest": self.sample_digest,
            "passed": self.passed,
            "results": [r.as_dict() for r in self.results],
        }


def _identity_checks(tol: float) -> list[tuple[str, Callable[[dict], float]]]:
    def max_rel(pairs):
        return max(rel_error(a, b) for a, b in pairs)

    return [
        ("trace_vs_offdiag", lambda r: rel_error(r["pi_trace"], r["pi_offdiag"])),
        ("trace_vs_pi0_plus_pi1", lambda r: rel_error(r["pi_trace"], r["pi_sum"])),
        ("offdiag_vs_pi0_plus_pi1", lambda r: rel_error(r["pi_offdiag"], r["pi_sum"])),
        ("closed_form_vs_lyapunov", lambda r: max_rel(zip(r["closed_offdiag"], r["lyap_offdiag"]))),
        ("pi0_vs_components", lambda r: rel_error(r["budget"].pi0, sum(r["budget"].pi_components))),
        ("pi12_eq_pi21", lambda r: rel_error(r["budget"].pi_12, r["budget"].pi_21)),
        (
            "a22_identity",
            lambda r: rel_error(
                r["params"].G * r["coeffs"].a22,
                r["params"].G * r["coeffs"].a11 - (r["params"].Omega - r["params"].omega) * r["coeffs"].a31,
            ),
        ),
        (
            "occupations_vs_sigma",
            lambda r: max(
                rel_error(r["budget"].occupations[0], r["sigma"][0, 0] + r["sigma"][1, 1]),
                rel_error(r["budget"].occupations[1], r["sigma"][2, 2] + r["sigma"][3, 3]),
            ),
        ),
        (
            "vacuum_components_closed",
            lambda r: max_rel(
                zip(r["vacuum_closed"], (r["budget"].pi_12, r["budget"].pi_11, r["budget"].pi_22))
            ),
        ),
        (
            "total_current_closed",
            lambda r: rel_error(r["total_current_closed"], r["budget"].J12 + r["budget"].Jp12),
        ),
    ]


def _sign_checks() -> list[tuple[str, Callable[[dict], "float | None"]]]:
    """Each returns a margin that must be >= -SIGN_THRESHOLD, or None when not applicable."""

    def current_sign(r):
        p, b = r["params"], r["budget"]
        if p.N1 == p.N2:
            return None
        return (b.J12 + b.Jp12) * math.copysign(1.0, p.N1 - p.N2)

    def opposite(r):
        p, b = r["params"], r["budget"]
        if p.lambda_drive <= 0.0 or p.N1 == p.N2:
            return None
        return -b.J12 * b.Jp12

    def dominance(r):
        p, b = r["params"], r["budget"]
        if p.N1 == p.N2:
            return None
        return abs(b.J12) - abs(b.Jp12)

    return [
        ("d1_positive", lambda r: r["coeffs"].d1),
        ("a11_positive", lambda r: r["coeffs"].a11),
        ("a31_positive", lambda r: r["coeffs"].a31),
        ("pi1_nonnegative", lambda r: r["budget"].pi1),
        ("second_law", lambda r: r["pi_trace"]),
        ("physicality", lambda r: r["nu"][1] - 0.5),
        ("total_current_sign", current_sign),
        ("currents_opposite", opposite),
        ("heat_current_dominates", dominance),
    ]


def _digest(params_list) -> str:
    import hashlib

    h = hashlib.sha256()
    for p in params_list:
        h.update(np.array(list(p.as_dict().values())).tobytes())
    return h.hexdigest()[:16]


def run_verify(
    n_samples: int = 1000,
    seed: int = 0,
    tol: float = IDENTITY_TOL,
    trajectory: bool = True,
) -> VerifyReport:
    """Run every property over ``n_samples`` random stable sets (and an optional trajectory check)."""
    params_list = sample_parameter_sets(n_samples, seed)
    rows = ensemble_rows(params_list)
    report = VerifyReport(n_samples=n_samples, seed=seed, tol=tol, sample_digest=_digest(params_list))

    for name, fn in _identity_checks(tol):
        res = PropertyResult(name, "identity", tol=tol)
        for r in rows:
            err = fn(r)
            res.n_checked += 1
            res.n_passed += err <= tol
            res.max_residual = max(res.max_residual, err)
        report.results.append(res)

    for name, fn in _sign_checks():
        res = PropertyResult(name, "sign", tol=SIGN_THRESHOLD)
        worst = math.inf
        for r in rows:
            margin = fn(r)
            if margin is None:
                continue
            res.n_checked += 1
            # zero is allowed only for the non-strict properties
            strict = name in ("d1_positive", "a11_positive", "a31_positive")
            ok = margin > 0.0 if strict else margin >= -SIGN_THRESHOLD
            res.n_passed += ok
            worst = min(worst, margin)
        res.max_residual = max(0.0, -worst) if math.isfinite(worst) else 0.0
        report.results.append(res)

    if trajectory:
        report.results.append(_trajectory_check(seed))
    return report


def _trajectory_check(seed: int) -> PropertyResult:
    """Reduced stochastic oracle at the low-coupling resonance point; |z| < 4 on every entry."""
    dd = build_drift_diffusion(preset_point("fig3", 0.2))
    exact = solve_steady_state(dd).sigma
    cfg = TrajectoryConfig(dt=1e-3, burn_in=25.0, sample_time=1000.0, n_trajectories=8, seed=seed, n_blocks=4)
    out = simulate_covariance(dd, cfg)
    z = np.abs(out.sigma_emp.sigma - exact) / out.stderr
    iu = np.triu_indices(4)
    zs = z[iu]
    return PropertyResult(
        "trajectory_oracle",
        "zscore",
        n_checked=len(zs),
        n_passed=int(np.sum(zs < 4.0)),
        max_residual=float(zs.max()),
        tol=4.0,
    )
