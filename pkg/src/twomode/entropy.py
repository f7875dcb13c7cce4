"""Wigner entropy, steady-state entropy production and its decompositions."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .closedform import ClosedFormCoefficients, coefficients
from .errors import InstabilityError, ParameterDomainError
from .lyapunov import SigmaLike, _as_array, solve_steady_state
from .model import DriftDiffusion, SystemParams, build_drift_diffusion, thermal_occupation

__all__ = [
    "EntropyBudget",
    "ClassicalLimit",
    "wigner_entropy",
    "entropy_production_trace",
    "entropy_production_offdiag",
    "decompose",
    "classical_limit_pi1",
    "SIGN_THRESHOLD",
]

# only used to decide signs; reported values are never clamped
SIGN_THRESHOLD = 1e-10

_N_MODES = 2


@dataclass(frozen=True)
class EntropyBudget:
    """Steady-state entropy production with every decomposition and current.

    ``entropy_flux`` is reported as ``-pi_s_trace`` (flux counted as leaving
    the system), so it is non-positive whenever production is non-negative.
    """

    pi_s_trace: float
    pi_s_offdiag: float
    pi_s_per_mode: tuple
    pi0: float
    pi1: float
    pi_components: tuple  # (pi_11, pi_12, pi_21, pi_22)
    J12: float
    Jp12: float
    j1: float
    j2: float
    j3: float
    occupations: tuple  # (N1s, N2s)
    entropy_flux: float

    @property
    def pi_s(self) -> float:
        return self.pi_s_trace

    @property
    def pi_11(self) -> float:
        return self.pi_components[0]

    @property
    def pi_12(self) -> float:
        return self.pi_components[1]

    @property
    def pi_21(self) -> float:
        return self.pi_components[2]

    @property
    def pi_22(self) -> float:
        return self.pi_components[3]

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("pi_s_per_mode", "pi_components", "occupations"):
            out[key] = list(out[key])
        return out


class ClassicalLimit(NamedTuple):
    pi1_approx: float
    J0: float
    pi1_exact: float


def wigner_entropy(sigma: SigmaLike) -> float:
    """Differential entropy of the Gaussian Wigner function, ``n ln(2 pi e) + ln(det sigma)/2``."""
    s = _as_array(sigma)
    sign, logdet = np.linalg.slogdet(s)
    if sign <= 0:
        raise ParameterDomainError("covariance matrix must have positive determinant")
    return _N_MODES * math.log(2.0 * math.pi * math.e) + 0.5 * float(logdet)


def entropy_production_trace(dd: DriftDiffusion, sigma: SigmaLike) -> tuple[float, tuple[float, float]]:
    """Entropy production ``Tr(2 A_irr D^-1 A_irr sigma + A_irr)`` and its per-mode split.

    Returns ``(pi_s, (pi_mode1, pi_mode2))`` where
    ``pi_mode1 = 2 kappa ((s11 + s22)/N1 - 1)`` and likewise for mode 2.
    """
    s = _as_array(sigma)
    a_irr = np.diag(dd.a_irr)
    d = np.diag(dd.d_matrix)
    # diagonal of 2 A_irr D^-1 A_irr sigma + A_irr
    terms = 2.0 * a_irr**2 / d * np.diag(s) + a_irr
    mode1 = float(terms[0] + terms[1])
    mode2 = float(terms[2] + terms[3])
    return mode1 + mode2, (mode1, mode2)


def entropy_production_offdiag(params: SystemParams, sigma: SigmaLike) -> float:
    """Entropy production from the three inter-/intra-mode correlations only."""
    s = _as_array(sigma)
    p = params
    return (
        2.0 * p.G / p.N2 * s[0, 3]
        + 2.0 * p.G / p.N1 * s[1, 2]
        - 2.0 * (p.Omega - p.omega) / p.N2 * s[2, 3]
    )


def decompose(
    params: SystemParams,
    coeffs: ClosedFormCoefficients,
    sigma: Optional[SigmaLike] = None,
) -> EntropyBudget:
    """Assemble the full budget from the coefficients and the steady covariance.

    ``sigma`` defaults to the Lyapunov solution for ``params``.  The
    coefficient-based pieces (``pi0``, ``pi1``, currents, components,
    occupations) come from ``coeffs``; the trace and off-diagonal totals and the
    excitation currents ``j1..j3`` come from ``sigma``.
    """
    p = params
    dd = build_drift_diffusion(p)
    if sigma is None:
        sigma = solve_steady_state(dd)
    s = _as_array(sigma)
    c = coeffs
    G, L, N1, N2 = p.G, p.lambda_drive, p.N1, p.N2
    split = p.Omega - p.omega  # = 4 Lambda

    pi_trace, per_mode = entropy_production_trace(dd, s)
    pi_off = entropy_production_offdiag(p, s)

    pi_11 = G * c.a21
    pi_12 = G * c.a22
    pi_21 = G * c.a11 - 4.0 * L * c.a31
    pi_22 = G * c.a12 - 4.0 * L * c.a32
    pi0 = G * (c.a12 + c.a11 + c.a22 + c.a21) - 4.0 * L * (c.a32 + c.a31)
    pi1 = (pi_21 / N2 - pi_12 / N1) * (N1 - N2)

    J12 = G * c.a11 * (N1 - N2)
    Jp12 = -split * (N1 - N2) * c.a31

    n1s = (1.0 + pi_11 / (2.0 * p.kappa)) * N1 + pi_12 / (2.0 * p.kappa) * N2
    n2s = (1.0 + pi_22 / (2.0 * p.gamma)) * N2 + pi_21 / (2.0 * p.gamma) * N1

    j3 = -split * s[2, 3]
    return EntropyBudget(
        pi_s_trace=pi_trace,
        pi_s_offdiag=pi_off,
        pi_s_per_mode=per_mode,
        pi0=pi0,
        pi1=pi1,
        pi_components=(pi_11, pi_12, pi_21, pi_22),
        J12=J12,
        Jp12=Jp12,
        j1=2.0 * G * s[0, 3],
        j2=2.0 * G * s[1, 2] + j3,
        j3=j3,
        occupations=(n1s, n2s),
        entropy_flux=-pi_trace,
    )


def classical_limit_pi1(params: SystemParams, T1: float, T2: float) -> ClassicalLimit:
    """High-temperature (Onsager) form of the thermal entropy production.

    The bath occupations are set from ``T1`` (at frequency ``delta``) and ``T2``
    (at ``omega0``); ``nbar1``/``nbar2`` in ``params`` are ignored.  Returns the
    approximation ``J0 (1/T2 - 1/T1)`` with ``J0 = omega G a0 (N1 - N2)/2``
    together with the exact thermal part for the same occupations.  The regime
    (Lambda = 0, delta ~ omega, T2 >> omega) is not enforced.
    """
    if T1 <= 0.0 or T2 <= 0.0:
        raise ParameterDomainError(f"temperatures must be > 0, got T1={T1}, T2={T2}")
    p = dataclasses.replace(
        params,
        nbar1=thermal_occupation(T1, params.delta),
        nbar2=thermal_occupation(T2, params.omega0),
    )
    c = coefficients(p)
    if c.a0 is None:
        raise InstabilityError("undriven stability parameter is not positive; a0 undefined")
    J0 = p.omega * p.G * c.a0 * (p.N1 - p.N2) / 2.0
    approx = J0 * (1.0 / T2 - 1.0 / T1)
    pi_21 = p.G * c.a11 - 4.0 * p.lambda_drive * c.a31
    exact = (pi_21 / p.N2 - p.G * c.a22 / p.N1) * (p.N1 - p.N2)
    return ClassicalLimit(pi1_approx=approx, J0=J0, pi1_exact=exact)
