"""Analytic steady-state coefficients and vacuum entropy-production components.

The off-diagonal stationary covariances are linear in the bath factors
``N_i = 2 nbar_i + 1``::

    sigma_14 = (a11 N1 + a12 N2) / 2
    sigma_23 = (a21 N1 + a22 N2) / 2
    sigma_34 = (a31 N1 + a32 N2) / 2

and this module evaluates ``a_ij`` (plus auxiliaries) in closed form.  All
expressions hold for ``omega > 0`` and ``eta > 0``.  They serve as an analytic
cross-check of the Lyapunov solver, which remains the ground truth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import (
    ClosedFormConditioningWarning,
    ClosedFormDomainError,
    InstabilityError,
    NumericalDegeneracyError,
)
from .model import SystemParams, derive_constants

__all__ = [
    "ClosedFormCoefficients",
    "VacuumComponents",
    "ResonanceValues",
    "coefficients",
    "off_diagonal_covariances",
    "vacuum_components_closed",
    "single_mode_vacuum_production",
    "total_current_closed",
    "resonance_case",
]

_CONDITIONING_RATIO = 1e-6
_RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class ClosedFormCoefficients:
    a11: float
    a12: float
    a21: float
    a22: float
    a31: float
    a32: float
    d1: float
    u: float
    u1: float
    y1: float
    a0: Optional[float]  # None when the undriven stability parameter is not positive
    d0: float
    eta: float


class VacuumComponents(NamedTuple):
    pi_12: float
    pi_11: float
    pi_22: float


class ResonanceValues(NamedTuple):
    pi_0: float
    pi_12: float
    pi_11: float


def _check_domain(params: SystemParams):
    c = derive_constants(params)
    if c.omega_minus <= 0.0:
        raise ClosedFormDomainError(
            f"closed forms require omega = omega0 - 2*Lambda > 0, got {c.omega_minus}"
        )
    if params.delta == 0.0:
        raise ClosedFormDomainError("closed forms require delta != 0")
    if c.eta <= 0.0:
        raise InstabilityError(f"stability parameter eta = {c.eta:.6g} is not positive")
    scale = c.delta_aux**2 * c.gamma_aux_sq
    if c.eta < _CONDITIONING_RATIO * scale:
        warnings.warn(
            f"eta/(delta^2 Gamma^2) = {c.eta / scale:.3g}: close to the stability boundary",
            ClosedFormConditioningWarning,
            stacklevel=3,
        )
    return c


def coefficients(params: SystemParams) -> ClosedFormCoefficients:
    """Evaluate ``a11 ... a32`` and the auxiliary constants.

    Raises
    ------
    ClosedFormDomainError
        If ``omega <= 0`` or ``delta == 0``.
    InstabilityError
        If ``eta <= 0``.
    """
    c = _check_domain(params)
    p = params
    k, g, G, De = p.kappa, p.gamma, p.G, p.delta
    w, W = c.omega_minus, c.omega_plus
    d2 = c.delta_aux**2
    gam2 = c.gamma_aux_sq
    gam1_2 = c.gamma1_aux**2
    k1, k2 = c.kappa1, c.kappa2
    eta = c.eta

    u = g**3 + 4.0 * g**2 * k + d2 * k + 4.0 * g * k**2
    u1 = u + g * w * W
    d1 = 2.0 * eta * (-eta * (g + k) ** 2 + u1 * (g * d2 + k * gam2))
    if d1 == 0.0:
        raise NumericalDegeneracyError("common denominator d1 vanishes")

    split = w * W - w**2  # (Omega - omega) * omega
    common3 = d2 * u1 + eta * (g + k)

    a11 = G * k * g / d1 * (d2 * gam2 * u1 + eta * (gam2 * k1 + d2 * k2))
    a12 = (
        G * De * g / (w * d1)
        * (d2 * gam1_2 * g * u1 - eta * (k * k1 * (w**2 + w * W) + g * (u + k1 * w**2)))
    )
    a21 = G * k * w / (De * d1) * (d2 * gam2 * k * u1 - eta * (d2 * k2**2 + k * g * gam2))
    a22 = a11 - G * k * g / d1 * split * common3
    a31 = G**2 * k * g / d1 * common3 * w
    a32 = g / (w * d1) * (
        d2**2 * gam1_2 * g * u1
        + eta**2 * (g + k) * k1
        - eta * g * d2 * (2.0 * u + k1 * w**2 - k * (d2 + g * k1))
        - eta * g * k * split * (w * W + k1**2)
        - eta * w * W * d2 * (g**2 + k1 * k)
    )
    y1 = (
        u1 * g * gam1_2 * d2**2
        + eta**2 * k * (g + k)
        + eta * k * g * gam1_2 * (k1**2 + W * w)
        - eta * d2 * (gam1_2 * g * k1 + gam2 * k * (g + k))
    )

    # Lambda = 0 reduction: Gamma -> Gamma_1, eta -> eta_1
    eta1 = d2 * gam1_2 - G**2 * De * w
    a0 = None
    if eta1 > 0.0:
        den0 = 2.0 * eta1 * (-eta1 * (g + k) ** 2 + u1 * (g * d2 + k * gam1_2))
        if den0 != 0.0:
            a0 = G * k * g * (d2 * gam1_2 * u1 + eta1 * (gam1_2 * k1 + d2 * k2)) / den0

    return ClosedFormCoefficients(
        a11=a11, a12=a12, a21=a21, a22=a22, a31=a31, a32=a32,
        d1=d1, u=u, u1=u1, y1=y1, a0=a0,
        d0=gam1_2**2 - G**2 * w**2,
        eta=eta,
    )


def off_diagonal_covariances(params: SystemParams, coeffs: ClosedFormCoefficients) -> tuple[float, float, float]:
    """``(sigma_14, sigma_23, sigma_34)`` rebuilt from the coefficients."""
    N1, N2 = params.N1, params.N2
    return (
        0.5 * (coeffs.a11 * N1 + coeffs.a12 * N2),
        0.5 * (coeffs.a21 * N1 + coeffs.a22 * N2),
        0.5 * (coeffs.a31 * N1 + coeffs.a32 * N2),
    )


def single_mode_vacuum_production(params: SystemParams) -> float:
    """Vacuum entropy production of the driven mode alone (G = 0): ``8 gamma Lambda^2 / Gamma^2``.

    At G = 0 the driven mode has ``sigma_34 = -Lambda N2 gamma / Gamma^2``, so
    ``-(Omega - omega) sigma_34 * 2 / N2`` reduces to this expression.
    """
    c = derive_constants(params)
    if c.gamma_aux_sq <= 0.0:
        raise ClosedFormDomainError("requires gamma^2 + omega*Omega > 0")
    return 8.0 * params.gamma * params.lambda_drive**2 / c.gamma_aux_sq


def vacuum_components_closed(params: SystemParams, coeffs: ClosedFormCoefficients) -> VacuumComponents:
    """Closed-form ``pi_12``, ``pi_11`` and ``pi_22`` written directly in the model constants.

    ``pi_22`` is assembled as the single-mode G = 0 production plus ``G a12``
    plus the two squeezing corrections (the second one through ``y1``).
    """
    c = _check_domain(params)
    p = params
    k, g, G, De = p.kappa, p.gamma, p.G, p.delta
    w, W = c.omega_minus, c.omega_plus
    d2, gam2, gam1_2 = c.delta_aux**2, c.gamma_aux_sq, c.gamma1_aux**2
    eta, u1, d1 = c.eta, coeffs.u1, coeffs.d1

    pi_12 = G**2 * k * g / d1 * (
        gam1_2 * d2 * u1 + eta * k * (gam2 + gam1_2 + d2) + eta * g * (2.0 * d2 + gam1_2)
    )
    pi_11 = G**2 * k * w / (De * d1) * (d2 * gam2 * k * u1 - eta * (d2 * c.kappa2**2 + k * g * gam2))
    pi_22 = (
        single_mode_vacuum_production(p)
        + G * coeffs.a12
        + g * (W - w) * gam1_2 / (2.0 * gam2 * w)
        - g * (W - w) / (d1 * w) * coeffs.y1
    )
    return VacuumComponents(pi_12=pi_12, pi_11=pi_11, pi_22=pi_22)


def total_current_closed(params: SystemParams, coeffs: ClosedFormCoefficients) -> float:
    """Heat plus parametric current ``J12 + J'12`` in fully expanded form."""
    c = derive_constants(params)
    p = params
    k, g, G = p.kappa, p.gamma, p.G
    d2, gam2, gam1_2 = c.delta_aux**2, c.gamma_aux_sq, c.gamma1_aux**2
    return (
        G**2 * k * g / coeffs.d1 * (p.N1 - p.N2)
        * (d2 * gam1_2 * coeffs.u1 + c.eta * (gam2 * k + d2 * c.kappa2 + gam1_2 * (k + g)))
    )


def resonance_case(params: SystemParams) -> ResonanceValues:
    """``pi_0``, ``pi_12`` and ``pi_11 (= pi_22)`` for Lambda = 0, gamma = kappa, delta = omega0.

    Raises
    ------
    ClosedFormDomainError
        If the resonance conditions do not hold to within 1e-12.
    InstabilityError
        If ``d0 = Gamma_1^4 - G^2 omega^2 <= 0``.
    """
    p = params
    if abs(p.lambda_drive) > _RESONANCE_TOL:
        raise ClosedFormDomainError(f"resonance formulas need Lambda = 0, got {p.lambda_drive}")
    if abs(p.gamma - p.kappa) > _RESONANCE_TOL:
        raise ClosedFormDomainError(f"resonance formulas need gamma = kappa, got {p.gamma} vs {p.kappa}")
    if abs(p.delta - p.omega0) > _RESONANCE_TOL:
        raise ClosedFormDomainError(f"resonance formulas need delta = omega0, got {p.delta} vs {p.omega0}")
    G, g, w = p.G, p.gamma, p.omega
    gam1_2 = g**2 + w**2
    d0 = gam1_2**2 - G**2 * w**2
    if d0 <= 0.0:
        raise InstabilityError(f"d0 = {d0:.6g} is not positive")
    pref = G**2 * gam1_2 * g
    outer = 4.0 * (G**2 * w**2 + 4.0 * g**2 * gam1_2) * d0
    pi_0 = pref / d0
    pi_12 = pref * (4.0 * d0 + 4.0 * g**2 * gam1_2 + G**2 * w**2) / outer
    pi_11 = pref * w**2 * (5.0 * G**2 - 4.0 * gam1_2) / outer
    total = 2.0 * pi_12 + 2.0 * pi_11
    if not math.isclose(total, pi_0, rel_tol=1e-10, abs_tol=1e-300):
        raise NumericalDegeneracyError(f"component sum {total!r} does not reproduce pi_0 {pi_0!r}")
    return ResonanceValues(pi_0=pi_0, pi_12=pi_12, pi_11=pi_11)
