"""Physical parameters, drift/diffusion matrices and stability of the two-mode system.

Quadrature ordering throughout is ``(x, y, q, p)``: ``(x, y)`` belong to mode 1
(frequency ``delta``, damping ``kappa``) and ``(q, p)`` to the parametrically
driven mode 2 (bare frequency ``omega0``, damping ``gamma``).  Units are natural,
hbar = k_B = 1, and frequencies are usually measured in units of ``omega0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .errors import ParameterDomainError

__all__ = [
    "SystemParams",
    "DerivedConstants",
    "DriftDiffusion",
    "StabilityReport",
    "derive_constants",
    "build_drift_diffusion",
    "check_stability",
    "characteristic_polynomial",
    "drift_eigenvalues",
    "thermal_occupation",
    "resonant_delta",
]


@dataclass(frozen=True)
class SystemParams:
    """All physical parameters of the model and of both baths.

    Parameters
    ----------
    delta : float
        Frequency of mode 1.
    omega0 : float
        Bare frequency of mode 2; sets the global frequency scale.
    lambda_drive : float
        Parametric amplification strength.
    g_coupling : float
        Mode-mode coupling ``g``; the drift matrix uses ``G = 2 g``.
    kappa, gamma : float
        Dissipation rates of mode 1 and mode 2, strictly positive.
    nbar1, nbar2 : float
        Mean thermal occupations of bath 1 and bath 2.
    """

    delta: float = 1.0
    omega0: float = 1.0
    lambda_drive: float = 0.0
    g_coupling: float = 0.0
    kappa: float = 0.2
    gamma: float = 0.2
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ParameterDomainError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if self.kappa <= 0.0:
            raise ParameterDomainError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma <= 0.0:
            raise ParameterDomainError(f"gamma must be > 0, got {self.gamma}")
        if self.nbar1 < 0.0 or self.nbar2 < 0.0:
            raise ParameterDomainError(
                f"thermal occupations must be >= 0, got nbar1={self.nbar1}, nbar2={self.nbar2}"
            )

    @classmethod
    def from_big_g(cls, G: float, **kwargs) -> "SystemParams":
        """Build from the drift-matrix coupling ``G = 2 g`` instead of ``g``."""
        return cls(g_coupling=G / 2.0, **kwargs)

    @property
    def G(self) -> float:
        return 2.0 * self.g_coupling

    @property
    def N1(self) -> float:
        return 2.0 * self.nbar1 + 1.0

    @property
    def N2(self) -> float:
        return 2.0 * self.nbar2 + 1.0

    @property
    def omega(self) -> float:
        """Lower split frequency ``omega0 - 2 Lambda`` (frequency of q in dp/dt)."""
        return self.omega0 - 2.0 * self.lambda_drive

    @property
    def Omega(self) -> float:
        """Upper split frequency ``omega0 + 2 Lambda``."""
        return self.omega0 + 2.0 * self.lambda_drive

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DerivedConstants:
    n_caps: tuple
    omega_minus: float
    omega_plus: float
    delta_aux: float
    gamma_aux_sq: float  # gamma^2 + omega*Omega, kept signed
    gamma1_aux: float
    kappa1: float
    kappa2: float
    eta: float

    @property
    def gamma_aux(self) -> Optional[float]:
        """``sqrt(gamma^2 + omega*Omega)``, or None when the radicand is negative."""
        if self.gamma_aux_sq < 0.0:
            return None
        return math.sqrt(self.gamma_aux_sq)


@dataclass(frozen=True)
class DriftDiffusion:
    a_matrix: NDArray[np.float64]
    d_matrix: NDArray[np.float64]
    a_irr: NDArray[np.float64]
    params: Optional[SystemParams] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("a_matrix", "d_matrix", "a_irr"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (4, 4):
                raise ValueError(f"{name} must be 4x4, got shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class StabilityReport:
    routh_hurwitz_eta: float
    max_real_eigenvalue: float
    stable: bool


def thermal_occupation(temperature: float, frequency: float) -> float:
    """Bose-Einstein occupation ``1/(exp(frequency/T) - 1)`` with hbar = k_B = 1."""
    if temperature <= 0.0:
        raise ParameterDomainError(f"temperature must be > 0, got {temperature}")
    if frequency <= 0.0:
        raise ParameterDomainError(f"frequency must be > 0, got {frequency}")
    return 1.0 / math.expm1(frequency / temperature)


def resonant_delta(omega0: float, lambda_drive: float) -> float:
    """Mode-1 frequency ``sqrt(Omega * omega)`` that is resonant with the driven mode."""
    prod = (omega0 - 2.0 * lambda_drive) * (omega0 + 2.0 * lambda_drive)
    if prod <= 0.0:
        raise ParameterDomainError("resonance requires omega * Omega > 0")
    return math.sqrt(prod)


def derive_constants(params: SystemParams) -> DerivedConstants:
    p = params
    w, W = p.omega, p.Omega
    delta_sq = p.delta**2 + p.kappa**2
    gamma_sq = p.gamma**2 + w * W
    eta = delta_sq * gamma_sq - p.G**2 * p.delta * w
    return DerivedConstants(
        n_caps=(p.N1, p.N2),
        omega_minus=w,
        omega_plus=W,
        delta_aux=math.sqrt(delta_sq),
        gamma_aux_sq=gamma_sq,
        gamma1_aux=math.sqrt(p.gamma**2 + w**2),
        kappa1=p.gamma + 2.0 * p.kappa,
        kappa2=2.0 * p.gamma + p.kappa,
        eta=eta,
    )


def build_drift_diffusion(params: SystemParams) -> DriftDiffusion:
    p = params
    k, g, G = p.kappa, p.gamma, p.G
    a = np.array(
        [
            [-k, p.delta, 0.0, 0.0],
            [-p.delta, -k, G, 0.0],
            [0.0, 0.0, -g, p.omega],
            [G, 0.0, -p.Omega, -g],
        ]
    )
    d = np.diag([k * p.N1, k * p.N1, g * p.N2, g * p.N2])
    a_irr = np.diag([-k, -k, -g, -g])
    return DriftDiffusion(a_matrix=a, d_matrix=d, a_irr=a_irr, params=params)


def characteristic_polynomial(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Monic characteristic polynomial coefficients (highest power first).

    Faddeev-LeVerrier recursion; exact in rational arithmetic and well behaved
    for the fixed 4x4 size used here.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def drift_eigenvalues(a: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Roots of the characteristic polynomial via its companion matrix."""
    return np.roots(characteristic_polynomial(a)).astype(complex)


def check_stability(params: SystemParams) -> StabilityReport:
    """Eigenvalue-based stability verdict, with the Routh-Hurwitz ``eta`` alongside.

    The eigenvalue test is authoritative.  ``eta > 0`` is only equivalent to it
    when ``delta > 0`` and ``omega > 0``.
    """
    dd = build_drift_diffusion(params)
    eig = drift_eigenvalues(dd.a_matrix)
    max_re = float(np.max(eig.real))
    return StabilityReport(
        routh_hurwitz_eta=derive_constants(params).eta,
        max_real_eigenvalue=max_re,
        stable=bool(max_re < 0.0),
    )
