"""Steady-state and transient covariance of the quadratures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import DivergenceError, InstabilityError, NumericalDegeneracyError
from .model import DriftDiffusion, drift_eigenvalues

__all__ = [
    "CovarianceMatrix",
    "SYMPLECTIC_FORM",
    "PHYSICALITY_TOL",
    "solve_steady_state",
    "lyapunov_residual",
    "evolve",
    "evolve_series",
    "symplectic_eigenvalues",
    "vacuum",
    "is_physical",
]

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
SYMPLECTIC_FORM = scipy.linalg.block_diag(_J, _J)
SYMPLECTIC_FORM.setflags(write=False)

PHYSICALITY_TOL = 1e-10
_DIVERGENCE_BOUND = 1e150

# (i, j) pairs with i <= j, row-major; index of each pair in the packed vector
_UPPER = [(i, j) for i in range(4) for j in range(i, 4)]
_PACK = {}
for _n, (_i, _j) in enumerate(_UPPER):
    _PACK[_i, _j] = _PACK[_j, _i] = _n


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric 4x4 matrix of symmetrized second moments, order (x, y, q, p)."""

    sigma: NDArray[np.float64]

    def __post_init__(self):
        arr = np.array(self.sigma, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError(f"covariance must be 4x4, got shape {arr.shape}")
        arr = 0.5 * (arr + arr.T)
        arr.setflags(write=False)
        object.__setattr__(self, "sigma", arr)

    def __getitem__(self, idx):
        return self.sigma[idx]

    def __array__(self, dtype=None, copy=None):
        return self.sigma if dtype is None else self.sigma.astype(dtype)

    def packed(self) -> NDArray[np.float64]:
        """The 10 independent entries, upper triangle row by row."""
        return np.array([self.sigma[i, j] for i, j in _UPPER])

    @classmethod
    def from_packed(cls, values) -> "CovarianceMatrix":
        s = np.empty((4, 4))
        for n, (i, j) in enumerate(_UPPER):
            s[i, j] = s[j, i] = values[n]
        return cls(s)


SigmaLike = Union[CovarianceMatrix, NDArray[np.float64]]


def _as_array(sigma: SigmaLike) -> NDArray[np.float64]:
    if isinstance(sigma, CovarianceMatrix):
        return sigma.sigma
    arr = np.asarray(sigma, dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"covariance must be 4x4, got shape {arr.shape}")
    return arr


def vacuum() -> CovarianceMatrix:
    return CovarianceMatrix(0.5 * np.eye(4))


def _lyapunov_operator(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Matrix of sigma -> A sigma + sigma A^T restricted to symmetric sigma (10x10)."""
    m = np.zeros((10, 10))
    for row, (i, j) in enumerate(_UPPER):
        for k in range(4):
            m[row, _PACK[k, j]] += a[i, k]
            m[row, _PACK[i, k]] += a[j, k]
    return m


def lyapunov_residual(dd: DriftDiffusion, sigma: SigmaLike) -> float:
    """Max-norm of ``A sigma + sigma A^T + D``."""
    s = _as_array(sigma)
    a = dd.a_matrix
    return float(np.max(np.abs(a @ s + s @ a.T + dd.d_matrix)))


def solve_steady_state(dd: DriftDiffusion) -> CovarianceMatrix:
    """Solve ``A sigma + sigma A^T = -D`` for the stationary covariance.

    The symmetric unknown is packed into 10 entries and the resulting dense
    10x10 system is solved by LU with partial pivoting, followed by one step of
    iterative refinement.

    Raises
    ------
    InstabilityError
        If some eigenvalue of the drift matrix has non-negative real part.
    NumericalDegeneracyError
        If the packed system is numerically singular (e.g. exactly at eta = 0).
    """
    a = dd.a_matrix
    max_re = float(np.max(drift_eigenvalues(a).real))
    if not max_re < 0.0:
        raise InstabilityError(f"drift matrix is not stable (max Re eigenvalue = {max_re:.6g})")

    m = _lyapunov_operator(a)
    rhs = -np.array([dd.d_matrix[i, j] for i, j in _UPPER])
    lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= 1e-14 * pivots.max():
        raise NumericalDegeneracyError("Lyapunov system is numerically singular")
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    x += scipy.linalg.lu_solve((lu, piv), rhs - m @ x, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise NumericalDegeneracyError("Lyapunov solve produced non-finite entries")
    return CovarianceMatrix.from_packed(x)


def _rhs(a, d, s):
    return a @ s + s @ a.T + d


def evolve_series(
    dd: DriftDiffusion, sigma0: SigmaLike, t_final: float, dt: float, every: int = 1
) -> Iterator[tuple[float, CovarianceMatrix]]:
    """Yield ``(t, sigma(t))`` for ``d sigma/dt = A sigma + sigma A^T + D``.

    Fixed-step classical RK4.  The step is shrunk slightly so that an integer
    number of steps lands exactly on ``t_final``.  The initial point is always
    yielded, the final point always; intermediate points every ``every`` steps.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < 0.0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    if every < 1:
        raise ValueError("every must be >= 1")
    a, d = dd.a_matrix, dd.d_matrix
    s = np.array(_as_array(sigma0), dtype=float)
    s = 0.5 * (s + s.T)
    yield 0.0, CovarianceMatrix(s)
    n_steps = math.ceil(t_final / dt - 1e-12) if t_final > 0.0 else 0
    if n_steps == 0:
        return
    h = t_final / n_steps
    for n in range(1, n_steps + 1):
        k1 = _rhs(a, d, s)
        k2 = _rhs(a, d, s + 0.5 * h * k1)
        k3 = _rhs(a, d, s + 0.5 * h * k2)
        k4 = _rhs(a, d, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s = 0.5 * (s + s.T)
        if not np.all(np.isfinite(s)) or np.max(np.abs(s)) > _DIVERGENCE_BOUND:
            raise DivergenceError(f"covariance diverged at t = {n * h:.6g}")
        if n % every == 0 or n == n_steps:
            yield n * h, CovarianceMatrix(s)


def evolve(dd: DriftDiffusion, sigma0: SigmaLike, t_final: float, dt: float) -> CovarianceMatrix:
    """Integrate the covariance equation up to ``t_final`` and return sigma(t_final)."""
    if t_final == 0.0:
        return sigma0 if isinstance(sigma0, CovarianceMatrix) else CovarianceMatrix(sigma0)
    last = None
    for _, last in evolve_series(dd, sigma0, t_final, dt, every=1 << 62):
        pass
    return last


def symplectic_eigenvalues(sigma: SigmaLike) -> tuple[float, float]:
    """Return ``(nu_plus, nu_minus)`` of a two-mode covariance matrix.

    With ``sigma = L L^T`` the matrix ``i L^T Omega L`` is Hermitian with
    eigenvalues ``+-nu``, so a symmetric eigensolver keeps full accuracy even
    when the two symplectic eigenvalues coincide.
    """
    s = _as_array(sigma)
    try:
        low = np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise NumericalDegeneracyError("covariance is not positive definite") from None
    herm = 1j * (low.T @ SYMPLECTIC_FORM @ low)
    ev = np.linalg.eigvalsh(herm)  # ascending: -nu_plus, -nu_minus, nu_minus, nu_plus
    return float(ev[3]), float(ev[2])


def is_physical(sigma: SigmaLike, tol: float = PHYSICALITY_TOL) -> bool:
    """Uncertainty relation: both symplectic eigenvalues at least 1/2 - tol."""
    return symplectic_eigenvalues(sigma)[1] >= 0.5 - tol
