"""Stochastic oracle: Euler-Maruyama ensembles of the quadrature Langevin equations.

The quantum noise is replaced by classical white noise with the same
symmetrized correlations, ``<f_i(t) f_j(t')> = D_ij delta(t - t')``, so the
stationary covariance of

    du = A u dt + S dW,   S S^T = D

solves the same Lyapunov equation as the quantum problem.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from numpy.typing import NDArray

from .errors import DivergenceError, InstabilityError
from .lyapunov import CovarianceMatrix
from .model import DriftDiffusion, drift_eigenvalues

__all__ = ["TrajectoryConfig", "TrajectoryResult", "StepSizeWarning", "simulate_covariance", "RNG_ALGORITHM"]

RNG_ALGORITHM = "numpy.random.PCG64, one SeedSequence.spawn child per trajectory"
_CHUNK_STEPS = 1 << 15


class StepSizeWarning(UserWarning):
    """dt times the spectral radius of A exceeds the recommended 0.1."""


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float = 5e-4
    burn_in: float = 50.0
    sample_time: float = 1e4
    n_trajectories: int = 16
    seed: int = 0
    n_blocks: int = 8  # batch-means blocks per trajectory, for the standard error

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.burn_in < 0.0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if not self.sample_time > 0.0:
            raise ValueError(f"sample_time must be > 0, got {self.sample_time}")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if self.n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        if self.n_trajectories * self.n_blocks < 2:
            raise ValueError("need at least two batches to estimate a standard error")


@dataclass(frozen=True)
class TrajectoryResult:
    sigma_emp: CovarianceMatrix
    stderr: NDArray[np.float64]
    metadata: dict = field(default_factory=dict)


@numba.njit(cache=True)
def _em_chunk(u, a, scale, noise, dt, acc, record):
    n_steps, n_traj, dim = noise.shape
    du = np.empty(dim)
    for k in range(n_steps):
        for t in range(n_traj):
            for i in range(dim):
                s = 0.0
                for j in range(dim):
                    s += a[i, j] * u[t, j]
                du[i] = s
            for i in range(dim):
                u[t, i] += dt * du[i] + scale[i] * noise[k, t, i]
            if record:
                for i in range(dim):
                    for j in range(i, dim):
                        acc[t, i, j] += u[t, i] * u[t, j]


def _advance(u, a, scale, gens, n_steps, dt, acc, record):
    n_traj = u.shape[0]
    done = 0
    while done < n_steps:
        k = min(_CHUNK_STEPS, n_steps - done)
        noise = np.empty((k, n_traj, 4))
        for t, gen in enumerate(gens):
            noise[:, t, :] = gen.standard_normal((k, 4))
        _em_chunk(u, a, scale, noise, dt, acc, record)
        if not np.all(np.isfinite(u)):
            raise DivergenceError("trajectory state became non-finite")
        done += k


def simulate_covariance(dd: DriftDiffusion, cfg: TrajectoryConfig) -> TrajectoryResult:
    """Time-and-ensemble averaged covariance of Euler-Maruyama trajectories.

    Every trajectory starts at the origin, is advanced through ``burn_in`` and
    then sampled at every step for ``sample_time``.  The sampling window is cut
    into ``n_blocks`` equal blocks; the block means of all trajectories form the
    batches whose spread gives the standard error.

    Raises
    ------
    InstabilityError
        For a drift matrix with an eigenvalue of non-negative real part.
    DivergenceError
        If the state becomes non-finite.
    """
    a = np.ascontiguousarray(dd.a_matrix, dtype=float)
    eig = drift_eigenvalues(a)
    if not np.max(eig.real) < 0.0:
        raise InstabilityError("cannot sample the stationary state of an unstable drift")
    radius = float(np.max(np.abs(eig)))
    if cfg.dt * radius >= 0.1:
        warnings.warn(
            f"dt * spectral radius = {cfg.dt * radius:.3g} >= 0.1; Euler-Maruyama bias may dominate",
            StepSizeWarning,
            stacklevel=2,
        )

    dt = cfg.dt
    scale = np.sqrt(np.diag(dd.d_matrix) * dt)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trajectories)
    gens = [np.random.Generator(np.random.PCG64(c)) for c in children]

    n_traj = cfg.n_trajectories
    u = np.zeros((n_traj, 4))
    acc = np.zeros((n_traj, 4, 4))
    _advance(u, a, scale, gens, round(cfg.burn_in / dt), dt, acc, False)

    block_steps = max(1, round(cfg.sample_time / dt / cfg.n_blocks))
    batches = np.empty((n_traj, cfg.n_blocks, 4, 4))
    for b in range(cfg.n_blocks):
        acc[:] = 0.0
        _advance(u, a, scale, gens, block_steps, dt, acc, True)
        upper = acc / block_steps
        batches[:, b] = upper + np.triu(upper, 1).transpose(0, 2, 1)

    flat = batches.reshape(-1, 4, 4)
    n_batches = flat.shape[0]
    mean = flat.mean(axis=0)
    stderr = flat.std(axis=0, ddof=1) / math.sqrt(n_batches)
    metadata = {
        "scheme": "Euler-Maruyama",
        "rng": RNG_ALGORITHM,
        "seed": cfg.seed,
        "dt": dt,
        "burn_in_steps": round(cfg.burn_in / dt),
        "steps_per_block": block_steps,
        "n_blocks": cfg.n_blocks,
        "n_trajectories": n_traj,
        "n_batches": n_batches,
        "dt_times_spectral_radius": cfg.dt * radius,
    }
    return TrajectoryResult(sigma_emp=CovarianceMatrix(mean), stderr=stderr, metadata=metadata)
