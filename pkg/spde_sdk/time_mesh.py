"""
Time Mesh Module

Graded time meshes t_n = T (n/N)^(1/(1-gamma)), whose step sizes behave like
tau_n ~ t_n^gamma tau and concentrate levels near t = 0. Meshes with 2N
steps contain the N-step mesh at their even levels, which is what lets a
coarse solution be driven by noise generated on a fine mesh.

Author: graded-spde-sdk developers
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError, ValidationError

logger = logging.getLogger(__name__)

RATIO_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class GradedMesh:
    """
    Time levels 0 = t_0 < ... < t_N = T with grading metadata.

    Attributes:
        levels: t_0..t_N
        gamma: Grading exponent in [0, 1)
        tau: Nominal maximal step size T^(1-gamma) / ((1-gamma) N)
    """
    levels: np.ndarray
    gamma: float
    tau: float

    def __post_init__(self):
        levels = np.array(self.levels, dtype=np.float64, copy=True).reshape(-1)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def N(self) -> int:
        return int(self.levels.size - 1)

    @property
    def T(self) -> float:
        return float(self.levels[-1])

    @property
    def steps(self) -> np.ndarray:
        """tau_1..tau_N (index 0 holds tau_1)."""
        return np.diff(self.levels)

    def step(self, n: int) -> float:
        """Step size tau_n = t_n - t_(n-1), 1 <= n <= N."""
        if not 1 <= n <= self.N:
            raise DomainError(f"Step index {n} is outside 1..{self.N}.")
        return float(self.levels[n] - self.levels[n - 1])

    def is_nested_in(self, fine: "GradedMesh") -> bool:
        """True when every level of this mesh is a level of ``fine`` at a fixed stride."""
        if fine.N % self.N:
            return False
        return bool(np.array_equal(fine.levels[::fine.N // self.N], self.levels))

    def to_dict(self) -> Dict:
        """Convert to dictionary."""
        return {
            "N": self.N,
            "T": self.T,
            "gamma": self.gamma,
            "tau": self.tau,
            "levels": [float(t) for t in self.levels],
        }


def graded_mesh(T: float, N: int, gamma: float) -> GradedMesh:
    """
    Build the graded mesh t_n = T (n/N)^(1/(1-gamma)).

    Args:
        T: Final time, T > 0
        N: Number of steps, N >= 1
        gamma: Grading exponent in [0, 1); gamma = 0 gives the uniform mesh

    Returns:
        A GradedMesh with tau = T^(1-gamma) / ((1-gamma) N)
    """
    if T <= 0:
        raise DomainError(f"Final time must be positive, got {T}.")
    if N < 1:
        raise DomainError(f"Step count must be positive, got {N}.")
    if not 0 <= gamma < 1:
        raise DomainError(f"Grading exponent must lie in [0, 1), got {gamma}.")
    r = 1.0 / (1.0 - gamma)
    n = np.arange(N + 1, dtype=np.float64)
    levels = T * (n / N) ** r
    levels[-1] = T
    tau = T ** (1.0 - gamma) / ((1.0 - gamma) * N)
    return GradedMesh(levels=levels, gamma=float(gamma), tau=float(tau))


def steps_for_tau(T: float, gamma: float, tau: float) -> int:
    """Step count whose nominal maximal step size is closest to ``tau``."""
    if tau <= 0:
        raise DomainError(f"Nominal step size must be positive, got {tau}.")
    return max(1, int(round(T ** (1.0 - gamma) / ((1.0 - gamma) * tau))))


def verify_grading(mesh: GradedMesh) -> Tuple[float, float]:
    """
    Check the mesh invariants and measure the grading constants.

    Args:
        mesh: Mesh to verify

    Returns:
        (c_min, c_max), the extremes of tau_n / (t_n^gamma tau) over n >= 1

    Raises:
        ValidationError: identifying the first index that breaks an invariant
    """
    t = mesh.levels
    if t[0] != 0.0:
        raise ValidationError(f"Mesh must start at 0, got t_0={t[0]}.", index=0)
    taus = np.diff(t)
    bad = np.flatnonzero(taus <= 0)
    if bad.size:
        n = int(bad[0]) + 1
        raise ValidationError(f"Mesh is not strictly increasing at n={n}.", index=n)

    ratios = taus / (t[1:] ** mesh.gamma * mesh.tau)
    c_min, c_max = float(ratios.min()), float(ratios.max())

    upper = 2.0 ** (1.0 / (1.0 - mesh.gamma))
    consecutive = taus[1:] / taus[:-1]
    low = np.flatnonzero(consecutive < 1.0 - RATIO_TOLERANCE)
    high = np.flatnonzero(consecutive > upper * (1.0 + RATIO_TOLERANCE))
    if low.size or high.size:
        n = int(min(np.concatenate([low, high]))) + 2
        raise ValidationError(
            f"Consecutive step ratio tau_{n}/tau_{n - 1}={consecutive[n - 2]:.6g} "
            f"leaves [1, {upper:.6g}].", index=n)

    logger.debug("Mesh N=%d gamma=%.3f: c_min=%.6g c_max=%.6g", mesh.N, mesh.gamma, c_min, c_max)
    return c_min, c_max


def gamma_lower_bound(alpha: float, beta: float) -> float:
    """
    Smallest admissible grading exponent, max{1/2, 1 - (1 + beta)/alpha}.

    Args:
        alpha: Noise regularity exponent in (0, 1]
        beta: Initial-data regularity, beta > -1

    Returns:
        The exclusive lower bound on gamma
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"Noise exponent alpha must lie in (0, 1], got {alpha}.")
    if beta <= -1:
        raise DomainError(f"Initial-data exponent beta must exceed -1, got {beta}.")
    return max(0.5, 1.0 - (1.0 + beta) / alpha)


def check_gamma(gamma: float, alpha: float, beta: float, override: bool = False) -> float:
    """
    Validate a grading exponent against gamma_lower_bound.

    Returns the bound. Raises ValidationError when gamma does not exceed it,
    unless ``override`` is set, in which case only a warning is logged. A beta
    above alpha lies outside the range the bound was derived for and is
    reported as a warning.
    """
    bound = gamma_lower_bound(alpha, beta)
    if beta > alpha:
        logger.warning("beta=%.3g exceeds alpha=%.3g; the gamma bound %.3g is outside its "
                       "derived range and is applied as-is.", beta, alpha, bound)
    if not bound < gamma < 1:
        message = (f"gamma={gamma} must satisfy {bound:.6g} < gamma < 1 "
                   f"for alpha={alpha}, beta={beta}.")
        if override:
            logger.warning("%s Continuing because the gamma override is set.", message)
        else:
            raise ValidationError(message, key="gamma")
    return bound


def mesh_rows(mesh: GradedMesh):
    """(n, t_n, tau_n) rows for a mesh dump; tau_0 is reported as 0."""
    taus = np.concatenate([[0.0], mesh.steps])
    return [(n, float(mesh.levels[n]), float(taus[n])) for n in range(mesh.N + 1)]


def nominal_step_count(mesh: GradedMesh) -> float:
    """Ratio N tau / T, the constant hidden in 'N ~ T/tau'."""
    return mesh.N * mesh.tau / mesh.T
