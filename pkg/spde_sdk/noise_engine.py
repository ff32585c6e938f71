"""
Noise Engine Module

Exact sampling of the stochastic convolution increments

    int_{t_(n-1)}^{t_n} exp(-(t_n - s)A) P_M dW(s)
        = sum_k sqrt(mu_k) ((1 - exp(-2 tau_n lambda_k)) / (2 lambda_k))^(1/2) xi_k^n phi_k,

the aggregation identity that rebuilds coarse-mesh increments from fine-mesh
ones, and closed-form series for the L^2 growth and the dyadic block norms of
the stochastic convolution.

Author: graded-spde-sdk developers
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .errors import DomainError, ValidationError
from .increment_stream import normal_table
from .noise_spectra import NoiseSpectrum
from .spectral_core import SpectralField, eigenvalues
from .time_mesh import GradedMesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IncrementPack:
    """
    Standard normal draws xi_k^n of one sample on one mesh.

    Attributes:
        xi: Array of shape (N, M); row n - 1 holds xi_1^n..xi_M^n
        mesh: Mesh the pack was generated for
        M: Number of modes
        master_seed: Experiment seed
        sample_index: Sample number
    """
    xi: np.ndarray
    mesh: GradedMesh
    M: int
    master_seed: int
    sample_index: int

    def __post_init__(self):
        self.xi.setflags(write=False)

    @property
    def N(self) -> int:
        return int(self.xi.shape[0])

    def increments(self, spectrum: NoiseSpectrum, M: int) -> np.ndarray:
        """Convolution increments of shape (N, M), row n - 1 for step n."""
        _check_modes(self.M, M)
        return increment_scales(self.mesh, spectrum, M) * self.xi[:, :M]

    def to_dict(self) -> Dict:
        """Provenance of the pack; the draws are regenerated from it on demand."""
        return {
            "master_seed": self.master_seed,
            "sample_index": self.sample_index,
            "N": self.N,
            "M": self.M,
        }


@dataclass(frozen=True, eq=False)
class CoarsenedPack:
    """
    Increments of a coarse mesh assembled from a fine pack.

    Each coarse step spans ``factor`` fine steps; its increment is the
    aggregate of the fine increments it contains.
    """
    fine: IncrementPack
    mesh: GradedMesh
    factor: int

    @property
    def M(self) -> int:
        return self.fine.M

    @property
    def sample_index(self) -> int:
        return self.fine.sample_index

    def increments(self, spectrum: NoiseSpectrum, M: int) -> np.ndarray:
        """Aggregated increments of shape (N_coarse, M)."""
        _check_modes(self.fine.M, M)
        fine_incs = self.fine.increments(spectrum, M)
        lam = eigenvalues(M)
        rows = [_aggregate(fine_incs, self.fine.mesh.levels, lam, c * self.factor, self.factor)
                for c in range(self.mesh.N)]
        return np.stack(rows)

    def to_dict(self) -> Dict:
        out = self.fine.to_dict()
        out.update({"coarse_N": self.mesh.N, "factor": self.factor})
        return out


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series together with an analytic bound on its tail."""
    value: float
    tail_bound: float
    K: int

    def to_dict(self) -> Dict:
        return {"value": self.value, "tail_bound": self.tail_bound, "K": self.K}


def _check_modes(available: int, requested: int) -> None:
    if not 1 <= requested <= available:
        raise DomainError(f"Pack holds {available} modes, {requested} requested.")


def sample_increments(mesh: GradedMesh, M: int, master_seed: int, sample_index: int) -> IncrementPack:
    """
    Generate the i.i.d. N(0, 1) draws of one sample.

    Args:
        mesh: Time mesh; one row of draws per step
        M: Number of modes
        master_seed: 64-bit experiment seed
        sample_index: Sample number

    Returns:
        An immutable IncrementPack
    """
    xi = normal_table(master_seed, sample_index, mesh.N, M)
    logger.debug("Generated increments: sample=%d N=%d M=%d", sample_index, mesh.N, M)
    return IncrementPack(xi=xi, mesh=mesh, M=int(M), master_seed=int(master_seed),
                         sample_index=int(sample_index))


def coarsen_pack(pack: IncrementPack, coarse_mesh: GradedMesh) -> CoarsenedPack:
    """Wrap a fine pack so it drives a nested coarse mesh."""
    if not coarse_mesh.is_nested_in(pack.mesh):
        raise ValidationError(
            f"Mesh with N={coarse_mesh.N} is not nested in the pack's mesh (N={pack.mesh.N}).")
    return CoarsenedPack(fine=pack, mesh=coarse_mesh, factor=pack.mesh.N // coarse_mesh.N)


def increment_variances(mesh: GradedMesh, spectrum: NoiseSpectrum, M: int) -> np.ndarray:
    """mu_k (1 - exp(-2 tau_n lambda_k)) / (2 lambda_k) as an (N, M) array."""
    lam = eigenvalues(M)
    taus = mesh.steps[:, None]
    return spectrum.weights(M) * -np.expm1(-2.0 * taus * lam) / (2.0 * lam)


def increment_scales(mesh: GradedMesh, spectrum: NoiseSpectrum, M: int) -> np.ndarray:
    """Standard deviations of the convolution increments, shape (N, M)."""
    return np.sqrt(increment_variances(mesh, spectrum, M))


def convolution_increment(pack: IncrementPack, n: int, spectrum: NoiseSpectrum, M: int) -> SpectralField:
    """
    Exact sample of int_{t_(n-1)}^{t_n} exp(-(t_n - s)A) P_M dW(s).

    Args:
        pack: Draws of the sample
        n: Step index, 1 <= n <= N
        spectrum: Noise spectrum
        M: Number of modes

    Returns:
        Field with coefficients sqrt(mu_k (1 - exp(-2 tau_n lambda_k))/(2 lambda_k)) xi_k^n
    """
    if not 1 <= n <= pack.N:
        raise DomainError(f"Step index {n} is outside 1..{pack.N}.")
    return SpectralField(pack.increments(spectrum, M)[n - 1])


def _aggregate(incs: np.ndarray, levels: np.ndarray, lam: np.ndarray, n: int, m: int) -> np.ndarray:
    end = levels[n + m]
    acc = np.exp(-(end - levels[n + 1]) * lam) * incs[n]
    for j in range(2, m + 1):
        acc = acc + np.exp(-(end - levels[n + j]) * lam) * incs[n + j - 1]
    return acc


def aggregate_increments(pack: IncrementPack, spectrum: NoiseSpectrum, n: int, m: int, M: int) -> SpectralField:
    """
    Sample of int_{t_n}^{t_(n+m)} exp(-(t_(n+m) - s)A) P_M dW(s) from fine increments.

    Uses sum_{j=1}^m exp(-(t_(n+m) - t_(n+j)) lambda_k) inc_(n+j, k), summed in
    increasing j.

    Args:
        pack: Fine-mesh draws
        spectrum: Noise spectrum
        n: Starting level, n >= 0
        m: Number of fine steps spanned, m >= 1
        M: Number of modes

    Returns:
        The aggregated increment
    """
    if n < 0 or m < 1 or n + m > pack.N:
        raise DomainError(f"Span n={n}, m={m} is outside the mesh with N={pack.N}.")
    incs = pack.increments(spectrum, M)
    return SpectralField(_aggregate(incs, pack.mesh.levels, eigenvalues(M), n, m))


def _l2_terms(t: float, spectrum: NoiseSpectrum, K: int) -> np.ndarray:
    lam = eigenvalues(K)
    return spectrum.weights(K) * -np.expm1(-2.0 * t * lam) / (2.0 * lam)


def convolution_l2_sq_exact(t: float, spectrum: NoiseSpectrum, K: int) -> SeriesValue:
    """
    E||int_0^t exp(-(t - s)A) dW(s)||^2 truncated at K modes.

    Args:
        t: Time, t > 0
        spectrum: Noise spectrum
        K: Truncation, K >= 1

    Returns:
        sum_{k<=K} mu_k (1 - exp(-2 t lambda_k))/(2 lambda_k) and the tail bound
        sum_{k>K} mu_k/(2 lambda_k)
    """
    if t <= 0:
        raise DomainError(f"Time must be positive, got {t}.")
    if K < 1:
        raise DomainError(f"Truncation must be positive, got {K}.")
    value = math.fsum(_l2_terms(t, spectrum, K).tolist())
    tail = spectrum.tail_sum(K, 2.0) / (2.0 * math.pi ** 2)
    return SeriesValue(value=value, tail_bound=tail, K=K)


def _block_terms(t: float, alpha: float, spectrum: NoiseSpectrum, K: int) -> np.ndarray:
    lam = eigenvalues(K)
    return spectrum.weights(K) * lam ** (alpha - 1.0) * -np.expm1(-2.0 * t * lam) / 2.0


def besov_block_bound_exact(t: float, alpha: float, spectrum: NoiseSpectrum, j: int) -> float:
    """
    Exact Ḣ^alpha norm of dyadic block j of the stochastic convolution at time t.

    Returns:
        (sum_{k=2^(j-1)}^{2^j - 1} mu_k lambda_k^(alpha-1) (1 - exp(-2 t lambda_k))/2)^(1/2)
    """
    if t <= 0:
        raise DomainError(f"Time must be positive, got {t}.")
    if j < 1:
        raise DomainError(f"Block index must be positive, got {j}.")
    lo = 2 ** (j - 1)
    terms = _block_terms(t, alpha, spectrum, 2 ** j - 1)[lo - 1:]
    return math.sqrt(math.fsum(terms))


def besov_block_profile(t: float, alpha: float, spectrum: NoiseSpectrum, J: int) -> np.ndarray:
    """Block norms for j = 1..J in one pass; entry j - 1 matches besov_block_bound_exact."""
    if t <= 0:
        raise DomainError(f"Time must be positive, got {t}.")
    if J < 1:
        raise DomainError(f"Block count must be positive, got {J}.")
    terms = _block_terms(t, alpha, spectrum, 2 ** J - 1).tolist()
    return np.array([math.sqrt(math.fsum(terms[2 ** (j - 1) - 1:2 ** j - 1]))
                     for j in range(1, J + 1)])


def increment_scaling_exact(t1: float, t2: float, spectrum: NoiseSpectrum, K: int) -> float:
    """
    E||int_{t2}^{t1} exp(-(t1 - s)A) dW(s)||^2 truncated at K modes.

    Depends on the gap t1 - t2 only; diagnostics compare it with (t1 - t2)^alpha.
    """
    if t2 < 0 or t2 >= t1:
        raise DomainError(f"Need 0 <= t2 < t1, got t1={t1}, t2={t2}.")
    return convolution_l2_sq_exact(t1 - t2, spectrum, K).value


def sobolev_series_partial(alpha: float, spectrum: NoiseSpectrum, K: int) -> float:
    """Undamped series sum_{k<=K} mu_k lambda_k^(alpha - 1)."""
    if K < 1:
        raise DomainError(f"Truncation must be positive, got {K}.")
    lam = eigenvalues(K)
    return math.fsum((spectrum.weights(K) * lam ** (alpha - 1.0)).tolist())
