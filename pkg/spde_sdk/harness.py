"""
Harness Module

Monte Carlo experiments on top of the solver:

    - run_spatial_convergence: E_1(M) = (E||U_M^N - U_2M^N||^2)^(1/2) at a fixed
      fine step, every resolution using a prefix of one increment pack
    - run_temporal_convergence: E_2(tau) = (E||U_tau^N - U_tau/2^2N||^2)^(1/2)
      with M = N, coarse increments aggregated from the finest mesh
    - sample_ensemble / regularity_scan / stability_scan: solution ensembles
      and their regularity diagnostics
    - solve_single, dump_mesh and emit_report for the command-line runner

Samples are distributed over worker processes with an ordered map and reduced
sequentially in sample order, so results do not depend on the worker count.

Author: graded-spde-sdk developers
"""

import logging
import math
from multiprocessing import Pool
from typing import Callable, List, Optional, Sequence, Tuple

from . import __version__
from .config import ExperimentConfig
from .diagnostics import DiagnosticReport, empirical_regularity, stability_profile
from .error_table import ErrorTable, estimate_order
from .field_store import write_mesh_csv, write_sidecar
from .noise_engine import coarsen_pack, sample_increments
from .report_codec import ErrorTableCodec
from .run_ledger import LedgerEntry, RunLedger
from .solver import Trajectory, solve_path
from .spectral_core import EnsembleField, SpectralField
from .time_mesh import GradedMesh, graded_mesh, nominal_step_count, steps_for_tau, verify_grading

logger = logging.getLogger(__name__)

__all__ = [
    "ErrorTable",
    "estimate_order",
    "run_spatial_convergence",
    "run_temporal_convergence",
    "sample_ensemble",
    "regularity_scan",
    "stability_scan",
    "solve_single",
    "dump_mesh",
    "emit_report",
    "record_output",
]


def reference_mesh(cfg: ExperimentConfig, T: Optional[float] = None) -> GradedMesh:
    """Graded mesh on [0, T] whose nominal step is closest to cfg.reference_tau."""
    T = cfg.T if T is None else T
    return graded_mesh(T, steps_for_tau(T, cfg.gamma, cfg.reference_tau), cfg.gamma)


def temporal_meshes(cfg: ExperimentConfig) -> List[GradedMesh]:
    """
    Nested meshes with N_0, 2N_0, ..., 2^L N_0 steps, L = len(cfg.taus).

    N_0 is the step count whose nominal step is closest to cfg.taus[0]; the
    last mesh is the finest and only serves as the fine member of the last pair.
    """
    N0 = steps_for_tau(cfg.T, cfg.gamma, cfg.taus[0])
    return [graded_mesh(cfg.T, N0 * 2 ** i, cfg.gamma) for i in range(len(cfg.taus) + 1)]


def _squared_distance(a: SpectralField, b: SpectralField) -> float:
    diff = (a - b).coeffs
    return math.fsum((diff * diff).tolist())


def _map_samples(fn: Callable, tasks: Sequence, workers: int) -> List:
    if workers == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with Pool(processes=workers) as pool:
        return pool.map(fn, tasks)


def _spatial_sample(task: Tuple[ExperimentConfig, int]) -> List[float]:
    cfg, i = task
    spectrum = cfg.noise_spectrum()
    datum = cfg.initial_datum()
    mesh = reference_mesh(cfg)
    pack = sample_increments(mesh, 2 * max(cfg.modes), cfg.master_seed, i)
    needed = sorted(set(cfg.modes) | {2 * M for M in cfg.modes})
    finals = {M: solve_path(datum, mesh, cfg.scheme(M), pack, spectrum) for M in needed}
    return [_squared_distance(finals[M], finals[2 * M]) for M in cfg.modes]


def _temporal_sample(task: Tuple[ExperimentConfig, int]) -> List[float]:
    cfg, i = task
    spectrum = cfg.noise_spectrum()
    datum = cfg.initial_datum()
    meshes = temporal_meshes(cfg)
    finest = meshes[-1]
    pack = sample_increments(finest, meshes[-2].N, cfg.master_seed, i)
    out = []
    for coarse, fine in zip(meshes[:-1], meshes[1:]):
        scheme = cfg.scheme(coarse.N)
        fine_pack = pack if fine is finest else coarsen_pack(pack, fine)
        u_coarse = solve_path(datum, coarse, scheme, coarsen_pack(pack, coarse), spectrum)
        u_fine = solve_path(datum, fine, scheme, fine_pack, spectrum)
        out.append(_squared_distance(u_coarse, u_fine))
    return out


def _reduce_errors(per_sample: List[List[float]]) -> Tuple[List[float], List[float]]:
    """Root-mean-square errors and their delta-method standard errors, in sample order."""
    I = len(per_sample)
    errors, stderrs = [], []
    for column in zip(*per_sample):
        mean = math.fsum(column) / I
        error = math.sqrt(mean)
        if I > 1 and error > 0:
            var = math.fsum((v - mean) ** 2 for v in column) / (I - 1)
            stderr = math.sqrt(var / I) / (2.0 * error)
        else:
            stderr = 0.0
        errors.append(error)
        stderrs.append(stderr)
    return errors, stderrs


def run_spatial_convergence(cfg: ExperimentConfig) -> ErrorTable:
    """
    Spatial strong errors E_1(M) for every M in cfg.modes.

    Each sample draws one increment pack with 2 max(M) modes on the reference
    mesh; every resolution uses the leading modes of that pack.

    Returns:
        ErrorTable of kind "space"
    """
    cfg.validate()
    mesh = reference_mesh(cfg)
    logger.info("Spatial study: %s noise, %s datum, N=%d, M=%s, %d samples, %d workers",
                cfg.spectrum, cfg.datum, mesh.N, list(cfg.modes), cfg.samples, cfg.workers)
    per_sample = _map_samples(_spatial_sample, [(cfg, i) for i in range(cfg.samples)], cfg.workers)
    errors, stderrs = _reduce_errors(per_sample)
    table = ErrorTable.from_errors("space", cfg.modes, errors, stderrs, cfg.samples)
    for M, e in zip(cfg.modes, errors):
        logger.info("  M=%d  E_1=%.4e", M, e)
    logger.info("Mean spatial order %.3f", table.mean_order)
    return table


def run_temporal_convergence(cfg: ExperimentConfig) -> ErrorTable:
    """
    Temporal strong errors E_2(tau) on nested graded meshes with M = N.

    Each sample draws increments on the finest mesh only; every coarser mesh
    receives their aggregates.

    Returns:
        ErrorTable of kind "time", resolution = nominal tau of the coarse mesh
    """
    cfg.validate()
    meshes = temporal_meshes(cfg)
    logger.info("Temporal study: %s noise, %s datum, N=%s, %d samples, %d workers",
                cfg.spectrum, cfg.datum, [m.N for m in meshes], cfg.samples, cfg.workers)
    per_sample = _map_samples(_temporal_sample, [(cfg, i) for i in range(cfg.samples)], cfg.workers)
    errors, stderrs = _reduce_errors(per_sample)
    taus = [m.tau for m in meshes[:-1]]
    table = ErrorTable.from_errors("time", taus, errors, stderrs, cfg.samples)
    for mesh, e in zip(meshes[:-1], errors):
        logger.info("  N=%d tau=%.4g  E_2=%.4e", mesh.N, mesh.tau, e)
    logger.info("Mean temporal order %.3f", table.mean_order)
    return table


def _ensemble_sample(task: Tuple[ExperimentConfig, int, float, int, bool]):
    cfg, i, t_final, M, keep = task
    mesh = reference_mesh(cfg, t_final)
    pack = sample_increments(mesh, M, cfg.master_seed, i)
    return solve_path(cfg.initial_datum(), mesh, cfg.scheme(M), pack, cfg.noise_spectrum(),
                      keep_trajectory=keep)


def sample_ensemble(cfg: ExperimentConfig, t_final: float, M: Optional[int] = None) -> EnsembleField:
    """
    Final states U_M^N at time t_final of cfg.samples independent paths.

    Args:
        cfg: Experiment configuration
        t_final: Final time of the paths
        M: Mode count; defaults to max(cfg.modes)

    Returns:
        EnsembleField in sample order
    """
    M = max(cfg.modes) if M is None else M
    tasks = [(cfg, i, float(t_final), M, False) for i in range(cfg.samples)]
    return EnsembleField(_map_samples(_ensemble_sample, tasks, cfg.workers))


def regularity_scan(cfg: ExperimentConfig, times: Optional[Sequence[float]] = None,
                    p: int = 2) -> DiagnosticReport:
    """empirical_regularity over ensembles at t = T 2^(-j), j = 0..4 by default."""
    times = [cfg.T * 2.0 ** -j for j in range(5)] if times is None else list(times)
    ensembles = [sample_ensemble(cfg, t) for t in times]
    return empirical_regularity(ensembles, times, cfg.resolved_beta(),
                                cfg.noise_spectrum().alpha, p)


def stability_scan(cfg: ExperimentConfig, M: Optional[int] = None) -> DiagnosticReport:
    """stability_profile over full trajectories on the reference mesh."""
    M = max(cfg.modes) if M is None else M
    tasks = [(cfg, i, cfg.T, M, True) for i in range(cfg.samples)]
    trajectories: List[Trajectory] = _map_samples(_ensemble_sample, tasks, cfg.workers)
    return stability_profile(trajectories, cfg.resolved_beta())


def solve_single(cfg: ExperimentConfig, sample_index: int = 0, M: Optional[int] = None,
                 keep_trajectory: bool = False):
    """One path on the reference mesh with max(cfg.modes) modes."""
    M = max(cfg.modes) if M is None else M
    mesh = reference_mesh(cfg)
    pack = sample_increments(mesh, M, cfg.master_seed, sample_index)
    logger.info("Solving sample %d: N=%d M=%d", sample_index, mesh.N, M)
    return solve_path(cfg.initial_datum(), mesh, cfg.scheme(M), pack, cfg.noise_spectrum(),
                      keep_trajectory=keep_trajectory)


def dump_mesh(cfg: ExperimentConfig, path: str, N: Optional[int] = None) -> GradedMesh:
    """
    Write a graded mesh as CSV after verifying it.

    Args:
        cfg: Experiment configuration (T, gamma, reference_tau)
        path: Output CSV
        N: Step count; defaults to the reference mesh

    Returns:
        The written mesh
    """
    mesh = reference_mesh(cfg) if N is None else graded_mesh(cfg.T, N, cfg.gamma)
    c_min, c_max = verify_grading(mesh)
    logger.info("Mesh N=%d gamma=%.3g: grading constants [%.4g, %.4g], N tau/T=%.4g",
                mesh.N, mesh.gamma, c_min, c_max, nominal_step_count(mesh))
    write_mesh_csv(mesh, path)
    return mesh


def record_output(cfg: ExperimentConfig, path: str, entry_type: str,
                  ledger: Optional[RunLedger] = None, extra: Optional[dict] = None) -> LedgerEntry:
    """Write the metadata sidecar of an output file and register it in the ledger."""
    metadata = {"config": cfg.to_dict(), "master_seed": cfg.master_seed,
                "code_version": __version__}
    metadata.update(extra or {})
    if ledger is not None:
        entry = ledger.add_entry(entry_type, cfg.fingerprint(), path, metadata=metadata)
    else:
        entry = LedgerEntry(entry_type=entry_type, fingerprint=cfg.fingerprint(), content=path,
                            metadata=metadata)
    write_sidecar(path, entry.to_dict())
    return entry


def emit_report(table: ErrorTable, cfg: ExperimentConfig, path: str,
                ledger: Optional[RunLedger] = None) -> LedgerEntry:
    """
    Write an error table as CSV plus its metadata sidecar ``<path>.meta.json``.

    Returns:
        The ledger entry describing the report
    """
    ErrorTableCodec().write(table, path)
    entry_type = "spatial_convergence" if table.kind == "space" else "temporal_convergence"
    entry = record_output(cfg, path, entry_type, ledger, extra={
        "mean_order": table.mean_order,
        "mean_order_stderr": table.mean_order_stderr,
    })
    logger.info("Report written to %s", path)
    return entry
