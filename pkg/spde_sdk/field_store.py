"""
Field Store Module

CSV persistence of solver artifacts: spectral coefficients, nodal values,
trajectories, time meshes and diagnostic reports, plus the JSON sidecar that
accompanies every report. Floats are written with ``repr`` so files read back
exactly and identical runs give identical bytes.

Author: graded-spde-sdk developers
"""

import csv
import json
import logging
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .diagnostics import DiagnosticReport
from .errors import ReportError, ValidationError
from .report_codec import format_float
from .solver import Trajectory
from .spectral_core import SpectralField, evaluate_on_grid, grid_nodes
from .time_mesh import GradedMesh, mesh_rows

logger = logging.getLogger(__name__)


def sidecar_path(path: str) -> str:
    """Location of the metadata sidecar of ``path``."""
    return f"{path}.meta.json"


def _write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence], footer: Sequence[str] = ()) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v
                                 for v in row])
            for line in footer:
                fh.write(f"# {line}\n")
    except OSError as exc:
        raise ReportError(f"Cannot write CSV ({exc.strerror})", path)
    logger.debug("Wrote %s", path)


def _read_rows(path: str) -> List[List[str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    except OSError as exc:
        raise ReportError(f"Cannot read CSV ({exc.strerror})", path)


def write_sidecar(path: str, payload: Dict) -> str:
    """Write ``payload`` as sorted, indented JSON next to ``path``."""
    target = sidecar_path(path)
    try:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ReportError(f"Cannot write metadata ({exc.strerror})", target)
    return target


def write_field_csv(field: SpectralField, path: str) -> None:
    """Coefficients as rows (k, coeff)."""
    _write_rows(path, ("k", "coeff"),
                ((k, float(c)) for k, c in enumerate(field.coeffs, start=1)))


def read_field_csv(path: str) -> SpectralField:
    """Inverse of ``write_field_csv``."""
    rows = _read_rows(path)
    if not rows or rows[0] != ["k", "coeff"]:
        raise ValidationError(f"{path}: expected header 'k,coeff'.")
    body = rows[1:]
    if [int(r[0]) for r in body] != list(range(1, len(body) + 1)):
        raise ValidationError(f"{path}: mode indices must run 1..M.")
    return SpectralField(np.array([float(r[1]) for r in body]))


def write_nodal_csv(field: SpectralField, path: str) -> None:
    """Values at the interior nodes as rows (m, x_m, value)."""
    values = evaluate_on_grid(field)
    nodes = grid_nodes(field.M)
    _write_rows(path, ("m", "x_m", "value"),
                ((m, float(x), float(v)) for m, (x, v) in enumerate(zip(nodes, values), start=1)))


def write_trajectory_csv(trajectory: Trajectory, path: str) -> None:
    """One row per level: n, t_n, then the M coefficients."""
    coeffs = trajectory.as_array()
    M = coeffs.shape[1]
    header = ["n", "t_n"] + [f"c{k}" for k in range(1, M + 1)]
    rows = ([n, float(t)] + [float(c) for c in coeffs[n]]
            for n, t in enumerate(trajectory.times))
    _write_rows(path, header, rows)


def write_mesh_csv(mesh: GradedMesh, path: str) -> None:
    """Rows (n, t_n, tau_n) with tau_0 = 0; grading metadata in the footer."""
    _write_rows(path, ("n", "t_n", "tau_n"), mesh_rows(mesh),
                footer=[f"gamma={format_float(mesh.gamma)}", f"tau={format_float(mesh.tau)}"])


def read_mesh_levels(path: str) -> np.ndarray:
    """Levels t_0..t_N of a mesh CSV."""
    rows = _read_rows(path)
    if not rows or rows[0] != ["n", "t_n", "tau_n"]:
        raise ValidationError(f"{path}: expected header 'n,t_n,tau_n'.")
    return np.array([float(r[1]) for r in rows[1:]])


def write_diagnostic_csv(report: DiagnosticReport, path: str) -> None:
    """Rows (probe, observed) with the verdict in the footer."""
    footer = [
        f"name={report.name}",
        f"bound={report.bound_form}",
        f"sup_ratio={format_float(report.sup_ratio)}",
        f"passed={'true' if report.passed else 'false'}",
    ]
    _write_rows(path, ("probe", "observed"), report.rows(), footer=footer)


def write_summary(reports: Sequence[DiagnosticReport], path: str) -> None:
    """Human-readable summary of several reports."""
    text = "\n\n".join(r.summary() for r in reports) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportError(f"Cannot write summary ({exc.strerror})", path)
