"""
CSV Writers
Result files of the CLI: one header row, 17 significant digits, time-major row order
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from adjoint_control import OptimalityResult
from forward_solver import Field

logger = logging.getLogger(__name__)

OUTPUT_X_NODES = 101


def fmt(value: float) -> str:
    return f"{value:.17g}"


def output_nodes(length_l: float) -> np.ndarray:
    return np.linspace(0.0, length_l, OUTPUT_X_NODES)


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write a CSV file; floats are rendered with 17 significant digits"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(item) if isinstance(item, (float, np.floating)) else item for item in row])
    logger.info(f"wrote {path}")
    return path


def write_modal(path: Path, field: Field) -> Path:
    """Columns t, mode_index, coefficient"""
    nodes = field.grid.nodes

    def rows():
        for j, t in enumerate(nodes):
            for k in range(field.basis.n_modes):
                yield float(t), k + 1, float(field.values[k, j])

    return write_rows(path, ("t", "mode_index", "coefficient"), rows())


def write_field(path: Path, field: Field, column: str) -> Path:
    """Columns t, x, <column> with x on 101 uniform nodes including the endpoints"""
    x = output_nodes(field.basis.length_l)
    physical = field.reconstruct(x)

    def rows():
        for j, t in enumerate(field.grid.nodes):
            for i, xi in enumerate(x):
                yield float(t), float(xi), float(physical[j, i])

    return write_rows(path, ("t", "x", column), rows())


def write_diagnostics(path: Path, entries: Iterable[Sequence]) -> Path:
    """Columns quantity, measured, bound; bound is empty for plain measurements"""
    return write_rows(path, ("quantity", "measured", "bound"), entries)


def write_optimize_log(path: Path, result: OptimalityResult) -> Path:
    rows = ((i, float(g), float(j)) for i, (g, j) in enumerate(zip(result.grad_norm_history, result.j_history)))
    return write_rows(path, ("iter", "grad_norm", "j_value"), rows)


def write_convergence(path: Path, rows: Iterable[Sequence]) -> Path:
    return write_rows(path, ("dt", "forward_residual", "duality_residual", "observed_order"), rows)
