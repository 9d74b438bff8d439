"""CSV readers and writers.

Floats are written with ``repr`` so a value CSV read back reproduces the
node values bit for bit.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .grid import Grid, GridFunction
from .operators import QviResidualReport, Region

__all__ = [
    "write_grid_csv",
    "read_grid_csv",
    "write_policy_csv",
    "write_residual_csv",
    "write_lines",
]


def _r(x: float) -> str:
    return "" if np.isnan(x) else repr(float(x))


def _coord_header(n: int) -> list[str]:
    return [f"x_{k + 1}" for k in range(n)]


def write_grid_csv(path, gf: GridFunction) -> None:
    """One row per node in row-major order: ``x_1..x_n, value``."""
    nodes = gf.grid.nodes()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*_coord_header(gf.grid.dimension), "value"])
        for x, v in zip(nodes, gf.flat):
            w.writerow([*(_r(c) for c in x), _r(v)])


def read_grid_csv(path, grid: Grid, atol: float = 1e-9) -> GridFunction:
    """Read a value CSV written for ``grid``; coordinates must match."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    n = grid.dimension
    header, body = rows[0], rows[1:]
    if header[:n] != _coord_header(n) or "value" not in header:
        raise ValueError(f"{path}: unexpected header {header}")
    col = header.index("value")
    if len(body) != grid.size:
        raise ValueError(f"{path}: expected {grid.size} rows, got {len(body)}")
    coords = np.array([[float(c) for c in row[:n]] for row in body])
    if not np.allclose(coords, grid.nodes(), atol=atol, rtol=0):
        raise ValueError(f"{path}: node coordinates do not match the grid")
    return GridFunction(grid, np.array([float(row[col]) for row in body]))


def write_policy_csv(path, grid: Grid, values: np.ndarray, region: np.ndarray,
                     xi_action: np.ndarray, eta_action: np.ndarray) -> None:
    n = grid.dimension
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*_coord_header(n), "value", "region",
                    *(f"xi_{k + 1}" for k in range(n)), *(f"eta_{k + 1}" for k in range(n))])
        for x, v, r, a, b in zip(grid.nodes(), np.ravel(values), region, xi_action, eta_action):
            w.writerow([*(_r(c) for c in x), _r(v), Region(int(r)).name,
                        *(_r(c) for c in a), *(_r(c) for c in b)])


def write_residual_csv(path, report: QviResidualReport) -> None:
    grid = report.grid
    n = grid.dimension
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*_coord_header(n), "residual_classic", "residual_new", "region",
                    *(f"xi_{k + 1}" for k in range(n)), *(f"eta_{k + 1}" for k in range(n)), "boundary"])
        for i, x in enumerate(grid.nodes()):
            w.writerow([
                *(_r(c) for c in x), _r(report.residual_classic[i]), _r(report.residual_new[i]),
                Region(int(report.region[i])).name,
                *(_r(c) for c in report.xi_action[i]), *(_r(c) for c in report.eta_action[i]),
                int(report.boundary[i]),
            ])


def write_lines(path, lines) -> None:
    Path(path).write_text("".join(f"{line}\n" for line in lines))
