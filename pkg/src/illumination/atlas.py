"""Rasterised illumination index over a rectangle of the plane."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PointOnGraph
from .expr import as_expr
from .jet import evaluate
from .solver import IlluminationQuery, SolverConfig, find_tangencies
from .taylor import check_odd_order

ON_GRAPH = 255
WINDOW_LIMITED = 254
DOMAIN_ERROR = 253
SENTINELS = (DOMAIN_ERROR, WINDOW_LIMITED, ON_GRAPH)


@dataclass(frozen=True)
class RegionAtlas:
    """Index per cell. ``cells[j, i]`` is the cell in column ``i`` (x) and row ``j``
    (y); row 0 sits on the ``y_min`` edge."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    cells: np.ndarray

    def __post_init__(self):
        if self.cells.shape != (self.ny, self.nx):
            raise ValueError(f"cells shape {self.cells.shape} != (ny, nx) = {(self.ny, self.nx)}")

    def xs(self) -> np.ndarray:
        return cell_centers(self.x_min, self.x_max, self.nx)

    def ys(self) -> np.ndarray:
        return cell_centers(self.y_min, self.y_max, self.ny)


def cell_centers(lo, hi, n):
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def classify_point(f, r, s, t, config: SolverConfig) -> int:
    try:
        if abs(t - evaluate(f, s)) <= config.on_graph_eps * 100:
            return ON_GRAPH
        cls = find_tangencies(IlluminationQuery(f, r, s, t, config)).classification
    except PointOnGraph:
        return ON_GRAPH
    except DomainError:
        return DOMAIN_ERROR
    return cls.count if cls.is_finite else WINDOW_LIMITED


def _row(args):
    f, r, xs, y, config = args
    return [classify_point(f, r, float(x), float(y), config) for x in xs]


def compute_atlas(f, r: int, bounds, nx: int, ny: int,
                  config: SolverConfig | None = None, workers: int = 1) -> RegionAtlas:
    """Illumination index at every cell center of ``bounds = (x_min, x_max, y_min, y_max)``.

    Cells are computed independently, so the result does not depend on
    ``workers``. Sentinels: 255 on the graph, 254 window-limited, 253 domain
    error.
    """
    f = as_expr(f)
    r = check_odd_order(r)
    config = config or SolverConfig()
    x_min, x_max, y_min, y_max = map(float, bounds)
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be at least 2")
    if not (x_min < x_max and y_min < y_max):
        raise ValueError("bounds must be non-degenerate")
    if config.index_cap >= min(SENTINELS):
        raise ValueError(f"index_cap must be below {min(SENTINELS)} to keep sentinels distinct")

    xs = cell_centers(x_min, x_max, nx)
    ys = cell_centers(y_min, y_max, ny)
    jobs = [(f, r, xs, y, config) for y in ys]
    if workers <= 1:
        rows = [_row(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    cells = np.array(rows, dtype=np.uint8).reshape(ny, nx)
    return RegionAtlas(x_min, x_max, y_min, y_max, nx, ny, cells)


def export_atlas(atlas: RegionAtlas, fmt: str, path) -> None:
    """Write ``atlas`` as CSV or binary PGM (P5, maxval 255).

    CSV: one header row ``x_min,x_max,y_min,y_max,nx,ny`` holding those values,
    then ``ny`` rows of ``nx`` integers. Both formats start from the ``y_min`` row.
    """
    if fmt == "csv":
        header = ",".join(
            [format(v, ".17g") for v in (atlas.x_min, atlas.x_max, atlas.y_min, atlas.y_max)]
            + [str(atlas.nx), str(atlas.ny)]
        )
        body = "\n".join(",".join(str(int(v)) for v in row) for row in atlas.cells)
        with open(path, "w", newline="") as fh:
            fh.write(header + "\n" + body + "\n")
    elif fmt == "pgm":
        with open(path, "wb") as fh:
            fh.write(f"P5\n{atlas.nx} {atlas.ny}\n255\n".encode("ascii"))
            fh.write(np.ascontiguousarray(atlas.cells, dtype=np.uint8).tobytes())
    else:
        raise ValueError(f"unknown atlas format {fmt!r}")


def load_atlas_csv(path) -> RegionAtlas:
    with open(path) as fh:
        lines = fh.read().splitlines()
    head = lines[0].split(",")
    x_min, x_max, y_min, y_max = map(float, head[:4])
    nx, ny = int(head[4]), int(head[5])
    cells = np.array([[int(v) for v in line.split(",")] for line in lines[1 : 1 + ny]], dtype=np.uint8)
    return RegionAtlas(x_min, x_max, y_min, y_max, nx, ny, cells)


def load_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError("not a P5 PGM with maxval 255")
    nx, ny = map(int, dims.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(ny, nx)


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
