"""Grid serialization: CSV tables and 16-bit PGM heatmaps.

Both formats are byte-deterministic for identical grids. The PGM maps values
linearly onto [0, 65535] against the grid maximum, which is recorded in a
JSON sidecar next to the image so absolute values stay recoverable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .field import RiskGrid


def write_grid_csv(grid: RiskGrid, path) -> None:
    """Write `x,y,value` rows, one per cell, row-major, full-precision decimals."""
    res = grid.resolution
    ox, oy = grid.origin
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("x,y,value\n")
        for j in range(grid.height):
            y = oy + (j + 0.5) * res
            row = grid.values[j].tolist()
            for i in range(grid.width):
                x = ox + (i + 0.5) * res
                handle.write(f"{x!r},{y!r},{row[i]!r}\n")


def write_grid_pgm(grid: RiskGrid, path) -> None:
    """Write a binary 16-bit PGM (P5, big-endian) plus a `<path>.json` sidecar.

    Values map linearly from [0, grid max] to [0, 65535]; an all-zero grid
    stays all-zero (the mapping divides by max(grid max, 1e-300)). Rows are
    written image-style, top row = largest y.
    """
    peak = float(grid.values.max()) if grid.values.size else 0.0
    scaled = grid.values / max(peak, 1e-300)
    pixels = np.rint(scaled * 65535.0).astype(">u2")
    with open(path, "wb") as handle:
        handle.write(f"P5\n{grid.width} {grid.height}\n65535\n".encode("ascii"))
        handle.write(np.flipud(pixels).tobytes())
    sidecar = {
        "max": peak,
        "origin": [grid.origin[0], grid.origin[1]],
        "resolution": grid.resolution,
        "width": grid.width,
        "height": grid.height,
    }
    with open(f"{Path(path)}.json", "w", encoding="ascii", newline="\n") as handle:
        json.dump(sidecar, handle, indent=2)
        handle.write("\n")
