"""Plain-text persistence of height fields.

Format::

    cmclab-field v1
    <r> <n_rho> <n_theta>
    <i> <j> <f>        # one line per node, i-major; i = n_rho is the boundary ring

Floats are written with 17 significant digits, so a round trip is exact.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import FieldFormatError, GridError
from .grid import DiskGrid, HeightField

HEADER = "cmclab-field v1"


def save_field(path, field: HeightField):
    grid = field.grid
    lines = [HEADER, f"{grid.r:.17g} {grid.n_rho} {grid.n_theta}"]
    for i in range(grid.n_rho):
        row = field.values[i]
        lines.extend(f"{i} {j} {row[j]:.17g}" for j in range(grid.n_theta))
    lines.extend(f"{grid.n_rho} {j} {field.boundary[j]:.17g}" for j in range(grid.n_theta))
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_field(path) -> HeightField:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise FieldFormatError(f"expected header {HEADER!r}", line=1)
    if len(lines) < 2:
        raise FieldFormatError("missing grid line", line=2)
    parts = lines[1].split()
    try:
        r, n_rho, n_theta = float(parts[0]), int(parts[1]), int(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError):
        raise FieldFormatError("grid line must read 'r n_rho n_theta'", line=2) from None
    try:
        grid = DiskGrid(r, n_rho, n_theta)
    except GridError as exc:
        raise FieldFormatError(f"invalid grid dimensions: {exc}", line=2) from exc

    values = np.empty(grid.shape)
    boundary = np.empty(n_theta)
    expected = (n_rho + 1) * n_theta
    body = lines[2:]
    for k in range(expected):
        lineno = k + 3
        if k >= len(body):
            raise FieldFormatError(f"file truncated: expected {expected} node lines", line=lineno)
        i_exp, j_exp = divmod(k, n_theta)
        parts = body[k].split()
        try:
            i, j, f = int(parts[0]), int(parts[1]), float(parts[2])
            if len(parts) != 3:
                raise ValueError
        except (ValueError, IndexError):
            raise FieldFormatError("node line must read 'i j f'", line=lineno) from None
        if (i, j) != (i_exp, j_exp):
            raise FieldFormatError(f"expected node ({i_exp}, {j_exp}), found ({i}, {j})", line=lineno)
        if not np.isfinite(f):
            raise FieldFormatError("non-finite value", line=lineno)
        if i < n_rho:
            values[i, j] = f
        else:
            boundary[j] = f
    extra = [ln for ln in body[expected:] if ln.strip()]
    if extra:
        raise FieldFormatError("unexpected data after the last node", line=expected + 3)
    return HeightField(grid, values, boundary)
