"""Sparse face-gradient operators for finite-volume fluxes on a DiskGrid.

Two face families are used:

* radial faces at ``rho = k h_rho`` for ``k = 1..n_rho`` (row ``k - 1``); the
  last one is the boundary circle.  The face at the origin has zero length and
  is dropped.
* angular faces at ``theta = theta_j + h_theta/2`` on ring ``i``.

For each family we store the normal and the tangential component of the
Cartesian gradient at the face centre, as ``A @ v.ravel() + B @ g`` with ``g``
the boundary ring.  Normal components are ``d/drho`` on radial faces and
``(1/rho) d/dtheta`` on angular faces.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .grid import DiskGrid, fd_weights


@dataclass(frozen=True)
class FaceGradient:
    """Normal/tangential gradient components on all faces (radial then angular)."""

    normal: np.ndarray
    tangential: np.ndarray


class _Builder:
    def __init__(self, n_rows, n_cols):
        self.shape = (n_rows, n_cols)
        self.rows, self.cols, self.vals = [], [], []

    def add(self, rows, cols, vals):
        rows, cols, vals = np.broadcast_arrays(rows, cols, vals)
        self.rows.append(rows.ravel())
        self.cols.append(cols.ravel())
        self.vals.append(np.asarray(vals, float).ravel())

    def tocsr(self):
        if not self.rows:
            return sp.csr_matrix(self.shape)
        return sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=self.shape,
        ).tocsr()


class FaceOperators:
    """Face-gradient and divergence operators for one grid (built once, cached)."""

    def __init__(self, grid: DiskGrid):
        self.grid = grid
        n, m = grid.shape
        h, ht = grid.h_rho, grid.h_theta
        self.n_nodes = n * m
        self.n_faces = 2 * n * m

        I, J = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
        node = I * m + J

        def idx(i, j):
            return i * m + (j % m)

        rad_rho = (np.arange(n) + 1.0) * h
        ring = grid.rho

        # one-sided weights at the boundary face, abscissae r-3h/2, r-h/2, r
        w_face = fd_weights([-1.5 * h, -0.5 * h, 0.0], 0.0, 1)
        # last-ring node derivative, abscissae rho-h, rho, rho+h/2
        w_last = fd_weights([-h, 0.0, 0.5 * h], 0.0, 1)
        self.w_face = w_face

        Rn = _Builder(n * m, n * m)
        Rt = _Builder(n * m, n * m)
        Rn_b = _Builder(n * m, m)
        Rt_b = _Builder(n * m, m)

        inner = I[:-1]  # radial faces between ring k-1=i and k=i+1
        Jin = J[:-1]
        rows = node[:-1]
        Rn.add(rows, idx(inner + 1, Jin), 1.0 / h)
        Rn.add(rows, idx(inner, Jin), -1.0 / h)
        coef = 1.0 / (4.0 * ht * rad_rho[:-1])[:, None]
        for ii in (inner, inner + 1):
            Rt.add(rows, idx(ii, Jin + 1), coef)
            Rt.add(rows, idx(ii, Jin - 1), -coef)

        last = node[-1]
        jb = J[-1]
        Rn.add(last, idx(n - 2, jb), w_face[0])
        Rn.add(last, idx(n - 1, jb), w_face[1])
        Rn_b.add(last, jb, w_face[2])
        Rt_b.add(last, (jb + 1) % m, 1.0 / (2.0 * ht * grid.r))
        Rt_b.add(last, (jb - 1) % m, -1.0 / (2.0 * ht * grid.r))

        An = _Builder(n * m, n * m)
        At = _Builder(n * m, n * m)
        At_b = _Builder(n * m, m)
        c = 1.0 / (ring * ht)[:, None]
        An.add(node, idx(I, J + 1), c)
        An.add(node, idx(I, J), -c)
        # radial derivative at nodes (i, j) and (i, j+1), averaged
        for jj in (J, J + 1):
            mid = I[1:-1]
            Jm = jj[1:-1]
            At.add(node[1:-1], idx(mid + 1, Jm), 0.25 / h)
            At.add(node[1:-1], idx(mid - 1, Jm), -0.25 / h)
            j0 = jj[0]
            At.add(node[0], idx(1, j0), 0.25 / h)
            At.add(node[0], idx(0, j0 + grid.half_turn), -0.25 / h)
            jl = jj[-1]
            At.add(node[-1], idx(n - 2, jl), 0.5 * w_last[0])
            At.add(node[-1], idx(n - 1, jl), 0.5 * w_last[1])
            At_b.add(node[-1], jl % m, 0.5 * w_last[2])

        self.normal = sp.vstack([Rn.tocsr(), An.tocsr()]).tocsr()
        self.tangential = sp.vstack([Rt.tocsr(), At.tocsr()]).tocsr()
        self.normal_b = sp.vstack([Rn_b.tocsr(), sp.csr_matrix((n * m, m))]).tocsr()
        self.tangential_b = sp.vstack([Rt_b.tocsr(), At_b.tocsr()]).tocsr()

        # divergence: net outward flux length / cell area
        area = grid.cell_area.ravel()
        rad_len = np.broadcast_to((rad_rho * ht)[:, None], (n, m)).ravel()
        ang_len = np.full(n * m, h)
        D = _Builder(n * m, 2 * n * m)
        flat = node.ravel()
        D.add(flat, flat, rad_len / area)
        outer_of_prev = node[:-1].ravel()  # radial face k=i is row i-1
        D.add(node[1:].ravel(), outer_of_prev, -rad_len[: (n - 1) * m] / area[m:])
        D.add(flat, n * m + flat, ang_len / area)
        D.add(flat, n * m + idx(I, J - 1).ravel(), -ang_len / area)
        self.divergence = D.tocsr()
        self.face_length = np.concatenate([rad_len, ang_len])
        self._jacobian_pattern = None
        self.boundary_faces = slice((n - 1) * m, n * m)

    def flux_jacobian(self, d_normal, d_tangential):
        """``divergence @ (diag(d_normal) @ normal + diag(d_tangential) @ tangential)``.

        Assembled on a fixed sparsity pattern (no entries dropped when a
        coefficient happens to vanish) so that sparse factorizations see the
        same structure at every Newton iterate.
        """
        if self._jacobian_pattern is None:
            self._jacobian_pattern = self._build_pattern()
        rows, cols, faces, coef, is_tan, shape = self._jacobian_pattern
        vals = coef * np.where(is_tan, d_tangential[faces], d_normal[faces])
        J = sp.csr_matrix((vals, (rows, cols)), shape=shape)
        J.sum_duplicates()
        return J

    def _build_pattern(self):
        Dt = self.divergence.T.tocoo()  # (face, node) pairs of the divergence
        parts = []
        for tan, G in ((False, self.normal.tocsr()), (True, self.tangential.tocsr())):
            start = G.indptr[Dt.row]
            count = G.indptr[Dt.row + 1] - start
            rep = np.repeat(np.arange(Dt.nnz), count)
            offset = np.arange(rep.size) - np.repeat(np.cumsum(count) - count, count)
            g = start[rep] + offset
            parts.append((Dt.col[rep], G.indices[g], Dt.row[rep], Dt.data[rep] * G.data[g],
                          np.full(rep.size, tan)))
        rows, cols, faces, coef, is_tan = (np.concatenate(x) for x in zip(*parts))
        return rows, cols, faces, coef, is_tan, (self.n_nodes, self.n_nodes)

    def gradient(self, values, boundary):
        v = np.asarray(values, float).ravel()
        g = np.asarray(boundary, float)
        return FaceGradient(
            self.normal @ v + self.normal_b @ g,
            self.tangential @ v + self.tangential_b @ g,
        )


@lru_cache(maxsize=16)
def face_operators(grid: DiskGrid) -> FaceOperators:
    return FaceOperators(grid)


def extrapolate_to_boundary(values, skip_outer=False):
    """Quadratic extrapolation of three node rings to ``rho = r``.

    Uses the three outermost rings, or with ``skip_outer`` the next three in
    (the outermost ring carries the one-sided closure error of a discrete
    solution, which second differences amplify).  Written in difference form
    so that ring-constant data is reproduced exactly.  ``values`` has the ring
    index on axis 0.
    """
    if skip_outer:
        v1, v2, v3 = values[-2], values[-3], values[-4]
        return v1 + 3.375 * (v1 - v2) - 1.875 * (v2 - v3)
    v1, v2, v3 = values[-1], values[-2], values[-3]
    return v1 + 0.875 * (v1 - v2) - 0.375 * (v2 - v3)
