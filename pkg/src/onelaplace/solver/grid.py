"""Finite-volume discretization of the regularized problem on a masked 2D grid.

Unknowns are the masked cells; exterior cells hold the Dirichlet value 0.
Each face carries the flux ``g / W`` with ``g`` the normal difference
quotient and ``W = sqrt(g^2 + t^2 + eps^2)``, ``t`` the tangential derivative
averaged over the four surrounding cells, so ``|z| < 1`` on every face.
The zeroth-order term uses first-order Godunov upwind node gradients.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..core import CartesianGrid
from .config import SolverError, below_one


class GridOperator:
    def __init__(self, grid: CartesianGrid):
        self.grid = grid
        mask = grid.mask
        ny, nx = mask.shape
        h = grid.h
        index = -np.ones(mask.shape, dtype=int)
        index[mask] = np.arange(mask.sum())
        self.index = index
        self.n = int(mask.sum())
        self.h = h

        def faces(tail_sl, head_sl):
            relevant = mask[tail_sl] | mask[head_sl]
            return relevant, index[tail_sl][relevant], index[head_sl][relevant]

        # x faces: (j, i) -> (j, i+1); y faces: (j, i) -> (j+1, i)
        self.fx, tx, hx = faces((slice(None), slice(None, -1)), (slice(None), slice(1, None)))
        self.fy, ty, hy = faces((slice(None, -1), slice(None)), (slice(1, None), slice(None)))
        tails = np.concatenate([tx, ty])
        heads = np.concatenate([hx, hy])
        nf = len(tails)
        self.nfx = len(tx)
        self.G = self._rows([(np.arange(nf), tails, -1.0 / h), (np.arange(nf), heads, 1.0 / h)], nf)

        # tangential derivative on each face from the four cells around it
        jx, ix = np.nonzero(self.fx)
        jy, iy = np.nonzero(self.fy)
        entries = []
        fidx = np.arange(self.nfx)
        for di in (0, 1):
            entries.append((fidx, index[jx + 1, ix + di], 1.0 / (4 * h)))
            entries.append((fidx, index[jx - 1, ix + di], -1.0 / (4 * h)))
        fidx = self.nfx + np.arange(len(jy))
        for dj in (0, 1):
            entries.append((fidx, index[jy + dj, iy + 1], 1.0 / (4 * h)))
            entries.append((fidx, index[jy + dj, iy - 1], -1.0 / (4 * h)))
        self.T = self._rows(entries, nf)

        # one-sided differences at every cell
        jc, ic = np.nonzero(mask)
        cells = np.arange(self.n)
        own = index[jc, ic]

        def one_sided(dj, di, sign):
            nb = index[jc + dj, ic + di]
            return self._rows([(cells, own, -sign / h), (cells, nb, sign / h)], self.n, self.n)

        self.Dx_fwd = one_sided(0, 1, 1.0)
        self.Dx_bwd = one_sided(0, -1, -1.0)
        self.Dy_fwd = one_sided(1, 0, 1.0)
        self.Dy_bwd = one_sided(-1, 0, -1.0)

    def _rows(self, entries, nrows, ncols=None):
        ncols = self.n if ncols is None else ncols
        r, c, v = [], [], []
        for rows, cols, val in entries:
            keep = cols >= 0
            r.append(rows[keep])
            c.append(cols[keep])
            v.append(np.broadcast_to(val, rows.shape)[keep])
        return sparse.csr_matrix((np.concatenate(v), (np.concatenate(r), np.concatenate(c))),
                                 shape=(nrows, ncols))

    # ------------------------------------------------------------ fields

    def pack(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float)[self.grid.mask]

    def unpack(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.grid.shape)
        out[self.grid.mask] = x
        return out

    def _upwind(self, x: np.ndarray):
        """Upwind node gradients and the side each one was taken from."""
        out = []
        for fwd_op, bwd_op in ((self.Dx_fwd, self.Dx_bwd), (self.Dy_fwd, self.Dy_bwd)):
            dp, dm = fwd_op @ x, bwd_op @ x
            forward = -np.minimum(dp, 0.0) >= np.maximum(dm, 0.0)
            out.append((np.where(forward, dp, dm), forward))
        return out

    def _upwind_operators(self, sides):
        return [sparse.diags(fw.astype(float)) @ fop + sparse.diags((~fw).astype(float)) @ bop
                for fw, (fop, bop) in zip(sides, ((self.Dx_fwd, self.Dx_bwd), (self.Dy_fwd, self.Dy_bwd)))]

    def residual(self, x: np.ndarray, f: np.ndarray, eps: float) -> np.ndarray:
        g = self.G @ x
        t = self.T @ x
        (px, _), (py, _) = self._upwind(x)
        return self.G.T @ (g / np.sqrt(g * g + t * t + eps * eps)) + np.sqrt(px * px + py * py + eps * eps) - f

    def residual_norm(self, x: np.ndarray, f: np.ndarray, eps: float) -> float:
        res = self.residual(x, f, eps)
        return float(self.h * np.sqrt(np.sum(res * res)))

    def linear_step(self, x: np.ndarray, f: np.ndarray, eps: float, newton: bool) -> np.ndarray:
        g = self.G @ x
        t = self.T @ x
        W = np.sqrt(g * g + t * t + eps * eps)
        (px, fx), (py, fy) = self._upwind(x)
        w = np.sqrt(px * px + py * py + eps * eps)
        Px, Py = self._upwind_operators((fx, fy))
        zeroth = sparse.diags(px / w) @ Px + sparse.diags(py / w) @ Py
        if newton:
            JF = sparse.diags((t * t + eps * eps) / W**3) @ self.G - sparse.diags(g * t / W**3) @ self.T
            J = (self.G.T @ JF + zeroth).tocsc()
            res = self.G.T @ (g / W) + w - f
            return x - self._solve(J, res)
        A = (self.G.T @ sparse.diags(1.0 / W) @ self.G + zeroth).tocsc()
        return self._solve(A, f - eps * eps / w)

    @staticmethod
    def _solve(A, b):
        try:
            x = splu(A).solve(b)
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise SolverError("linear solve produced non-finite values")
        return x

    def edge_field(self, x: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
        g = self.G @ x
        t = self.T @ x
        z = below_one(g / np.sqrt(g * g + t * t + eps * eps))
        zx = np.zeros(self.fx.shape)
        zy = np.zeros(self.fy.shape)
        zx[self.fx] = z[: self.nfx]
        zy[self.fy] = z[self.nfx :]
        return zx, zy
