"""Finite-volume discretization of the regularized problem on a radial mesh.

Unknowns are the node values ``u_0..u_{n-1}`` (``u_n = 0``).  Node ``i``
balances the flux through the two ends of its dual shell:

    -(F_i - F_{i-1}) + V_i w(p_i) = V_i f_i,     F_i = A_i g_i / W_i,

with ``g_i`` the difference quotient on cell ``i``, ``W_i = sqrt(g_i^2 + eps^2)``,
``A_i`` the sphere area at the midpoint, ``F_{-1} = 0`` (symmetry) and ``V_i``
the shell volume.  ``p_i`` is an upwind node gradient: the side is picked
Godunov-style from the two adjacent differences and the value extrapolated
linearly from two edge gradients on that side (second order).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from ..core import RadialMesh, sphere_area
from .config import below_one


class RadialOperator:
    def __init__(self, mesh: RadialMesh):
        r = np.asarray(mesh.nodes)
        n = mesh.n
        self.mesh = mesh
        self.n = n
        self.d = np.diff(r)
        m = mesh.midpoints
        self.A = sphere_area(mesh.N) * m ** (mesh.N - 1)
        self.V = mesh.shell_volumes[:n]
        # extrapolation weights from edge midpoints to the node
        self.th_fwd = np.zeros(n)
        self.th_fwd[: n - 1] = (m[: n - 1] - r[: n - 1]) / (m[1:] - m[: n - 1])
        # the gradient may blow up at the origin; do not extrapolate into it
        self.th_fwd[0] = 0.0
        self.th_bwd = np.zeros(n)
        self.th_bwd[2:] = (r[2:n] - m[1 : n - 1]) / (m[1 : n - 1] - m[: n - 2])

    def edge_gradient(self, u: np.ndarray) -> np.ndarray:
        return np.diff(u) / self.d

    def gradient_stencil(self, u: np.ndarray) -> np.ndarray:
        """Coefficients of ``p_i`` on ``u_{i-2} .. u_{i+2}`` (shape ``(n, 5)``)."""
        n, d = self.n, self.d
        g = self.edge_gradient(u)
        a = np.zeros(n)
        a[1:] = np.maximum(g[: n - 1], 0.0)
        b = -np.minimum(g, 0.0)
        forward = b >= a
        forward[0] = True

        th = self.th_fwd
        d_next = np.concatenate([d[1:], [1.0]])
        fwd = np.zeros((n, 5))
        fwd[:, 2] = -(1 + th) / d
        fwd[:, 3] = (1 + th) / d + th / d_next
        fwd[:, 4] = -th / d_next

        th = self.th_bwd
        d_prev = np.concatenate([[1.0], d[:-1]])
        d_prev2 = np.concatenate([[1.0, 1.0], d[:-2]])
        bwd = np.zeros((n, 5))
        bwd[:, 0] = -th / d_prev2
        bwd[:, 1] = -(1 + th) / d_prev + th / d_prev2
        bwd[:, 2] = (1 + th) / d_prev
        return np.where(forward[:, None], fwd, bwd)

    @staticmethod
    def apply_stencil(C: np.ndarray, u: np.ndarray) -> np.ndarray:
        n = C.shape[0]
        padded = np.concatenate([[0.0, 0.0], u, [0.0]])
        return sum(C[:, k] * padded[k : k + n] for k in range(5))

    def node_gradient(self, u: np.ndarray) -> np.ndarray:
        return self.apply_stencil(self.gradient_stencil(u), u)

    def residual(self, u: np.ndarray, f: np.ndarray, eps: float) -> np.ndarray:
        """Pointwise residual ``-div(grad u / W) + w - f`` at nodes ``0..n-1``."""
        g = self.edge_gradient(u)
        F = np.concatenate([[0.0], self.A * g / np.sqrt(g * g + eps * eps)])
        p = self.node_gradient(u)
        return -(F[1:] - F[:-1]) / self.V + np.sqrt(p * p + eps * eps) - f[: self.n]

    def residual_norm(self, u: np.ndarray, f: np.ndarray, eps: float) -> float:
        res = self.residual(u, f, eps)
        return float(np.sqrt(np.sum(self.V * res * res)))

    def linear_step(self, u: np.ndarray, f: np.ndarray, eps: float, newton: bool) -> np.ndarray:
        """Solve the lagged (``newton=False``) or linearized system around ``u``."""
        n = self.n
        g = self.edge_gradient(u)
        W = np.sqrt(g * g + eps * eps)
        C = self.gradient_stencil(u)
        p = self.apply_stencil(C, u)
        w = np.sqrt(p * p + eps * eps)

        rhs = self.V * (f[:n] - eps * eps / w)
        if newton:
            # flux linearized in g: F(g_k) + F'(g_k) (g - g_k)
            k = self.A * eps * eps / (self.d * W**3)
            F0 = self.A * g**3 / W**3
            rhs += F0 - np.concatenate([[0.0], F0[:-1]])
        else:
            k = self.A / (self.d * W)

        ab = np.zeros((5, n))
        diag = k.copy()
        diag[1:] += k[:-1]
        ab[2] += diag
        ab[1, 1:] -= k[:-1]
        ab[3, :-1] -= k[:-1]
        # (p_k . p + eps^2) / w_k: exact linearization of the gradient term
        c = self.V * p / w
        rows = np.arange(n)
        for col in range(5):
            off = col - 2
            j = rows + off
            ok = (j >= 0) & (j < n)
            ab[2 - off, j[ok]] += (c * C[:, col])[ok]
        x = solve_banded((2, 2), ab, rhs, check_finite=True)
        return np.concatenate([x, [0.0]])

    def edge_field(self, u: np.ndarray, eps: float) -> np.ndarray:
        g = self.edge_gradient(u)
        return below_one(g / np.sqrt(g * g + eps * eps))
