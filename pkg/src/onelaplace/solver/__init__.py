"""Regularized solver with continuation in the smoothing parameter.

For ``eps > 0`` the problem

    -div(grad u / w) + w = f,   w = sqrt(|grad u|^2 + eps^2),   u = 0 on the boundary,

is solved for a decreasing sequence of ``eps``, warm-starting every level
from the previous one.  Each iteration computes two candidates around the
current iterate ``u_k``:

* the lagged step: diffusivity ``1/w_k`` frozen and the gradient term
  linearized as ``(grad u_k . grad u + eps^2) / w_k``;
* a Newton step on the full discrete residual, damped by backtracking;

and keeps the one with the smaller residual (the lagged step is skipped
once full Newton steps halve the residual).  A fixed point of either step
solves the discrete regularized problem exactly.
"""

from __future__ import annotations

import time
from functools import lru_cache

import numpy as np

from ..core import (DatumSpec, Mesh, RadialMesh, ScalarField, VectorField, evaluate_datum,
                    mesh_length_scale)
from .config import SolutionReport, SolverConfig, SolverError
from .grid import GridOperator
from .radial import RadialOperator

__all__ = ["SolverConfig", "SolutionReport", "SolverError", "solve", "picard_step",
           "extract_vector_field", "nonlinear_residual", "operator_for"]

_BACKTRACK = 12


@lru_cache(maxsize=16)
def _cached_operator(mesh):
    if isinstance(mesh, RadialMesh):
        return RadialOperator(mesh)
    return GridOperator(mesh)


def operator_for(mesh: Mesh):
    return _cached_operator(mesh)


def _to_state(op, values: np.ndarray) -> np.ndarray:
    return op.pack(values) if isinstance(op, GridOperator) else np.asarray(values, dtype=float)


def _from_state(op, x: np.ndarray) -> np.ndarray:
    return op.unpack(x) if isinstance(op, GridOperator) else x


def _with_boundary(op, values: np.ndarray) -> np.ndarray:
    x = _to_state(op, values).copy()
    if isinstance(op, RadialOperator):
        x[-1] = 0.0
    return x


def picard_step(u: ScalarField, f: ScalarField, eps: float, mesh: Mesh | None = None) -> ScalarField:
    """One lagged-diffusivity step from ``u``."""
    mesh = u.mesh if mesh is None else mesh
    if not eps > 0:
        raise ValueError("eps must be positive")
    op = operator_for(mesh)
    x = op.linear_step(_with_boundary(op, u.values), _to_state(op, f.values), eps, newton=False)
    return ScalarField(mesh, _from_state(op, x))


def nonlinear_residual(u: ScalarField, f: ScalarField, eps: float, mesh: Mesh | None = None) -> float:
    """Volume-weighted l2 norm of the discrete regularized residual."""
    mesh = u.mesh if mesh is None else mesh
    op = operator_for(mesh)
    return op.residual_norm(_with_boundary(op, u.values), _to_state(op, f.values), eps)


def extract_vector_field(u: ScalarField, eps: float, mesh: Mesh | None = None) -> VectorField:
    """``grad u / sqrt(|grad u|^2 + eps^2)`` on cell midpoints (radial) or faces (grid)."""
    mesh = u.mesh if mesh is None else mesh
    if not eps > 0:
        raise ValueError("eps must be positive")
    op = operator_for(mesh)
    return VectorField(mesh, op.edge_field(_with_boundary(op, u.values), eps))


def _weighted_norm(op, x: np.ndarray) -> float:
    if isinstance(op, RadialOperator):
        return float(np.sqrt(np.sum(op.V * x[:-1] ** 2)))
    return float(op.h * np.sqrt(np.sum(x * x)))


def _iterate(op, x, f, eps, method):
    """One outer iteration; returns the residual norm and the new state."""
    r0 = op.residual_norm(x, f, eps)
    candidates = []
    with np.errstate(all="ignore"):
        if method == "hybrid":
            try:
                d = op.linear_step(x, f, eps, newton=True) - x
                t = 1.0
                for _ in range(_BACKTRACK):
                    trial = x + t * d
                    rt = op.residual_norm(trial, f, eps)
                    if np.isfinite(rt) and rt < (1 - 1e-4 * t) * r0:
                        candidates.append((rt, trial))
                        break
                    t *= 0.5
            except (SolverError, ValueError, np.linalg.LinAlgError):
                pass
            # an undamped step that halves the residual is in the quadratic regime
            if candidates and t == 1.0 and candidates[0][0] < 0.5 * r0:
                return candidates[0]
        lagged = op.linear_step(x, f, eps, newton=False)
        candidates.append((op.residual_norm(lagged, f, eps), lagged))
    return min(candidates, key=lambda c: c[0])


def solve(mesh: Mesh, datum: DatumSpec, config: SolverConfig | None = None) -> SolutionReport:
    """Continuation solve; nonconvergence is reported, not raised."""
    config = SolverConfig() if config is None else config
    start = time.perf_counter()
    f_field = evaluate_datum(datum, mesh)
    op = operator_for(mesh)
    f = _to_state(op, f_field.values)
    x = np.zeros_like(f)
    levels = config.schedule(mesh_length_scale(mesh))

    iterations, residuals, history = [], [], []
    converged = True
    for eps in levels:
        rn = op.residual_norm(x, f, eps)
        trace = [rn]
        done = rn <= config.linear_tol
        k = 0
        while not done and k < config.max_iter:
            rn, x_new = _iterate(op, x, f, eps, config.method)
            update = _weighted_norm(op, x_new - x) / max(_weighted_norm(op, x_new), 1e-300)
            x = x_new
            k += 1
            trace.append(rn)
            done = rn <= config.linear_tol or (update <= config.tau_fp and rn <= config.tau_res)
        if not done:
            converged = False
        iterations.append(k)
        residuals.append(rn)
        history.append(trace)

    values = _from_state(op, x)
    undershoot = float(min(0.0, values.min()))
    flag = undershoot < -config.tau_res
    clipped = False
    if flag and config.clip:
        values = np.maximum(values, 0.0)
        clipped = True
    u = ScalarField(mesh, values)
    eps = levels[-1]
    return SolutionReport(
        u=u,
        z=extract_vector_field(u, eps, mesh),
        eps=eps,
        eps_levels=levels,
        iterations=iterations,
        residuals=residuals,
        residual=residuals[-1],
        converged=converged,
        undershoot=undershoot,
        undershoot_flag=flag,
        clipped=clipped,
        wall_time=time.perf_counter() - start,
        history=history,
    )
