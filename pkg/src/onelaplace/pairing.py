"""Discrete total variation, coarea, pairing and Green identities on edge graphs.

A field lives on the nodes of a graph and its gradient on the edges:

* 1D: nodes ``u_0..u_n`` joined by the edges ``(i, i+1)``; ``Du_i = u_{i+1} - u_i``.
* 2D: a ``(ny, nx)`` array joined by its horizontal and vertical faces
  (the anisotropic edge set).  Edge fields are pairs ``(zx, zy)`` of shapes
  ``(ny, nx - 1)`` and ``(ny - 1, nx)``.

With the per-edge absolute value as total variation, the layer-cake
decomposition is exact edge by edge, so the coarea and slicing identities
hold up to floating-point rounding only.  Edge weights (``r^{N-1}`` at the
midpoints on a radial mesh, 1 otherwise) multiply every edge term.

The precise representative of a node field on an edge is the arithmetic
mean of its two endpoint values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import PreconditionError, RadialMesh


@dataclass(frozen=True)
class EdgeField:
    """Edge values of a vector field plus outward boundary fluxes (1D only).

    ``left`` and ``right`` are the weighted fluxes through ``x_0`` and ``x_n``
    (already multiplied by the boundary weight); they default to the weighted
    values of the first and last edge.
    """

    values: object
    left: Optional[float] = None
    right: Optional[float] = None


@dataclass(frozen=True)
class LevelSlice:
    t: float
    indicator: np.ndarray


EdgeLike = Union[EdgeField, np.ndarray, Sequence[np.ndarray]]


def radial_edge_weights(mesh: RadialMesh) -> np.ndarray:
    """``r^{N-1}`` at the cell midpoints."""
    return mesh.midpoints ** (mesh.N - 1)


# ----------------------------------------------------------------- plumbing


def _endpoints(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values at the tail and head of every edge, flattened."""
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        return u[:-1], u[1:]
    if u.ndim == 2:
        tail = np.concatenate([u[:, :-1].ravel(), u[:-1, :].ravel()])
        head = np.concatenate([u[:, 1:].ravel(), u[1:, :].ravel()])
        return tail, head
    raise ValueError("fields must be 1D or 2D arrays")


def _flat_edges(z, u: np.ndarray) -> np.ndarray:
    if isinstance(z, EdgeField):
        z = z.values
    u = np.asarray(u)
    if u.ndim == 1:
        z = np.broadcast_to(np.asarray(z, dtype=float), (u.size - 1,))
        return np.asarray(z, dtype=float)
    if np.isscalar(z):
        z = (z, z)
    zx = np.broadcast_to(np.asarray(z[0], dtype=float), (u.shape[0], u.shape[1] - 1))
    zy = np.broadcast_to(np.asarray(z[1], dtype=float), (u.shape[0] - 1, u.shape[1]))
    return np.concatenate([zx.ravel(), zy.ravel()])


def _weights(weights, u: np.ndarray) -> np.ndarray:
    if weights is None:
        weights = 1.0
    w = _flat_edges(weights, u)
    if np.any(w <= 0):
        raise PreconditionError("edge weights must be positive")
    return w


def _levels(u: np.ndarray):
    """Distinct sorted values, the width of every level gap, and node ranks."""
    vals, ranks = np.unique(np.asarray(u, dtype=float).ravel(), return_inverse=True)
    return vals, np.diff(vals), ranks.reshape(np.shape(u))


def _per_level(u: np.ndarray, edge_terms: np.ndarray) -> np.ndarray:
    """``S_k = sum of edge_terms over edges whose range crosses level k``.

    Level ``k`` is the gap ``(v_k, v_{k+1})``; an edge from rank ``a`` to rank
    ``b`` crosses levels ``min(a,b) .. max(a,b) - 1``.  A difference array makes
    this ``O(E + K)``.
    """
    vals, _, ranks = _levels(u)
    ta, tb = _endpoints(ranks)
    lo = np.minimum(ta, tb).astype(int)
    hi = np.maximum(ta, tb).astype(int)
    acc = np.zeros(len(vals) + 1)
    np.add.at(acc, lo, edge_terms)
    np.add.at(acc, hi, -edge_terms)
    return np.cumsum(acc)[: max(len(vals) - 1, 0)]


def superlevel(u: np.ndarray, t: float) -> LevelSlice:
    """Indicator of ``{u > t}``."""
    return LevelSlice(float(t), (np.asarray(u) > t).astype(float))


def level_slices(u: np.ndarray):
    """Yield ``(slice, dt)`` for every gap between consecutive distinct values."""
    vals, dt, _ = _levels(u)
    for k in range(len(dt)):
        yield superlevel(u, 0.5 * (vals[k] + vals[k + 1])), dt[k]


# ---------------------------------------------------------------- operations


def discrete_tv(u: np.ndarray, weights=None) -> float:
    """``sum_i weights_i |Du_i|``."""
    tail, head = _endpoints(u)
    return float(np.sum(_weights(weights, u) * np.abs(head - tail)))


def pairing_sum(z: EdgeLike, u: np.ndarray, weights=None) -> float:
    """``sum_i weights_i z_i Du_i``."""
    tail, head = _endpoints(u)
    return float(np.sum(_weights(weights, u) * _flat_edges(z, u) * (head - tail)))


def coarea_check(u: np.ndarray, weights=None, brute: bool = False) -> tuple[float, float]:
    """Total variation against the level integral of superlevel-set perimeters."""
    lhs = discrete_tv(u, weights)
    if brute:
        rhs = math.fsum(dt * discrete_tv(s.indicator, weights) for s, dt in level_slices(u))
        return lhs, rhs
    _, dt, _ = _levels(u)
    perimeters = _per_level(u, _weights(weights, u))
    return lhs, math.fsum(dt * perimeters)


def slicing_check(z: EdgeLike, u: np.ndarray, weights=None, brute: bool = False) -> tuple[float, float]:
    """Pairing with ``Du`` against the level integral of pairings with ``D chi_{u>t}``."""
    lhs = pairing_sum(z, u, weights)
    if brute:
        rhs = math.fsum(dt * pairing_sum(z, s.indicator, weights) for s, dt in level_slices(u))
        return lhs, rhs
    tail, head = _endpoints(u)
    terms = _weights(weights, u) * _flat_edges(z, u) * np.sign(head - tail)
    _, dt, _ = _levels(u)
    return lhs, math.fsum(dt * _per_level(u, terms))


def theta_density(z: EdgeLike, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``z_i sign(Du_i)`` on the edges with ``Du_i != 0``.

    Returns ``(theta, active)`` with ``active`` the boolean mask of edges
    (flattened in the same order as the edge values).
    """
    tail, head = _endpoints(u)
    du = head - tail
    active = du != 0
    return _flat_edges(z, u)[active] * np.sign(du[active]), active


def _apply(phi, u: np.ndarray) -> np.ndarray:
    if callable(phi):
        return np.asarray(phi(np.asarray(u, dtype=float)), dtype=float)
    xs, ys = phi
    return np.interp(u, xs, ys)


def theta_invariance_check(z: EdgeLike, u: np.ndarray,
                           phi: Union[Callable, tuple[np.ndarray, np.ndarray]]) -> float:
    """Largest change of the theta density when ``u`` is replaced by ``phi(u)``.

    ``phi`` is a callable or a value table ``(xs, ys)`` interpolated linearly.
    Only edges active for both fields are compared.
    """
    vals = np.unique(np.asarray(u, dtype=float))
    if np.any(np.diff(_apply(phi, vals)) < 0):
        raise PreconditionError("phi is not nondecreasing on the range of u")
    v = _apply(phi, u)
    zf = _flat_edges(z, u)
    tu, hu = _endpoints(u)
    tv, hv = _endpoints(v)
    du, dv = hu - tu, hv - tv
    both = (du != 0) & (dv != 0)
    if not both.any():
        return 0.0
    return float(np.max(np.abs(zf[both] * np.sign(dv[both]) - zf[both] * np.sign(du[both]))))


def discrete_divergence(z: EdgeLike, weights=None, mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Integrated divergence per node, the negative adjoint of ``D``.

    1D: ``div_i = F_i - F_{i-1}`` with ``F_i = weights_i z_i`` and the boundary
    fluxes of ``z`` closing the end nodes.  2D: net outward flux of every
    cell of ``mask`` through its four faces.
    """
    if mask is None:
        zf = np.asarray(z.values if isinstance(z, EdgeField) else z, dtype=float)
        F = (1.0 if weights is None else np.asarray(weights, dtype=float)) * zf
        left, right = _boundary_fluxes(z, F)
        full = np.concatenate([[left], F, [right]])
        return np.diff(full)
    mask = np.asarray(mask, dtype=bool)
    zx, zy = z.values if isinstance(z, EdgeField) else z
    if weights is not None:
        zx, zy = weights[0] * zx, weights[1] * zy
    ny, nx = mask.shape
    div = np.zeros((ny, nx))
    div[:, :-1] += zx
    div[:, 1:] -= zx
    div[:-1, :] += zy
    div[1:, :] -= zy
    return np.where(mask, div, 0.0)


def _boundary_fluxes(z, F: np.ndarray) -> tuple[float, float]:
    left = right = None
    if isinstance(z, EdgeField):
        left, right = z.left, z.right
    return (F[0] if left is None else left), (F[-1] if right is None else right)


def green_check(z: EdgeLike, w: np.ndarray, weights=None,
                mask: Optional[np.ndarray] = None) -> tuple[float, float, float]:
    """``(interior, pairing, boundary)`` with interior + pairing = boundary.

    ``interior = sum w div z`` over the nodes of the domain, ``pairing`` the
    weighted sum of ``z Dw`` over edges inside the domain and ``boundary`` the
    outward flux of ``z`` weighted by the trace of ``w``.

    In 2D the domain is ``mask``; faces joining a masked cell to an exterior
    cell are the boundary and only ``w`` inside the mask enters.
    """
    w = np.asarray(w, dtype=float)
    if mask is None:
        zf = np.asarray(z.values if isinstance(z, EdgeField) else z, dtype=float)
        F = (1.0 if weights is None else np.asarray(weights, dtype=float)) * zf
        left, right = _boundary_fluxes(z, F)
        interior = math.fsum(w * discrete_divergence(z, weights))
        pairing = math.fsum(F * np.diff(w))
        boundary = w[-1] * right - w[0] * left
        return interior, pairing, float(boundary)
    mask = np.asarray(mask, dtype=bool)
    zx, zy = z.values if isinstance(z, EdgeField) else z
    if weights is not None:
        zx, zy = weights[0] * zx, weights[1] * zy
    interior = math.fsum((w * discrete_divergence((zx, zy), mask=mask))[mask])
    inx = mask[:, :-1] & mask[:, 1:]
    iny = mask[:-1, :] & mask[1:, :]
    pairing = math.fsum(np.concatenate([(zx * np.diff(w, axis=1))[inx],
                                        (zy * np.diff(w, axis=0))[iny]]))
    # faces leaving the mask: +z if the mask is on the tail side, -z otherwise
    bx_tail = mask[:, :-1] & ~mask[:, 1:]
    bx_head = ~mask[:, :-1] & mask[:, 1:]
    by_tail = mask[:-1, :] & ~mask[1:, :]
    by_head = ~mask[:-1, :] & mask[1:, :]
    boundary = math.fsum(np.concatenate([
        (zx * w[:, :-1])[bx_tail], -(zx * w[:, 1:])[bx_head],
        (zy * w[:-1, :])[by_tail], -(zy * w[1:, :])[by_head]]))
    return interior, pairing, boundary


def precise_representative(w: np.ndarray) -> np.ndarray:
    """Edge value of a node field: mean of the two endpoints."""
    tail, head = _endpoints(w)
    return 0.5 * (tail + head)


def product_rule_check(z: EdgeLike, u: np.ndarray, w: np.ndarray) -> float:
    """Largest edgewise gap between ``(w* z) Du`` and ``w* (z Du)``.

    Both products are equal in exact arithmetic; the gap is returned relative
    to the size of the edge term so that it measures rounding only.
    """
    tail, head = _endpoints(u)
    du = head - tail
    ws = precise_representative(w)
    zf = _flat_edges(z, u)
    a = (ws * zf) * du
    b = ws * (zf * du)
    scale = np.abs(a)
    nz = scale > 0
    if not nz.any():
        return float(np.max(np.abs(a - b), initial=0.0))
    return float(np.max(np.abs(a - b)[nz] / scale[nz]))
