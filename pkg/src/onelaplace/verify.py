"""Experiments that confront the solver and the closed forms with known properties.

* :func:`exponent_ladder` -- the increasing summability exponents obtained by
  bootstrapping and their limit ``Np/(N-p)``.
* :func:`comparison_suite` -- ordered data must give ordered solutions.
* :func:`plateau_probe` -- location of the region where the solution vanishes.
* :func:`regularity_probe` -- blow-up rate at the origin and the critical
  summability exponent ``N/(q-1)`` of power-law data.
* :func:`power_identity_check`, :func:`gradient_power_bound_check` -- integral
  identities for powers ``u^m`` of the closed-form solution.
* :func:`transformed_equation_check` -- residual of ``-div(e^-u z) = e^-u f``.

The datum exponent is ``q`` and the test power is ``m`` throughout.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .core import (CartesianGrid, DomainError, Mesh, PowerLaw, PreconditionError,
                   RadialMesh, ScalarField, Tabulated, VectorField, evaluate_datum, lp_norm,
                   mesh_length_scale, sphere_area)
from .exact import (MILD, SINGULAR, TRIVIAL, ExactRadialSolution, build_exact, exact_du, exact_z,
                    sample_u)
from .pairing import discrete_divergence
from .solver import SolverConfig, solve

WORKERS_ENV = "ONELAPLACE_WORKERS"


def worker_count() -> int:
    """Pool size from ``ONELAPLACE_WORKERS`` (default: available CPUs)."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        return max(1, int(raw))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def ordered_map(fn: Callable, items: Sequence, workers: Optional[int] = None) -> list:
    """``[fn(x) for x in items]``, possibly in parallel, always in input order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------ exponent ladder


@dataclass(frozen=True)
class ExponentLadder:
    N: int
    p: float
    N_conj: float
    p_conj: float
    s: tuple
    limit: float


def exponent_ladder(N: int, p: float, j: int) -> ExponentLadder:
    """``s_k = N' sum_{i<=k} (N'/p')^i`` for ``k = 0..j``."""
    if not 1 < p < N:
        raise DomainError(f"need 1 < p < N, got p={p}, N={N}")
    if j < 0:
        raise DomainError("j must be nonnegative")
    Nc = N / (N - 1)
    pc = p / (p - 1)
    ratio = Nc / pc
    s, term, total = [], Nc, 0.0
    for _ in range(j + 1):
        total += term
        s.append(total)
        term *= ratio
    return ExponentLadder(N, p, Nc, pc, tuple(s), N * p / (N - p))


# --------------------------------------------------------- comparison suite


@dataclass(frozen=True)
class PairResult:
    index: int
    params: dict
    violation: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ComparisonResult:
    worst: float
    pairs: list
    passed: bool


def _bump(mesh: Mesh, center: float, width: float, height: float) -> np.ndarray:
    if isinstance(mesh, RadialMesh):
        r = np.asarray(mesh.nodes)
    else:
        X, Y = mesh.centers
        r = np.hypot(X, Y)
    b = height * np.exp(-(((r - center) / width) ** 2))
    if isinstance(mesh, CartesianGrid):
        b = np.where(mesh.mask, b, 0.0)
    return b


def draw_pairs(seed: int, count: int, family: str, mesh: Mesh) -> list[dict]:
    """Random nested data pairs ``f1 <= f2``.

    ``powerlaw``: same exponent, ``lam1 <= lam2``.  ``bump``: ``f2 = f1 + b``
    with ``b`` a nonnegative Gaussian ring.  ``mixed`` alternates the two.
    """
    rng = np.random.default_rng(seed)
    N = mesh.N if isinstance(mesh, RadialMesh) else 2
    L = mesh_length_scale(mesh)
    pairs = []
    for i in range(count):
        kind = family if family != "mixed" else ("powerlaw", "bump")[i % 2]
        q = float(rng.uniform(0.3, min(N - 0.3, 1.9)))
        lam1 = float(rng.uniform(0.2, 2.0))
        if kind == "powerlaw":
            lam2 = lam1 * float(rng.uniform(1.0, 2.0))
            pairs.append(dict(kind=kind, q=q, lam1=lam1, lam2=lam2))
        elif kind == "bump":
            pairs.append(dict(kind=kind, q=q, lam1=lam1, center=float(rng.uniform(0.1, 0.8) * L),
                              width=float(rng.uniform(0.05, 0.3) * L),
                              height=float(rng.uniform(0.5, 3.0))))
        else:
            raise ValueError(f"unknown family {family!r}")
    return pairs


def _pair_data(params: dict, mesh: Mesh):
    d1 = PowerLaw(params["lam1"], params["q"])
    if params["kind"] == "powerlaw":
        return d1, PowerLaw(params["lam2"], params["q"])
    f1 = evaluate_datum(d1, mesh).values
    return d1, Tabulated(f1 + _bump(mesh, params["center"], params["width"], params["height"]))


def _solve_pair(job):
    index, params, mesh, config = job
    d1, d2 = _pair_data(params, mesh)
    r1 = solve(mesh, d1, config)
    r2 = solve(mesh, d2, config)
    f2 = evaluate_datum(d2, mesh)
    tol = (mesh.h + r2.eps) * 10 * max(1.0, lp_norm(f2, 1))
    violation = float(np.max(r1.u.values - r2.u.values))
    return PairResult(index, params, violation, tol, violation <= tol)


def _oracle_pair(job):
    index, params, mesh, _ = job
    N, R = mesh.N, mesh.R
    s1 = build_exact(N, R, params["lam1"], params["q"])
    s2 = build_exact(N, R, params["lam2"], params["q"])
    r = np.asarray(mesh.nodes)
    u1, inf1 = sample_u(s1, r)
    u2, inf2 = sample_u(s2, r)
    ok = ~(inf1 | inf2)
    violation = float(np.max(u1[ok] - u2[ok]))
    return PairResult(index, params, violation, 0.0, violation <= 0.0)


def comparison_suite(seed: int, count: int, family: str, mesh: Mesh,
                     config: Optional[SolverConfig] = None, oracle: bool = False,
                     workers: Optional[int] = None) -> ComparisonResult:
    """Solve nested pairs and report the worst ``max(u1 - u2)``.

    Each pair passes when its violation is at most ``(h + eps) * 10 *
    max(1, |f2|_1)``.  With ``oracle=True`` the closed forms replace the
    solver (power-law pairs on a radial mesh, ``lam2 >= 1.01 lam1``) and the
    tolerance is 0.
    """
    config = SolverConfig() if config is None else config
    pairs = draw_pairs(seed, count, "powerlaw" if oracle else family, mesh)
    if oracle:
        if not isinstance(mesh, RadialMesh):
            raise PreconditionError("oracle pairs need a radial mesh")
        for p in pairs:
            # keep the two thresholds apart so the closed forms stay ordered after rounding
            p["lam2"] = max(p["lam2"], 1.01 * p["lam1"])
    jobs = [(i, p, mesh, config) for i, p in enumerate(pairs)]
    results = ordered_map(_oracle_pair if oracle else _solve_pair, jobs, workers)
    worst = max(r.violation for r in results)
    return ComparisonResult(worst, results, all(r.passed for r in results))


# ----------------------------------------------------------------- plateau


@dataclass(frozen=True)
class PlateauReport:
    detected: float
    target: float
    max_plateau: float
    window: float
    passed: bool


def plateau_probe(u: ScalarField, exact: ExactRadialSolution, tol: float,
                  eps: float = 0.0) -> PlateauReport:
    """Smallest radius beyond which ``|u| <= tol``, against the closed-form threshold.

    Passes when the two differ by at most ``5 h + sqrt(eps) R``.
    ``max_plateau`` is the largest ``|u|`` on the closed-form plateau.
    """
    mesh = u.mesh
    if not isinstance(mesh, RadialMesh):
        raise PreconditionError("the plateau probe needs a radial mesh")
    if exact.case == MILD:
        raise PreconditionError("a mild solution has no zero plateau")
    r = np.asarray(mesh.nodes)
    a = np.abs(u.values)
    tail_max = np.maximum.accumulate(a[::-1])[::-1]
    quiet = np.nonzero(tail_max <= tol)[0]
    detected = float(r[quiet[0]]) if quiet.size else float(mesh.R)
    target = 0.0 if exact.case == TRIVIAL else exact.core_radius
    on_plateau = r >= target
    max_plateau = float(a[on_plateau].max()) if on_plateau.any() else 0.0
    window = 5 * mesh.h + math.sqrt(eps) * mesh.R
    return PlateauReport(detected, target, max_plateau, window, abs(detected - target) <= window)


# --------------------------------------------------------------- regularity


@dataclass(frozen=True)
class RegularityReport:
    N: int
    lam: float
    q: float
    alpha_fit: float
    alpha_predicted: float
    alpha_levels: list
    s_star: float
    cutoffs: tuple
    norms: dict
    verdicts: dict


def _core_integral(sol: ExactRadialSolution, s: float, cutoff: float) -> float:
    """``sigma int_cutoff^b u^s r^(N-1) dr`` with ``r = e^t``."""
    b = sol.core_radius
    if cutoff >= b:
        return 0.0
    N = sol.N

    def integrand(t):
        r = math.exp(t)
        val, _ = sample_u(sol, np.array([r]))
        return val[0] ** s * r**N

    val, _ = integrate.quad(integrand, math.log(cutoff), math.log(b), limit=400,
                            epsabs=0.0, epsrel=1e-11)
    return sphere_area(N) * val


def _fit_alpha(sol: ExactRadialSolution, lo: float) -> float:
    """Slope of ``log u`` against ``log r`` over ``[lo, 10 lo]``."""
    r = np.geomspace(lo, 10 * lo, 64)
    u, _ = sample_u(sol, r)
    slope = np.polyfit(np.log(r), np.log(u), 1)[0]
    return float(-slope)


def regularity_probe(N: int, lam: float, q: float, R: float = 1.0,
                     mesh_levels: Sequence[int] = (100, 1000, 10000),
                     s_values: Optional[Sequence[float]] = None,
                     cutoffs: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5),
                     grading: float = 2.0) -> RegularityReport:
    """Blow-up rate and critical summability of the singular closed form.

    The blow-up exponent is fitted on the innermost decade ``[r_1, 10 r_1]``
    of a graded mesh for every level in ``mesh_levels``.  For each ``s``
    the ``L^s`` norm is integrated over ``{r > c}`` for shrinking cutoffs
    ``c``; it *grows* if the increments between consecutive cutoffs grow,
    otherwise it *stabilizes*.
    """
    if not 1 < q < N:
        raise PreconditionError("the regularity probe needs 1 < q < N")
    sol = build_exact(N, R, lam, q)
    s_star = N / (q - 1)
    if s_values is None:
        s_values = (0.8 * s_star, 1.2 * s_star)
    alphas = [_fit_alpha(sol, R / n**grading) for n in mesh_levels]
    norms, verdicts = {}, {}
    for s in s_values:
        J = [_core_integral(sol, s, c) for c in cutoffs]
        norms[float(s)] = [j ** (1.0 / s) for j in J]
        inc = np.diff(J)
        grows = inc.size >= 2 and inc[-1] > inc[-2]
        verdicts[float(s)] = "grows" if grows else "stabilizes"
    return RegularityReport(N, lam, q, alphas[-1], q - 1, alphas, s_star, tuple(cutoffs), norms, verdicts)


# -------------------------------------------------------- integral identities


def _midpoint_profile(sol: ExactRadialSolution, mesh: RadialMesh):
    m = mesh.midpoints
    weights = sphere_area(mesh.N) * m ** (mesh.N - 1) * mesh.widths
    u, _ = sample_u(sol, m)
    du = np.abs(exact_du(sol, m))
    f = sol.lam * m ** (-sol.q)
    return weights, u, du, f


def power_identity_check(exact: ExactRadialSolution, m: float, mesh: RadialMesh):
    """``int |D u^m| + int u^m |Du|`` against ``int u^m f`` by midpoint quadrature.

    Returns ``(lhs, rhs, relative_gap)``.  Needs a singular solution and
    ``m (q - 1) < N - q`` so that every integral is finite.
    """
    if exact.case != SINGULAR:
        raise PreconditionError("the power identity is checked on singular solutions")
    N, q = exact.N, exact.q
    if not m > 1:
        raise PreconditionError(f"need m > 1, got {m}")
    if not m * (q - 1) < N - q:
        raise PreconditionError(f"need m (q - 1) < N - q = {N - q}, got {m * (q - 1)}")
    w, u, du, f = _midpoint_profile(exact, mesh)
    lhs = math.fsum(w * m * u ** (m - 1) * du) + math.fsum(w * u**m * du)
    rhs = math.fsum(w * u**m * f)
    return lhs, rhs, abs(lhs - rhs) / rhs


def gradient_power_bound_check(exact: ExactRadialSolution, m: float, p: float, mesh: RadialMesh):
    """``int |D u^(m+1)| <= (m+1) |u^m|_{p'} |f|_p``; returns ``(lhs, rhs, passed)``.

    Needs ``1 < p < N/q`` (with a ``1e-9`` margin) and ``m (q - 1) p' < N``.
    All integrals use the same midpoint rule.
    """
    N, q = exact.N, exact.q
    if not (1 < p and p < N / q - 1e-9):
        raise PreconditionError(f"need 1 < p < N/q = {N / q}, got {p}")
    pc = p / (p - 1)
    if not m > 0:
        raise PreconditionError("need m > 0")
    if q > 1 and not m * (q - 1) * pc < N:
        raise PreconditionError(f"need m (q - 1) p' < N, got {m * (q - 1) * pc}")
    if exact.case == TRIVIAL:
        return 0.0, 0.0, True
    w, u, du, f = _midpoint_profile(exact, mesh)
    lhs = math.fsum(w * (m + 1) * u**m * du)
    norm_um = math.fsum(w * u ** (m * pc)) ** (1 / pc)
    norm_f = math.fsum(w * f**p) ** (1 / p)
    rhs = (m + 1) * norm_um * norm_f
    return lhs, rhs, lhs <= rhs * 1.01


# ----------------------------------------------------- transformed equation


def transformed_equation_check(u: ScalarField, z: VectorField, f: ScalarField,
                               mesh: Optional[Mesh] = None, exclude=None) -> float:
    """Volume-weighted l2 norm of ``-div(e^-u z) - e^-u f``.

    Radial meshes: node-located fields (``z.location == "node"``, e.g. the
    closed form) are differentiated with second-order finite differences;
    midpoint fields (solver output) use the finite-volume divergence of the
    solver, with ``e^-u`` averaged onto the midpoints.  ``exclude`` is a
    boolean mask of nodes to leave out.  Grids use the face divergence.
    """
    mesh = u.mesh if mesh is None else mesh
    if isinstance(mesh, CartesianGrid):
        e = np.exp(-u.values)
        zx, zy = z.values
        ex = 0.5 * (e[:, :-1] + e[:, 1:])
        ey = 0.5 * (e[:-1, :] + e[1:, :])
        div = discrete_divergence((ex * zx, ey * zy), mask=mesh.mask) / mesh.h
        res = (-div - e * f.values)[mesh.mask]
        if exclude is not None:
            res = res[~np.asarray(exclude)[mesh.mask]]
        return float(mesh.h * np.sqrt(np.sum(res * res)))

    r = np.asarray(mesh.nodes)
    N = mesh.N
    V = mesh.shell_volumes
    e = np.exp(-np.asarray(u.values))
    if z.location == "node":
        flux = r ** (N - 1) * e * np.asarray(z.values)
        with np.errstate(divide="ignore", invalid="ignore"):
            div = np.gradient(flux, r, edge_order=2) / r ** (N - 1)
        res = -div - e * np.asarray(f.values)
        keep = r > 0
        keep[-1] = False
    else:
        A = sphere_area(N) * mesh.midpoints ** (N - 1)
        em = 0.5 * (e[:-1] + e[1:])
        F = np.concatenate([[0.0], A * em * np.asarray(z.values)])
        res = np.zeros_like(r)
        res[:-1] = -(F[1:] - F[:-1]) / V[:-1] - e[:-1] * np.asarray(f.values)[:-1]
        keep = np.ones(r.shape, dtype=bool)
        keep[-1] = False
    if exclude is not None:
        keep &= ~np.asarray(exclude, dtype=bool)
    return float(np.sqrt(np.sum(V[keep] * res[keep] ** 2)))


def oracle_fields(sol: ExactRadialSolution, mesh: RadialMesh):
    """Closed-form ``u``, node ``z`` and ``f`` on ``mesh`` (origin value replaced by ``u(r_1)``)."""
    r = np.asarray(mesh.nodes)
    u, unbounded = sample_u(sol, r)
    u[unbounded] = u[1]
    z = np.empty_like(r)
    z[1:] = exact_z(sol, r[1:])
    z[0] = z[1]
    f = evaluate_datum(PowerLaw(sol.lam, sol.q), mesh)
    return ScalarField(mesh, u), VectorField(mesh, z, location="node"), f
