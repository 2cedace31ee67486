"""Closed-form radial solutions for power-law data ``lam |x|^-q`` on ``B_R(0)``.

Three regimes:

``singular`` (``1 < q < N``)
    ``u`` blows up at the origin like ``lam/(q-1) r^(1-q)`` and vanishes on the
    outer annulus ``rho <= r <= R``, ``rho = ((N-1)/lam)**(1/(1-q))``.  The
    calibration field is ``-x/|x|`` in the core and an explicit field of
    magnitude below one on the annulus.
``mild`` (``0 < q < 1``)
    ``u`` is constant (= ``plateau``) on the inner ball ``r <= r_lam``,
    ``r_lam = ((N-q)/lam)**(1/(1-q))``, and strictly decreasing outside.
``trivial``
    Mild data with ``r_lam >= R``: the datum is too small and ``u = 0``.

When ``rho >= R`` in the singular regime the core fills the whole ball and
the constant is fixed by ``u(R) = 0`` instead (``core_radius = R``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DomainError, RadialMesh

SINGULAR = "singular"
MILD = "mild"
TRIVIAL = "trivial"


class _Unbounded:
    """Marker for the value of a singular solution at the origin."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


class UnsupportedExponentError(DomainError):
    pass


@dataclass(frozen=True)
class ExactRadialSolution:
    case: str
    N: int
    R: float
    lam: float
    q: float
    threshold: float
    plateau: float = 0.0
    C: Optional[float] = None

    @property
    def core_radius(self) -> float:
        """Radius where the solution stops (singular) or starts (mild) varying."""
        return min(self.threshold, self.R)

    @property
    def has_plateau(self) -> bool:
        if self.case == SINGULAR:
            return self.threshold < self.R
        return True


def threshold_radius(N: int, lam: float, q: float) -> float:
    """``rho_lam`` for ``q > 1``, ``r_lam`` for ``q < 1``."""
    if q == 1:
        raise UnsupportedExponentError("q = 1 has no threshold radius")
    if not lam > 0:
        raise DomainError(f"lam must be positive, got {lam}")
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    num = (N - 1) if q > 1 else (N - q)
    return (num / lam) ** (1.0 / (1.0 - q))


def build_exact(N: int, R: float, lam: float, q: float) -> ExactRadialSolution:
    rho = threshold_radius(N, lam, q)
    if q > 1:
        # q = N still has a closed-form profile, only the annulus field degenerates
        C = rho ** (N - 1) * (1 - q) / (N - q) if q != N else None
        return ExactRadialSolution(SINGULAR, N, R, lam, q, rho, 0.0, C)
    if rho >= R:
        return ExactRadialSolution(TRIVIAL, N, R, lam, q, rho, 0.0)
    P = (N - 1) * math.log(rho / R) + lam / (1 - q) * (R ** (1 - q) - rho ** (1 - q))
    return ExactRadialSolution(MILD, N, R, lam, q, rho, P)


def _profile(sol: ExactRadialSolution, r, b):
    """``(N-1) log(r/b) + lam/(1-q) (b^(1-q) - r^(1-q))``: the solution vanishing at ``b``."""
    N, lam, q = sol.N, sol.lam, sol.q
    # nonnegative in exact arithmetic; clamp rounding next to b
    return np.maximum((N - 1) * np.log(r / b) + lam / (1 - q) * (b ** (1 - q) - r ** (1 - q)), 0.0)


def _check_radius(sol, r):
    if np.any(np.asarray(r) < 0) or np.any(np.asarray(r) > sol.R * (1 + 1e-14)):
        raise DomainError(f"radius outside [0, {sol.R}]")


def exact_u(sol: ExactRadialSolution, r: float):
    """Value of the solution at radius ``r`` (``UNBOUNDED`` at a singular origin)."""
    _check_radius(sol, r)
    if sol.case == TRIVIAL:
        return 0.0
    b = sol.core_radius
    if sol.case == SINGULAR:
        if r == 0:
            return UNBOUNDED
        return float(_profile(sol, r, b)) if r < b else 0.0
    if r <= sol.threshold:
        return sol.plateau
    return float(_profile(sol, r, sol.R))


def sample_u(sol: ExactRadialSolution, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`exact_u`.

    Returns ``(values, unbounded)``; ``values`` is NaN where ``unbounded``.
    """
    r = np.asarray(r, dtype=float)
    _check_radius(sol, r)
    out = np.zeros_like(r)
    unbounded = np.zeros(r.shape, dtype=bool)
    if sol.case == TRIVIAL:
        return out, unbounded
    if sol.case == SINGULAR:
        b = sol.core_radius
        core = (r > 0) & (r < b)
        out[core] = _profile(sol, r[core], b)
        unbounded = r == 0
        out[unbounded] = np.nan
        return out, unbounded
    inner = r <= sol.threshold
    out[inner] = sol.plateau
    out[~inner] = _profile(sol, r[~inner], sol.R)
    return out, unbounded


def exact_du(sol: ExactRadialSolution, r):
    """Radial derivative ``h'(r)`` of the closed form (``r > 0``)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("derivative requires r > 0")
    N, lam, q = sol.N, sol.lam, sol.q
    # term-by-term derivative of _profile
    d = (N - 1) / r - lam * r ** (-q)
    if sol.case == TRIVIAL:
        return np.zeros_like(r)
    if sol.case == SINGULAR:
        return np.where(r < sol.threshold, d, 0.0)
    return np.where(r <= sol.threshold, 0.0, d)


def exact_z(sol: ExactRadialSolution, r):
    """Signed radial component of the calibration field, ``z(x) = value * x/|x|``."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("the field direction is undefined at r = 0")
    _check_radius(sol, r_arr)
    N, lam, q = sol.N, sol.lam, sol.q
    if sol.case == SINGULAR:
        rho = sol.threshold
        if sol.C is None and np.any(r_arr >= rho):
            raise DomainError("the annulus field needs q != N")
        if sol.C is None:
            plateau = np.full_like(r_arr, np.nan)
        else:
            plateau = -(r_arr / (N - q)) * ((N - 1) * rho ** (q - 1) * r_arr ** (-q)
                                            + (1 - q) * rho ** (N - 1) * r_arr ** (-N))
        # with rho >= R the saturated core fills the closed ball
        z = np.where(r_arr < rho, -1.0, plateau)
    else:
        inner = -(lam / (N - q)) * r_arr ** (1 - q)
        z = inner if sol.case == TRIVIAL else np.where(r_arr <= sol.threshold, inner, -1.0)
    return float(z) if np.ndim(r) == 0 else z


def _xi(sol, r):
    """Plateau field divided by ``r`` and its derivative."""
    N, lam, q = sol.N, sol.lam, sol.q
    C = sol.C if sol.case == SINGULAR else 0.0
    xi = -lam / (N - q) * r ** (-q) - C * r ** (-N)
    dxi = q * lam / (N - q) * r ** (-q - 1) + N * C * r ** (-N - 1)
    return xi, dxi


@dataclass(frozen=True)
class ExactResidual:
    core: float
    plateau: float


def exact_residual(sol: ExactRadialSolution, mesh: RadialMesh) -> Optional[ExactResidual]:
    """Residuals of the core ODE and the plateau divergence equation at the nodes.

    Each residual is divided by the largest term of its equation (at least 1)
    so that the identities are checked to relative machine precision even
    where ``lam r^-q`` is huge.  Returns ``None`` for the trivial case.
    """
    if sol.case == TRIVIAL:
        return None
    r = np.asarray(mesh.nodes)[1:]
    r = r[r <= sol.R]
    N, lam, q = sol.N, sol.lam, sol.q
    f = lam * r ** (-q)
    if sol.case == SINGULAR:
        core = r < sol.core_radius
    else:
        core = r > sol.threshold
    plat = ~core
    core_res = 0.0
    if core.any():
        rc = r[core]
        hp = exact_du(sol, rc)
        scale = np.maximum.reduce([np.ones_like(rc), (N - 1) / rc, np.abs(hp), f[core]])
        core_res = float(np.max(np.abs((N - 1) / rc - hp - f[core]) / scale))
    plat_res = 0.0
    if plat.any() and not (sol.case == SINGULAR and sol.C is None):
        rp = r[plat]
        xi, dxi = _xi(sol, rp)
        scale = np.maximum.reduce([np.ones_like(rp), N * np.abs(xi), rp * np.abs(dxi), f[plat]])
        plat_res = float(np.max(np.abs(-(N * xi + rp * dxi) - f[plat]) / scale))
    return ExactResidual(core_res, plat_res)
