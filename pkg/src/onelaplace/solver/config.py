from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import ConfigurationError, ScalarField, VectorField


_BELOW_ONE = np.nextafter(1.0, 0.0)


def below_one(z: np.ndarray) -> np.ndarray:
    """Round magnitudes toward zero so that ``|z| < 1`` survives floating point.

    ``g / sqrt(g^2 + eps^2)`` is below 1 in exact arithmetic but rounds to 1
    once ``|g| / eps`` exceeds about ``1e8``.
    """
    return np.clip(z, -_BELOW_ONE, _BELOW_ONE)


class SolverError(RuntimeError):
    """A linear solve broke down."""


@dataclass(frozen=True)
class SolverConfig:
    """Continuation and stopping parameters.

    ``eps_start`` and ``eps_min`` left as ``None`` resolve to ``1e-2 L`` and
    ``1e-6 L`` with ``L`` the length scale of the mesh (the ball radius).
    A level is finished once the relative update drops below ``tau_fp`` and
    the residual below ``tau_res``, or once the residual drops below
    ``linear_tol``.
    """

    eps_start: Optional[float] = None
    eps_min: Optional[float] = None
    shrink: float = 0.25
    tau_fp: float = 1e-8
    tau_res: float = 1e-5
    max_iter: int = 200
    linear_tol: float = 1e-12
    method: str = "hybrid"
    clip: bool = False

    def __post_init__(self):
        for name in ("eps_start", "eps_min"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigurationError(f"{name} must be positive, got {v}")
        if self.eps_start is not None and self.eps_min is not None and self.eps_min > self.eps_start:
            raise ConfigurationError("eps_min must not exceed eps_start")
        if not 0 < self.shrink < 1:
            raise ConfigurationError(f"shrink must lie in (0, 1), got {self.shrink}")
        if not (self.tau_fp > 0 and self.tau_res > 0 and self.linear_tol > 0):
            raise ConfigurationError("tolerances must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be an integer >= 1, got {self.max_iter}")
        if self.method not in ("hybrid", "picard"):
            raise ConfigurationError(f"unknown method {self.method!r}")

    def schedule(self, length: float) -> list[float]:
        """The sequence of regularization levels."""
        start = 1e-2 * length if self.eps_start is None else self.eps_start
        stop = 1e-6 * length if self.eps_min is None else self.eps_min
        if stop > start:
            raise ConfigurationError("eps_min must not exceed eps_start")
        levels = [start]
        while levels[-1] > stop * (1 + 1e-12):
            levels.append(max(levels[-1] * self.shrink, stop))
        return levels


@dataclass(frozen=True, eq=False)
class SolutionReport:
    u: ScalarField
    z: VectorField
    eps: float
    eps_levels: list[float]
    iterations: list[int]
    residuals: list[float]
    residual: float
    converged: bool
    undershoot: float
    undershoot_flag: bool
    clipped: bool
    wall_time: float
    history: list[list[float]] = field(default_factory=list, repr=False)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.u.values)))
