"""
Mild power-law data: bounded plateaus and trivial solutions
===========================================================

For ``f = lam / |x|^q`` with ``q < 1`` the solution is flat on a ball of
radius ``r_lam`` around the origin and decays to zero at the boundary.
If ``r_lam`` exceeds the domain radius the datum is too small to produce
anything and the solution is identically zero.
"""

import numpy as np

from onelaplace import PowerLaw, build_exact, build_radial_mesh
from onelaplace.exact import sample_u
from onelaplace.solver import solve

N, lam, q = 2, 2.0, 0.5

# on the unit disk the threshold 0.5625 lies inside: a flat top of height P
sol = build_exact(N, 1.0, lam, q)
print(f"R=1:   case {sol.case}, r_lam {sol.threshold:.4f}, plateau value {sol.plateau:.6f}")

mesh = build_radial_mesh(N, 1.0, 2048, 2.0)
rep = solve(mesh, PowerLaw(lam, q))
exact, _ = sample_u(sol, np.asarray(mesh.nodes))
print(f"       solver max error {np.max(np.abs(rep.u.values - exact)):.2e}, "
      f"u(0) = {rep.u.values[0]:.6f}")

# shrink the disk below r_lam: the solution is zero
sol = build_exact(N, 0.5, lam, q)
mesh = build_radial_mesh(N, 0.5, 1024, 2.0)
rep = solve(mesh, PowerLaw(lam, q))
print(f"R=0.5: case {sol.case}, solver max |u| {rep.max_abs:.1e}")
