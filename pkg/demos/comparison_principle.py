"""
Ordered data give ordered solutions
===================================

Draw random nested pairs ``f1 <= f2`` (same power law with a larger
amplitude, or a power law plus a Gaussian ring), solve both problems and
record the worst ``max(u1 - u2)``.  A positive value would be a violation;
each pair is allowed a discretization slack of ``(h + eps) * 10 * max(1, |f2|_1)``.
"""

from onelaplace import build_disk_grid, build_radial_mesh
from onelaplace.verify import comparison_suite

for label, mesh in (("radial N=3, n=512", build_radial_mesh(3, 1.0, 512, 2.0)),
                    ("disk, 32 cells across", build_disk_grid(1.0, 32))):
    res = comparison_suite(seed=7, count=6, family="mixed", mesh=mesh)
    print(f"{label}: worst violation {res.worst:.1e}, all within slack: {res.passed}")
    for p in res.pairs:
        print(f"   pair {p.index} ({p.params['kind']:8s}) violation {p.violation:+.1e}, "
              f"slack {p.tolerance:.1e}")

# the closed forms are ordered exactly, no slack needed
res = comparison_suite(seed=7, count=20, family="powerlaw", mesh=build_radial_mesh(2, 1.0, 1024, 2.0),
                       oracle=True)
print(f"closed-form pairs: worst violation {res.worst}")
