"""
How integrable is the solution?
===============================

Data in ``L^p`` with ``1 < p < N`` give solutions in ``L^s`` for every
``s`` below ``Np/(N-p)``, reached by a bootstrapping ladder of exponents.
For power-law data ``lam / |x|^q`` the solution behaves like ``r^(1-q)``,
so it lies in ``L^s`` exactly for ``s < N/(q-1)``.  Both facts are checked
numerically here, together with an integral identity for powers of ``u``.
"""

from onelaplace import build_exact, build_radial_mesh
from onelaplace.verify import exponent_ladder, power_identity_check, regularity_probe

# the ladder creeps up to its limit geometrically
lad = exponent_ladder(3, 2.0, 8)
print("ladder N=3 p=2:", ", ".join(f"{s:.3f}" for s in lad.s), f"-> limit {lad.limit:g}")

# blow-up rate and critical exponent of the closed form
for N, q in ((3, 2.0), (2, 1.5)):
    rep = regularity_probe(N, 1.0, q)
    print(f"N={N} q={q}: fitted rate {rep.alpha_fit:.4f} (expected {rep.alpha_predicted:g}), "
          f"critical exponent {rep.s_star:g}")
    for s, verdict in rep.verdicts.items():
        norms = ", ".join(f"{v:.3g}" for v in rep.norms[s])
        print(f"    s={s:.2f}: truncated norms {norms} -> {verdict}")

# int |D u^m| + int u^m |Du| = int u^m f, with every integral finite
for N, q, m in ((3, 1.5, 2.0), (3, 1.2, 3.0), (4, 2.0, 1.5)):
    sol = build_exact(N, 3.0, 2.0, q)
    for n in (1000, 10_000, 100_000):
        lhs, rhs, gap = power_identity_check(sol, m, build_radial_mesh(N, 3.0, n, 3.0))
        print(f"N={N} q={q} m={m} n={n:6d}: lhs {lhs:.8g}  rhs {rhs:.8g}  gap {gap:.1e}")
