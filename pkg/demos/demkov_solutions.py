"""Demkov elementary eigenfunctions of two fixed Coulomb centers in 2D and 3D.

Run: python demos/demkov_solutions.py
"""

from qesheun.twocenter import (CartesianGrid, CenterConfig, SearchDiagnostics, demkov_search,
                               density_grid, hamiltonian_residual, norm_squared)

import numpy as np

for dim in (3, 2):
    for Z1, Z2 in ((5, 1), (5, 3), (3, 1)):
        diag = SearchDiagnostics()
        for s in demkov_search(CenterConfig(Z1, Z2, dim), 4, diagnostics=diag):
            print(f"{dim}D Z=({Z1},{Z2}) n=({s.qn.n1},{s.qn.n2}) cases=({s.case_r},{s.case_a}) "
                  f"E={float(s.E):g} lambda={s.lam:.10f} R={s.R:.10f} "
                  f"roots=({s.radial.j},{s.angular.j}) N^2={norm_squared(s):.6g}")
        if diag.unphysical:
            print(f"   {len(diag.unphysical)} candidates rejected with R <= 0")

s = demkov_search(CenterConfig(5, 1, 3), 3)[0]
rng = np.random.default_rng(0)
pts = rng.uniform(-3, 3, (200, 3))
pts = pts[np.linalg.norm(pts[:, 1:], axis=1) > 0.3]
for h in (1e-2, 5e-3, 2.5e-3):
    print(f"h={h:g}: ||H psi - E psi|| / ||psi|| = {hamiltonian_residual(s, pts, h):.3e}")

dg = density_grid(s, CartesianGrid((-4, -4, -4), (4, 4, 4), (41, 41, 41)))
print(f"max rho = {dg.rho.max():.4f}; points with rho > 0.012: {np.count_nonzero(dg.rho > 0.012)}")
