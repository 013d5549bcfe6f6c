"""Critical polynomials, spectral roots and polynomial solutions of the QES CHEq.

Run: python demos/critical_polynomials.py
"""

import math

from qesheun import build_all_solutions, build_family, count_zeros, spectral_roots
from qesheun.ortho import (defining_system_residual, moment_functional, nu_coefficients,
                           orthogonality_defect, weak_orthogonality_check)

R = math.sqrt(10) / 3
fam = build_family(1, 1, -4 * R, 2)
print("P_3(q) =", fam.polys[3])
roots = spectral_roots(fam)
print("roots:", [f"{r:.12f}" for r in roots])
print("(2/3)(5 + 2 sqrt 10) =", f"{2 / 3 * (5 + 2 * math.sqrt(10)):.12f}")

sols = build_all_solutions(fam)
for s in sols:
    zeros = count_zeros(s, (-1, 1)), count_zeros(s, (1, math.inf))
    print(f"u_2,{s.j}: monic coefficients {list(map(float, s.monic()))}, zeros in (-1,1) and (1,inf): {zeros}")

print("orthogonality defects on (-1,1):",
      [f"{orthogonality_defect(a, b):.1e}" for a, b in [(sols[0], sols[1]), (sols[1], sols[2])]])

mf = moment_functional(fam, roots)
print("Stieltjes weights:", mf.omegas)
print("norms nu_k:", [float(v) for v in nu_coefficients(fam)])
print("weak orthogonality deviation:", weak_orthogonality_check(mf, fam))
print("defining system residual:", defining_system_residual(mf, fam))
