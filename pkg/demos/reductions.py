"""Descendant equations and the sl(2) algebraization of the QES CHEq.

Run: python demos/reductions.py
"""

from fractions import Fraction

from qesheun.cheq_core import QesCertificate
from qesheun.reductions import (classify_reductions, cheq_operator, derived_params,
                                schroedinger_form, sl2_decompose, sl2_expand)

cert = QesCertificate.from_family(Fraction(3, 2), Fraction(1, 2), Fraction(-2), 1)
print("reductions:", sorted(k.name for k in classify_reductions(cert.params.with_q(0))))
dp = derived_params(cert.params.with_q(Fraction(1, 3)))
print("A, B, C, a, b =", dp.A, dp.B, dp.C, dp.a, dp.b)

d = sl2_decompose(cert)
print("sl(2) coefficients:", d)
print("expansion equals the operator:", sl2_expand(d) == cheq_operator(cert))

form = schroedinger_form(cert, Fraction(1, 3))
print("V(x) at x = 0.5, 1, 2:", form.potential([0.5, 1.0, 2.0]))
