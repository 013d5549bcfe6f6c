"""Orthogonality structures of the QES confluent Heun equation.

Two unrelated structures live here:

* the Sturm-Liouville weight and the double orthogonality of the
  polynomial solutions ``u_{n,j}`` on ``(-1, 1)`` and on ``(1, inf)``;
* the discrete moment functional under which the critical polynomials
  ``P_0 .. P_n`` are (weakly) orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .cheq_core import CriticalPolynomialFamily, PolynomialSolution, SpectralRoots
from .errors import Divergent, SingularPoint, SingularSystem

__all__ = [
    "WeightFunction",
    "MomentFunctional",
    "weight_eval",
    "double_orthogonality",
    "orthogonality_defect",
    "tail_cutoff",
    "nu_coefficients",
    "moment_functional",
    "precise_roots",
    "weak_orthogonality_check",
    "defining_system_residual",
]

INTERVALS = {"(-1,1)": (-1.0, 1.0), "(1,inf)": (1.0, math.inf)}


@dataclass(frozen=True)
class WeightFunction:
    """``w(z) = (z+1)^{gamma-1} (z-1)^{delta-1} e^{eps z/2}``.

    On ``(-1, 1)`` the factor ``(z-1)^{delta-1}`` is taken as
    ``|z-1|^{delta-1}`` so the weight stays positive.
    """

    gamma: float
    delta: float
    epsilon: float

    @classmethod
    def of(cls, sol: PolynomialSolution) -> "WeightFunction":
        return cls(sol.gamma, sol.delta, sol.epsilon)

    def __call__(self, z):
        return weight_eval(self, z)


def weight_eval(w: WeightFunction, z):
    g1, d1 = float(w.gamma) - 1, float(w.delta) - 1
    z = np.asarray(z, dtype=float)
    if (g1 < 0 and np.any(z == -1)) or (d1 < 0 and np.any(z == 1)):
        raise SingularPoint(f"weight has a pole at z = {z}")
    with np.errstate(divide="ignore"):
        out = np.abs(z + 1) ** g1 * np.abs(z - 1) ** d1 * np.exp(float(w.epsilon) * z / 2)
    return out if out.ndim else float(out)


def tail_cutoff(epsilon: float, degree: int, start: float = 2.0, rel: float = 1e-16) -> float:
    """Point beyond which ``z^degree e^{eps z/2}`` is below ``rel`` of its peak.

    ``epsilon`` must be negative.
    """
    rate = -float(epsilon) / 2
    peak_z = max(start, degree / rate)
    log_peak = degree * math.log(peak_z) - rate * peak_z
    z = peak_z
    step = max(1.0, 1.0 / rate)
    while degree * math.log(z) - rate * z > log_peak + math.log(rel):
        z += step
    return z


def _check_exponents(w: WeightFunction, interval: str):
    if interval not in INTERVALS:
        raise ValueError(f"interval must be one of {sorted(INTERVALS)}")
    g1, d1 = float(w.gamma) - 1, float(w.delta) - 1
    if d1 <= -1 or (interval == "(-1,1)" and g1 <= -1):
        raise Divergent("weight is not integrable at a finite endpoint")
    if interval == "(1,inf)" and float(w.epsilon) >= 0:
        raise Divergent("the (1, inf) integral needs epsilon < 0")


def _weighted_integral(f, w: WeightFunction, interval: str, degree: int,
                       epsrel: float = 1e-10, epsabs: float = None) -> float:
    """``int f(z) w(z) dz``; algebraic endpoint factors go to QUADPACK's QAWS.

    Integrals of products of orthogonal polynomials cancel to zero, where a
    pure relative target cannot be met. Unless given, the absolute target is
    ``epsrel`` times a coarse estimate of ``int |f| w dz``.
    """
    _check_exponents(w, interval)
    if epsabs is None:
        scale = _weighted_integral(lambda z: abs(f(z)), w, interval, degree, 1e-3, 0.0)
        return _weighted_integral(f, w, interval, degree, epsrel, epsrel * scale)
    g1, d1, e = float(w.gamma) - 1, float(w.delta) - 1, float(w.epsilon)
    opts = dict(epsabs=epsabs, epsrel=epsrel, limit=500)
    if interval == "(-1,1)":
        val, _ = integrate.quad(lambda z: f(z) * math.exp(e * z / 2), -1.0, 1.0,
                                weight="alg", wvar=(g1, d1), **opts)
        return val
    near, _ = integrate.quad(lambda z: f(z) * (z + 1) ** g1 * math.exp(e * z / 2), 1.0, 2.0,
                             weight="alg", wvar=(d1, 0.0), **opts)
    top = tail_cutoff(e, degree + max(g1 + d1, 0.0))
    far, _ = integrate.quad(lambda z: f(z) * weight_eval(w, z), 2.0, top, **opts)
    return near + far


def double_orthogonality(sol_a: PolynomialSolution, sol_b: PolynomialSolution,
                         w: WeightFunction = None, interval: str = "(-1,1)") -> float:
    """``int u_a u_b w dz`` over ``(-1, 1)`` or ``(1, inf)``."""
    w = w or WeightFunction.of(sol_a)
    ua, ub = sol_a.in_z().to_float(), sol_b.in_z().to_float()
    return _weighted_integral(lambda z: ua(z) * ub(z), w, interval, ua.degree + ub.degree)


def orthogonality_defect(sol_a: PolynomialSolution, sol_b: PolynomialSolution,
                         interval: str = "(-1,1)") -> float:
    """Cosine of the angle between ``u_a`` and ``u_b`` in the weighted inner product."""
    w = WeightFunction.of(sol_a)
    ab = double_orthogonality(sol_a, sol_b, w, interval)
    aa = double_orthogonality(sol_a, sol_a, w, interval)
    bb = double_orthogonality(sol_b, sol_b, w, interval)
    return abs(ab) / math.sqrt(aa * bb)


def nu_coefficients(family: CriticalPolynomialFamily) -> list:
    """Squared norms ``nu_k = prod_{j<=k} j eps (n-j+1)(gamma+j-1)``, ``k = 0..n``."""
    out = [family.gamma * 0 + 1]
    for j in range(1, family.n + 1):
        out.append(out[-1] * family.recurrence_coefficients(j)[1])
    return out


@dataclass(frozen=True)
class MomentFunctional:
    """Discrete Stieltjes measure ``sum_j Omega_j delta(q - q_j)``."""

    roots: SpectralRoots
    omegas: tuple
    nus: tuple
    precise_roots: tuple = ()

    def __call__(self, p) -> float:
        """``L(p) = sum_j p(q_j) Omega_j``."""
        return float(sum(float(p(q)) * om for q, om in zip(self.roots, self.omegas)))

    def step_measure(self, q) -> float:
        """``Omega(q) = sum_j Omega_j theta(q - q_j)``."""
        return float(sum(om for r, om in zip(self.roots, self.omegas) if q >= r))


def precise_roots(family: CriticalPolynomialFamily, roots, bits: int = 200) -> tuple:
    """Roots of the exact ``P_{n+1}`` refined past double precision.

    Starting from the float roots, Newton steps run in rational arithmetic
    with the iterate rounded to ``bits`` binary digits; three steps take a
    double-precision root well past ``bits``.
    """
    p = family.rational_polys[family.n + 1]
    dp = p.deriv()
    out = []
    for r in roots:
        q = Fraction(float(r))
        for _ in range(3):
            d = dp(q)
            if d == 0:
                break
            q = q - p(q) / d
            q = Fraction(round(q * 2**bits), 2**bits)
        out.append(q)
    return tuple(out)


def _p_exact(family: CriticalPolynomialFamily, qs) -> list:
    """``P_k(q_j)`` in exact arithmetic, ``k = 0..n``."""
    return [[family.rational_polys[k](q) for q in qs] for k in range(family.n + 1)]


def _exact_residual(A: list, omega) -> np.ndarray:
    om = [Fraction(float(o)) for o in omega]
    return np.array([float(sum(a * o for a, o in zip(row, om)) - (k == 0))
                     for k, row in enumerate(A)])


def moment_functional(family: CriticalPolynomialFamily, roots: SpectralRoots,
                      refine_steps: int = 3) -> MomentFunctional:
    """Solve ``sum_j P_k(q_j) Omega_j = delta_{k0}``, ``k = 0..n``.

    The weights ``Omega_j`` are very sensitive to the roots (the smallest
    ones change by relative amounts far above machine precision when a root
    moves by one ulp), so the system is set up at roots refined past double
    precision, with exactly evaluated entries. The float solve is row
    equilibrated and polished by iterative refinement with exact residuals.
    """
    qs = precise_roots(family, roots)
    if len(set(qs)) != len(qs):
        raise SingularSystem("spectral roots are not distinct")
    A_ex = _p_exact(family, qs)
    A = np.array([[float(v) for v in row] for row in A_ex])
    rhs = np.zeros(family.n + 1)
    rhs[0] = 1.0
    scale = np.max(np.abs(A), axis=1)
    if np.any(scale == 0):
        raise SingularSystem("a critical polynomial vanishes at every root")
    As = A / scale[:, None]
    if np.linalg.cond(As) > 1e13:
        raise SingularSystem("spectral roots are numerically coincident")
    omega = np.linalg.solve(As, rhs / scale)
    for _ in range(refine_steps):
        resid = _exact_residual(A_ex, omega)
        omega = omega - np.linalg.solve(As, resid / scale)
    nus = tuple(float(v) for v in nu_coefficients(family))
    return MomentFunctional(roots, tuple(float(o) for o in omega), nus, qs)


def _mf_roots(mf: MomentFunctional):
    return mf.precise_roots or tuple(Fraction(float(r)) for r in mf.roots)


def defining_system_residual(mf: MomentFunctional, family: CriticalPolynomialFamily) -> float:
    """``max_k |sum_j P_k(q_j) Omega_j - delta_{k0}|``, summed in exact arithmetic."""
    return float(np.max(np.abs(_exact_residual(_p_exact(family, _mf_roots(mf)), mf.omegas))))


def weak_orthogonality_check(mf: MomentFunctional, family: CriticalPolynomialFamily) -> float:
    """``max_{k,l} |L(P_k P_l) - nu_k delta_kl|`` over ``0 <= k, l <= n``."""
    A = _p_exact(family, _mf_roots(mf))
    om = [Fraction(float(o)) for o in mf.omegas]
    n = family.n + 1
    dev = 0.0
    for k in range(n):
        for l in range(k, n):
            val = float(sum(a * b * o for a, b, o in zip(A[k], A[l], om)))
            dev = max(dev, abs(val - (float(mf.nus[k]) if k == l else 0.0)))
    return dev
