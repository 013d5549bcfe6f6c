"""Descendant equations, the sl(2,R) decomposition and the Schroedinger form.

Gauge factors are written ``g(z) = (z+1)^p (z-1)^m exp(l z)`` and act as
``u = g * v``. On ``(-1, 1)`` the factor ``(z-1)^m`` is replaced by
``|z-1|^m``; this drops a constant phase and leaves every logarithmic
derivative unchanged, so all operator identities hold on both intervals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .cheq_core import CheqParams, QesCertificate
from .errors import ConstraintViolated, NotQes
from .polynomial import RealPolynomial, is_exact

__all__ = [
    "DerivedParams",
    "ReductionKind",
    "GaugeFactor",
    "Sl2Decomposition",
    "DiffOp",
    "SchroedingerForm",
    "derived_params",
    "classify_reductions",
    "ches1_gauge",
    "gseq_gauge",
    "rwh_gauge",
    "conjugated_cheq",
    "ches1_operator",
    "ches2_operator",
    "sl2_generators",
    "sl2_decompose",
    "sl2_expand",
    "cheq_operator",
    "schroedinger_form",
]


def _half(x):
    return Fraction(1, 2) * x if is_exact(x) else x / 2


@dataclass(frozen=True)
class DerivedParams:
    """Coefficients ``A, B, C, a, b`` of the self-adjoint descendant forms."""

    A: float
    B: float
    C: float
    a: float
    b: float


def derived_params(p: CheqParams) -> DerivedParams:
    if p.q is None:
        raise ValueError("derived parameters need a value for q")
    al, g, d, e, q = p.alpha, p.gamma, p.delta, p.epsilon, p.q
    if all(is_exact(x) for x in (al, g, d, e, q)):
        al, g, d, e, q = (Fraction(x) for x in (al, g, d, e, q))
    A = -e * e / 16
    B = al / 2 - e / 4 * (g + d)
    C = e * e / 16 + e / 4 * (g - d) - (g + d) / 4 * (g + d - 2) + al / 2 - q
    a = d * (1 - d / 2) - g * (1 - g / 2)
    b = d * (1 - d / 2) + g * (1 - g / 2) - 1
    return DerivedParams(A, B, C, a, b)


class ReductionKind(enum.Enum):
    """Descendant equations reachable from the confluent Heun equation."""

    GSEqGammaEqDelta = "gamma = delta"
    GSEqGammaEq2MinusDelta = "gamma = 2 - delta"
    Spheroidal = "GSEq branch and alpha = eps*delta (gamma=delta) or alpha = eps (gamma=2-delta)"
    AssociatedLegendre = "Spheroidal and eps = 0"
    Legendre = "AssociatedLegendre and gamma = delta = 1"
    RazavyWH_case_a = "gamma = delta = 1/2"
    RazavyWH_case_b = "gamma = delta = 3/2"
    RazavyWH_case_c = "gamma = 3/2, delta = 1/2"
    RazavyWH_case_d = "gamma = 1/2, delta = 3/2"
    Mathieu = "Razavy/Whittaker-Hill case and B = 0"

    @property
    def constraint(self) -> str:
        return self.value


RWH_CASES = {
    "a": (Fraction(1, 2), Fraction(1, 2)),
    "b": (Fraction(3, 2), Fraction(3, 2)),
    "c": (Fraction(3, 2), Fraction(1, 2)),
    "d": (Fraction(1, 2), Fraction(3, 2)),
}
"""(gamma, delta) for the four Razavy/Whittaker-Hill cases."""


def classify_reductions(p: CheqParams, tol: float = 1e-12) -> frozenset:
    """All descendant equations whose parameter constraints ``p`` meets."""

    def close(x, y):
        return abs(float(x) - float(y)) <= tol * max(1.0, abs(float(y)))

    g, d, e, al = p.gamma, p.delta, p.epsilon, p.alpha
    out = set()
    eq = close(g, d)
    mirror = close(g + d, 2)
    if eq:
        out.add(ReductionKind.GSEqGammaEqDelta)
    if mirror:
        out.add(ReductionKind.GSEqGammaEq2MinusDelta)
    spheroidal = (eq and close(al, e * d)) or (mirror and close(al, e))
    if spheroidal:
        out.add(ReductionKind.Spheroidal)
        if close(e, 0):
            out.add(ReductionKind.AssociatedLegendre)
            if close(g, 1) and close(d, 1):
                out.add(ReductionKind.Legendre)
    rwh = False
    for case, (cg, cd) in RWH_CASES.items():
        if close(g, cg) and close(d, cd):
            out.add(ReductionKind[f"RazavyWH_case_{case}"])
            rwh = True
    if rwh and close(al / 2 - e / 4 * (g + d), 0):
        out.add(ReductionKind.Mathieu)
    return frozenset(out)


@dataclass(frozen=True)
class GaugeFactor:
    """``g(z) = (z+1)^exp_plus (z-1)^exp_minus exp(exp_lin z)``."""

    exp_plus: float
    exp_minus: float
    exp_lin: float

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return (np.abs(z + 1) ** float(self.exp_plus)
                * np.abs(z - 1) ** float(self.exp_minus)
                * np.exp(float(self.exp_lin) * z))

    def log_derivative(self, z):
        """``g'/g``."""
        return self.exp_plus / (z + 1) + self.exp_minus / (z - 1) + self.exp_lin

    def log_derivative_prime(self, z):
        """``(g'/g)'``."""
        return -self.exp_plus / (z + 1) ** 2 - self.exp_minus / (z - 1) ** 2

    def inverse(self) -> "GaugeFactor":
        return GaugeFactor(-self.exp_plus, -self.exp_minus, -self.exp_lin)

    def is_identity(self) -> bool:
        return self.exp_plus == 0 and self.exp_minus == 0 and self.exp_lin == 0


def ches1_gauge(p: CheqParams) -> GaugeFactor:
    """``u = (z+1)^{(1-gamma)/2} (z-1)^{(1-delta)/2} e^{-eps z/4} v``."""
    return GaugeFactor(_half(1 - p.gamma), _half(1 - p.delta), -p.epsilon / 4)


def gseq_gauge(p: CheqParams, branch: str = "gamma=delta", tol: float = 1e-12) -> GaugeFactor:
    """Gauge to the generalized spheroidal form for one of its two branches.

    ``branch`` is ``"gamma=delta"`` or ``"gamma=2-delta"``.
    """
    g, d = float(p.gamma), float(p.delta)
    if branch == "gamma=delta":
        if abs(g - d) > tol * max(1.0, abs(d)):
            raise ConstraintViolated(f"gamma={p.gamma} != delta={p.delta}")
        h = _half(1 - p.delta)
        return GaugeFactor(h, h, -p.epsilon / 4)
    if branch == "gamma=2-delta":
        if abs(g + d - 2) > tol * 2:
            raise ConstraintViolated(f"gamma={p.gamma} != 2 - delta={p.delta}")
        h = _half(1 - p.delta)
        return GaugeFactor(-h, h, -p.epsilon / 4)
    raise ValueError(f"unknown branch {branch!r}")


def rwh_gauge(p: CheqParams) -> GaugeFactor:
    """``u = (z+1)^{(1-2gamma)/4} (z-1)^{(1-2delta)/4} e^{-eps z/4} w``."""
    return GaugeFactor((1 - 2 * p.gamma) / 4, (1 - 2 * p.delta) / 4, -p.epsilon / 4)


def _cheq_coeffs(p: CheqParams, z):
    P1 = p.epsilon / 2 * (z * z - 1) + p.gamma * (z - 1) + p.delta * (z + 1)
    P0 = p.alpha / 2 * (z + 1) - p.q
    return z * z - 1, P1, P0


def conjugated_cheq(p: CheqParams, gauge: GaugeFactor, v: RealPolynomial, z):
    """``(1/g) L[g v]`` at ``z`` for the CHEq operator ``L`` (including ``-q``)."""
    P2, P1, P0 = _cheq_coeffs(p, z)
    L1 = gauge.log_derivative(z)
    L2 = gauge.log_derivative_prime(z)
    v0, v1, v2 = v(z), v.deriv()(z), v.deriv(2)(z)
    return (P2 * (v2 + 2 * L1 * v1 + (L1 * L1 + L2) * v0)
            + P1 * (v1 + L1 * v0) + P0 * v0)


def ches1_operator(dp: DerivedParams, v: RealPolynomial, z):
    """``((z^2-1) v')' + (A z^2 + B z + C + (a z + b)/(z^2-1)) v``."""
    zz = z * z - 1
    return (zz * v.deriv(2)(z) + 2 * z * v.deriv()(z)
            + (dp.A * z * z + dp.B * z + dp.C + (dp.a * z + dp.b) / zz) * v(z))


def ches2_operator(dp: DerivedParams, w: RealPolynomial, z):
    """``(z^2-1) w'' + z w' + (A z^2 + B z + C - 1/4 + (a z + b + 1/4)/(z^2-1)) w``."""
    zz = z * z - 1
    return (zz * w.deriv(2)(z) + z * w.deriv()(z)
            + (dp.A * z * z + dp.B * z + dp.C - 0.25 + (dp.a * z + dp.b + 0.25) / zz) * w(z))


# --- sl(2,R) ---------------------------------------------------------------

@dataclass(frozen=True)
class DiffOp:
    """Linear differential operator ``sum_k coeffs[k](z) d^k/dz^k``."""

    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1].is_zero():
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> RealPolynomial:
        return self.coeffs[k] if k < len(self.coeffs) else RealPolynomial()

    def __add__(self, other: "DiffOp") -> "DiffOp":
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    def __mul__(self, other):
        """Composition for operators, scaling for scalars."""
        if not isinstance(other, DiffOp):
            return DiffOp(tuple(c * other for c in self.coeffs))
        out = [RealPolynomial()] * (len(self.coeffs) + len(other.coeffs))
        # a D^i . b D^j = a sum_l C(i,l) b^{(l)} D^{i-l+j}
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                for l in range(i + 1):
                    k = i - l + j
                    out[k] = out[k] + a * b.deriv(l) * math.comb(i, l)
        return DiffOp(tuple(out))

    __rmul__ = __mul__

    def apply(self, u: RealPolynomial) -> RealPolynomial:
        acc = RealPolynomial()
        for k, c in enumerate(self.coeffs):
            acc = acc + c * u.deriv(k)
        return acc


def sl2_generators(n: int):
    """``(J+, J0, J-)`` acting on polynomials of degree at most ``n``."""
    P = RealPolynomial
    jm = DiffOp((P(), P((1,))))
    j0 = DiffOp((P((Fraction(-n, 2),)), P((0, 1))))
    jp = DiffOp((P((0, -n)), P((0, 0, 1))))
    return jp, j0, jm


@dataclass(frozen=True)
class Sl2Decomposition:
    """Coefficients of the quadratic sl(2) combination for the QES CHEq operator.

    ``c_00 J0 J0 + c_mm J- J- + c_pm (J+ J- + J- J+) + c_p J+ + c_0 J0 + c_m J-``
    """

    n: int
    c_00: float
    c_mm: float
    c_pm: float
    c_p: float
    c_0: float
    c_m: float


def sl2_decompose(cert: QesCertificate) -> Sl2Decomposition:
    if not isinstance(cert, QesCertificate):
        raise NotQes("sl2_decompose needs a QesCertificate")
    n, g, d, e = cert.n, cert.gamma, cert.delta, cert.epsilon
    if all(is_exact(x) for x in (g, d, e)):
        g, d, e = Fraction(g), Fraction(d), Fraction(e)
        two = Fraction(2)
    else:
        two = 2.0
    return Sl2Decomposition(
        n=n,
        c_00=two * (n + g + d - e) / (n + 2),
        c_mm=-1,
        c_pm=(2 - n - 2 * (g + d - e)) / (2 * (n + 2)),
        c_p=e / 2,
        c_0=g + d + n - 1,
        c_m=d - g - e / 2,
    )


def sl2_expand(d: Sl2Decomposition):
    """Expand the quadratic combination into ``P2 D^2 + P1 D + P0``.

    Returns the three coefficient polynomials ``(P2, P1, P0)``.
    """
    jp, j0, jm = sl2_generators(d.n)
    op = (j0 * j0) * d.c_00 + (jm * jm) * d.c_mm + (jp * jm + jm * jp) * d.c_pm \
        + jp * d.c_p + j0 * d.c_0 + jm * d.c_m
    if op.order > 2:
        raise AssertionError("quadratic sl(2) combination produced order > 2")
    return op.coeff(2), op.coeff(1), op.coeff(0)


def cheq_operator(cert: QesCertificate):
    """``(P2, P1, P0)`` of the QES CHEq operator ``D`` (without ``-q``)."""
    g, d, e, n = cert.gamma, cert.delta, cert.epsilon, cert.n
    P = RealPolynomial
    P2 = P((-1, 0, 1))
    P1 = P((-e / 2 - g + d, g + d, e / 2))
    P0 = P((-n * e / 2, -n * e / 2))
    return P2, P1, P0


# --- Schroedinger form -----------------------------------------------------

@dataclass(frozen=True)
class SchroedingerForm:
    """Gauge-transformed CHEq on ``z = cosh x``, ``x > 0``.

    ``psi(x) = mu(cosh x) u(cosh x)`` is a zero mode of
    ``-d^2/dx^2 + potential(x)``. The potential includes the constant
    ``-C + 1/4``, exposed separately as :attr:`constant`.
    """

    mu: GaugeFactor
    params: DerivedParams
    x_of_z: str = "x = arccosh(z), z > 1"

    @property
    def constant(self) -> float:
        return -float(self.params.C) + 0.25

    def potential(self, x):
        """``-A cosh^2 x - B cosh x - a coth x csch x - (b+1/4) csch^2 x - C + 1/4``."""
        A, B, C, a, b = (float(v) for v in (self.params.A, self.params.B, self.params.C,
                                            self.params.a, self.params.b))
        x = np.asarray(x, dtype=float)
        ch, sh = np.cosh(x), np.sinh(x)
        return -A * ch**2 - B * ch - a * ch / sh**2 - (b + 0.25) / sh**2 - C + 0.25

    def potential_without_constant(self, x):
        return self.potential(x) - self.constant

    def psi(self, u: Callable) -> Callable:
        """Wave function ``x -> mu(cosh x) u(cosh x)`` for a solution ``u(z)``."""

        def _psi(x):
            z = np.cosh(np.asarray(x, dtype=float))
            return self.mu(z) * u(z)

        return _psi


def schroedinger_form(cert: QesCertificate, q) -> SchroedingerForm:
    """Schroedinger form of the QES CHEq on the ``|z| > 1`` branch.

    Uses ``mu(z) = (z-1)^{(2 delta-1)/4} (z+1)^{(2 gamma-1)/4} e^{eps z/4}``
    and the parameters ``A, B, C, a, b`` with ``alpha = -n eps``.
    """
    p = cert.params.with_q(q)
    dp = derived_params(p)
    mu = GaugeFactor((2 * p.gamma - 1) / 4, (2 * p.delta - 1) / 4, p.epsilon / 4)
    return SchroedingerForm(mu, dp)
