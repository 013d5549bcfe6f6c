"""Quasi-exactly solvable sector of the confluent Heun equation.

The equation is taken in its symmetric form with regular singular points
at z = -1 and z = +1::

    (z^2-1) u'' + (eps/2 (z^2-1) + gamma (z-1) + delta (z+1)) u'
        + (alpha/2 (z+1) - q) u = 0

When ``alpha = -n * eps`` for a non-negative integer ``n`` the equation has
``n + 1`` polynomial solutions of degree ``n``. They are built from the
Frobenius series at ``z = -1`` whose coefficients are the critical
polynomials ``P_k(q)``; the admissible ``q`` are the roots of ``P_{n+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NotARoot, NotQes, RootCountMismatch
from .polynomial import RealPolynomial, coerce, coerce_all, is_exact
from .sturm import count_roots, isolate_real_roots, refine_root, sturm_chain

__all__ = [
    "CheqParams",
    "QesCertificate",
    "CriticalPolynomialFamily",
    "SpectralRoots",
    "PolynomialSolution",
    "qes_degree",
    "certify",
    "pochhammer",
    "build_family",
    "spectral_roots",
    "companion_spectral_roots",
    "build_solution",
    "build_all_solutions",
    "cheq_residual",
    "solution_residual",
    "monomial_solution",
    "count_zeros",
    "ROOT_RESIDUAL_TOL",
    "SOLUTION_RESIDUAL_TOL",
]

ROOT_RESIDUAL_TOL = 1e-12
SOLUTION_RESIDUAL_TOL = 1e-10


def _finite(x) -> bool:
    return is_exact(x) or math.isfinite(float(x))


@dataclass(frozen=True)
class CheqParams:
    """The five real parameters of the symmetric confluent Heun equation.

    ``q`` may be left as ``None`` when it is treated as the free spectral
    parameter.
    """

    alpha: float
    gamma: float
    delta: float
    epsilon: float
    q: Optional[float] = None

    def __post_init__(self):
        vals = [self.alpha, self.gamma, self.delta, self.epsilon]
        if self.q is not None:
            vals.append(self.q)
        if not all(_finite(v) for v in vals):
            raise ValueError(f"non-finite CHEq parameter in {self}")

    @property
    def M(self):
        return self.delta + self.gamma - self.epsilon

    def with_q(self, q) -> "CheqParams":
        return CheqParams(self.alpha, self.gamma, self.delta, self.epsilon, q)


def qes_degree(params: CheqParams, tol: float = 1e-12) -> Optional[int]:
    """Return ``n`` when ``alpha = -n * epsilon`` for a non-negative integer ``n``.

    ``epsilon == 0`` is degenerate: every ``n`` satisfies the relation when
    ``alpha == 0`` and we report ``n = 0``; otherwise no ``n`` exists.
    The tolerance is relative to ``max(1, n)``; exact inputs are compared
    exactly.
    """
    alpha, eps = params.alpha, params.epsilon
    if eps == 0:
        return 0 if alpha == 0 else None
    if is_exact(alpha) and is_exact(eps):
        ratio = -Fraction(alpha) / Fraction(eps)
        if ratio.denominator == 1 and ratio >= 0:
            return int(ratio)
        return None
    ratio = -float(alpha) / float(eps)
    k = round(ratio)
    if k < 0 or abs(ratio - k) > tol * max(1.0, abs(k)):
        return None
    return int(k)


@dataclass(frozen=True)
class QesCertificate:
    """Parameters known to satisfy ``alpha = -n * epsilon``."""

    n: int
    params: CheqParams
    tol: float = 1e-12

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise NotQes(f"invariant-module degree must be a non-negative integer, got {self.n}")
        a, e = self.params.alpha, self.params.epsilon
        if is_exact(a) and is_exact(e):
            ok = a == -self.n * e
        else:
            ok = abs(float(a) + self.n * float(e)) <= self.tol * max(1.0, abs(float(a)), abs(self.n * float(e)))
        if not ok:
            raise NotQes(f"alpha={a} != -{self.n}*epsilon (epsilon={e})")

    @classmethod
    def from_family(cls, gamma, delta, epsilon, n: int) -> "QesCertificate":
        return cls(n, CheqParams(-n * epsilon, gamma, delta, epsilon))

    @property
    def gamma(self):
        return self.params.gamma

    @property
    def delta(self):
        return self.params.delta

    @property
    def epsilon(self):
        return self.params.epsilon


def certify(params: CheqParams, tol: float = 1e-12) -> QesCertificate:
    n = qes_degree(params, tol)
    if n is None:
        raise NotQes(f"alpha/epsilon is not a non-positive integer for {params}")
    return QesCertificate(n, params, tol=max(tol, 1e-12))


def pochhammer(x, k: int):
    """Rising factorial ``x (x+1) ... (x+k-1)``; equals 1 for ``k = 0``."""
    out = 1
    for i in range(k):
        out = out * (x + i)
    return out


@dataclass(frozen=True)
class CriticalPolynomialFamily:
    """Monic polynomials ``P_0 .. P_{n+2}`` in the accessory parameter ``q``."""

    n: int
    gamma: float
    delta: float
    epsilon: float
    polys: tuple

    @property
    def M(self):
        return self.delta + self.gamma - self.epsilon

    @property
    def exact(self) -> bool:
        return all(p.exact for p in self.polys)

    @property
    def critical(self) -> RealPolynomial:
        """``P_{n+1}``, whose roots are the algebraic eigenvalues."""
        return self.polys[self.n + 1]

    @cached_property
    def rational_polys(self) -> tuple:
        """The same family recomputed exactly from the binary values of the parameters.

        Identical to ``polys`` in exact mode. In float mode the stored
        coefficients carry rounding from the recurrence, which shifts the
        roots of high members; root finding and evaluation use this exact
        image instead.
        """
        if self.exact:
            return self.polys
        g, d, e = (Fraction(float(x)) for x in (self.gamma, self.delta, self.epsilon))
        return build_family(g, d, e, self.n, upto=len(self.polys) - 1).polys

    def evaluate(self, k: int, q):
        """``P_k(q)`` evaluated exactly at ``q`` and returned in the family's mode."""
        val = self.rational_polys[k](Fraction(q))
        return val if self.exact and is_exact(q) else float(val)

    def certificate(self) -> QesCertificate:
        return QesCertificate.from_family(self.gamma, self.delta, self.epsilon, self.n)

    def recurrence_coefficients(self, k: int):
        """``(b_k, c_k)`` with ``P_{k+1} = (q - b_k) P_k - c_k P_{k-1}``."""
        g, e, n, M = self.gamma, self.epsilon, self.n, self.M
        return k * (M + k - 1), k * e * (n - k + 1) * (g + k - 1)


def build_family(gamma, delta, epsilon, n: int, upto: Optional[int] = None) -> CriticalPolynomialFamily:
    """Critical polynomials from the three-term recurrence.

    ``P_0 = 1``, ``P_1 = q`` and for ``k >= 1``::

        P_{k+1} = (q - k(M+k-1)) P_k - k eps (n-k+1)(gamma+k-1) P_{k-1}

    with ``M = delta + gamma - eps``. Arithmetic is exact when all three
    parameters are ``int``/``Fraction``. ``upto`` extends the family past
    ``P_{n+2}`` (the extra members just continue the recurrence).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    exact, (g, d, e) = coerce_all(gamma, delta, epsilon)
    one, zero = coerce(1, exact), coerce(0, exact)
    M = d + g - e
    q = RealPolynomial((zero, one))
    polys = [RealPolynomial((one,)), q]
    top = max(n + 2, upto or 0)
    for k in range(1, top):
        b = k * (M + k - 1)
        c = k * e * (n - k + 1) * (g + k - 1)
        polys.append((q - b) * polys[k] - polys[k - 1] * c)
    return CriticalPolynomialFamily(n, g, d, e, tuple(polys))


def _residual_scale(p: RealPolynomial, x: float) -> float:
    ax = abs(x)
    return sum(abs(float(c)) * ax**k for k, c in enumerate(p.coeffs))


def _exact_residual(p: RealPolynomial, x: float) -> float:
    return float(p.to_fraction()(Fraction(x)))


@dataclass(frozen=True)
class SpectralRoots:
    """Sorted real roots ``q_1 < ... < q_{n+1}`` of ``P_{n+1}``."""

    roots: tuple
    residuals: tuple = ()

    def __post_init__(self):
        r = self.roots
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("spectral roots must be strictly increasing")

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]


def spectral_roots(family: CriticalPolynomialFamily) -> SpectralRoots:
    """All ``n + 1`` real roots of ``P_{n+1}``.

    Isolation uses an exact Sturm sequence, then exact bisection down to
    float resolution and a bracketed Newton polish.
    """
    p = family.rational_polys[family.n + 1]
    need = family.n + 1
    intervals = isolate_real_roots(p)
    if len(intervals) != need:
        raise RootCountMismatch(
            f"P_{need} has {len(intervals)} distinct real roots, expected {need} "
            f"(gamma={family.gamma}, delta={family.delta}, epsilon={family.epsilon})"
        )
    roots = tuple(refine_root(p, a, b) for a, b in intervals)
    residuals = tuple(_exact_residual(p, r) for r in roots)
    for r, res in zip(roots, residuals):
        if abs(res) > ROOT_RESIDUAL_TOL * max(1.0, abs(r) ** need, _residual_scale(p, r)):
            raise RootCountMismatch(f"root {r} of P_{need} failed residual check ({res})")
    return SpectralRoots(roots, residuals)


def companion_spectral_roots(family: CriticalPolynomialFamily) -> np.ndarray:
    """Cross-check: eigenvalues of the Jacobi-like tridiagonal matrix.

    ``P_{n+1}`` is the characteristic polynomial of the (n+1)x(n+1) matrix
    with diagonal ``b_k`` and off-diagonal product ``c_k``.
    """
    n = family.n
    J = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        b, c = family.recurrence_coefficients(k)
        J[k, k] = float(b)
        if k >= 1:
            J[k, k - 1] = float(c)
            J[k - 1, k] = 1.0
    return np.sort(np.linalg.eigvals(J).real)


@dataclass(frozen=True)
class PolynomialSolution:
    """Degree-``n`` polynomial solution ``u_{n,j}`` for the root ``q_j``.

    ``coeffs`` holds the coefficients in powers of ``(z + 1)`` with constant
    term 1.
    """

    n: int
    j: int
    q_j: float
    coeffs: RealPolynomial
    gamma: float
    delta: float
    epsilon: float

    @property
    def alpha(self):
        return -self.n * self.epsilon

    @property
    def M(self):
        return self.delta + self.gamma - self.epsilon

    def certificate(self) -> QesCertificate:
        return QesCertificate.from_family(self.gamma, self.delta, self.epsilon, self.n)

    def in_z(self) -> RealPolynomial:
        """Coefficients in powers of ``z``."""
        return self.coeffs.shift(1)

    def monic(self) -> RealPolynomial:
        return self.in_z().monic()

    def __call__(self, z):
        return self.coeffs(z + 1)


def _pick_index(roots: SpectralRoots, q) -> int:
    d = [abs(float(q) - r) for r in roots]
    return int(np.argmin(d)) + 1


def build_solution(family: CriticalPolynomialFamily, q_j, j: Optional[int] = None,
                   rtol: float = SOLUTION_RESIDUAL_TOL) -> PolynomialSolution:
    """Truncated Frobenius series at ``z = -1`` for a root ``q_j`` of ``P_{n+1}``.

    The coefficient of ``(z+1)^k`` is ``(-1)^k P_k(q_j) / (2^k k! (gamma)_k)``.
    Raises :class:`NotARoot` when ``|P_{n+1}(q_j)|`` is not small relative to
    the term magnitudes.
    """
    p = family.rational_polys[family.n + 1]
    res = abs(family.evaluate(family.n + 1, q_j))
    if res > rtol * max(1.0, _residual_scale(p, float(q_j))):
        raise NotARoot(f"q={q_j} leaves |P_{family.n + 1}(q)| = {res}")
    g = family.gamma
    coeffs = []
    for k in range(family.n + 1):
        coeffs.append((-1) ** k * family.evaluate(k, q_j) / (2**k * math.factorial(k) * pochhammer(g, k)))
    if j is None:
        j = _pick_index(spectral_roots(family), q_j)
    return PolynomialSolution(family.n, j, q_j, RealPolynomial(coeffs),
                              family.gamma, family.delta, family.epsilon)


def build_all_solutions(family: CriticalPolynomialFamily) -> list:
    roots = spectral_roots(family)
    return [build_solution(family, q, j=i + 1) for i, q in enumerate(roots)]


def cheq_residual(cert: QesCertificate, q, u: RealPolynomial, z):
    """Left-hand side of the QES equation applied to ``u`` (powers of z) at ``z``."""
    g, d, e, n = cert.gamma, cert.delta, cert.epsilon, cert.n
    du, d2u = u.deriv(), u.deriv(2)
    zz = z * z - 1
    return (zz * d2u(z)
            + (e / 2 * zz + g * (z - 1) + d * (z + 1)) * du(z)
            + (-n * e / 2 * (z + 1) - q) * u(z))


def solution_residual(sol: PolynomialSolution, z) -> float:
    """Residual of ``sol`` at ``z`` relative to the magnitude of its terms."""
    u = sol.in_z()
    cert = sol.certificate()
    r = cheq_residual(cert, sol.q_j, u, z)
    ua = RealPolynomial([abs(float(c)) for c in u.coeffs])
    az = abs(z)
    g, d, e, n = (abs(float(x)) for x in (sol.gamma, sol.delta, sol.epsilon, sol.n))
    scale = ((az * az + 1) * ua.deriv(2)(az)
             + (e / 2 * (az * az + 1) + (g + d) * (az + 1)) * ua.deriv()(az)
             + (n * e / 2 * (az + 1) + abs(float(sol.q_j))) * ua(az))
    return abs(float(r)) / max(scale, 1e-300)


def monomial_solution(cert: QesCertificate, q) -> RealPolynomial:
    """Degree-``n`` solution from the null space of the operator in the monomial basis.

    Independent of the Frobenius construction; normalized to be monic.
    """
    n = cert.n
    g, d, e = (float(x) for x in (cert.gamma, cert.delta, cert.epsilon))
    q = float(q)
    # L z^k = k(k-1) z^{k-2}(z^2-1) + k z^{k-1}(e/2 (z^2-1) + (g+d) z + (d-g))
    #         + (-n e/2 (z+1) - q) z^k
    A = np.zeros((n + 2, n + 1))
    for k in range(n + 1):
        A[k, k] += k * (k - 1) + k * (g + d) - q
        if k >= 2:
            A[k - 2, k] += -k * (k - 1)
        if k >= 1:
            A[k - 1, k] += k * (d - g) - k * e / 2
        A[k + 1, k] += k * e / 2 - n * e / 2
        A[k, k] += -n * e / 2
    _, s, vh = np.linalg.svd(A)
    v = vh[-1]
    return RealPolynomial(list(v / v[-1]))


def count_zeros(sol, interval) -> int:
    """Exact number of distinct real zeros inside the open ``interval``.

    ``sol`` is a :class:`PolynomialSolution` or a polynomial in ``z``.
    Endpoints may be infinite.
    """
    u = sol.in_z() if isinstance(sol, PolynomialSolution) else sol
    u = u.to_fraction()
    a, b = interval
    chain = sturm_chain(u)
    n = count_roots(chain, a, b)
    if b not in (math.inf, -math.inf) and u(Fraction(b)) == 0:
        n -= 1
    return n
