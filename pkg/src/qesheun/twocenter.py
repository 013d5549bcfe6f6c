"""Elementary (Demkov) eigenfunctions of two fixed Coulomb centers.

In prolate spheroidal (3D) or elliptic (2D) coordinates
``xi = (r1 + r2)/R`` and ``eta = (r2 - r1)/R`` the Schroedinger equation
separates into a "radial" equation on ``(1, inf)`` and an "angular" one on
``(-1, 1)``. With a hydrogen-like energy both become QES confluent Heun
equations whose accessory parameter is affine in the separation constant
``lambda``. Demanding a common ``lambda`` for a radial and an angular
polynomial solution leaves two polynomial equations in ``(lambda, R)``,
which fix the special intercenter distances.

Nucleus ``Z1`` sits at ``x1 = +R/2`` and ``Z2`` at ``x1 = -R/2``; ``r1``,
``r2`` are the distances to them.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import ortho
from .cheq_core import (CheqParams, PolynomialSolution, build_family, build_solution,
                        spectral_roots)
from .errors import (AmbiguousRoot, EliminationDegenerate, InvalidCase, NoMatchingRoot,
                     NotNormalizable)
from .polynomial import BivariatePolynomial, RealPolynomial, coerce_all, is_exact
from .reductions import RWH_CASES
from .sturm import isolate_real_roots, refine_root, square_free

__all__ = [
    "CenterConfig",
    "QuantumNumbers",
    "BranchKind",
    "BranchSpec",
    "DemkovSolution",
    "Wavefunction",
    "CartesianGrid",
    "DensityGrid",
    "diophantine_enumerate",
    "branch_cheq_params",
    "hydrogenoid_energy",
    "compatibility_polynomials",
    "resultant_in_R",
    "joint_solve",
    "select_root_pairing",
    "assemble_wavefunction",
    "norm_squared",
    "density_grid",
    "demkov_search",
    "hamiltonian_residual",
    "SearchDiagnostics",
]


@dataclass(frozen=True)
class CenterConfig:
    Z1: float
    Z2: float
    dim: int = 3

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not (self.Z1 > 0 and self.Z2 > 0):
            raise ValueError("nuclear charges must be positive")

    @property
    def exact(self) -> bool:
        return is_exact(self.Z1) and is_exact(self.Z2)

    def swapped(self) -> "CenterConfig":
        return CenterConfig(self.Z2, self.Z1, self.dim)


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    n1: int
    n2: int
    m: Optional[int] = None


class BranchKind(enum.Enum):
    Radial3D = "radial3d"
    Angular3D = "angular3d"
    Radial2D = "radial2d"
    Angular2D = "angular2d"

    @property
    def radial(self) -> bool:
        return self in (BranchKind.Radial3D, BranchKind.Radial2D)

    @property
    def dim(self) -> int:
        return 3 if self in (BranchKind.Radial3D, BranchKind.Angular3D) else 2


@dataclass(frozen=True)
class BranchSpec:
    """One separated equation written as a QES confluent Heun equation.

    ``cheq_params(lam, R)`` is affine in ``lam`` and polynomial in ``R``:
    ``eps`` is proportional to ``R`` and ``q`` is quadratic in ``R`` (2D) or
    linear (3D).
    """

    kind: BranchKind
    qn: QuantumNumbers
    config: CenterConfig
    case2d: Optional[str] = None

    def __post_init__(self):
        if self.kind.dim != self.config.dim:
            raise InvalidCase(f"{self.kind} does not match a {self.config.dim}D configuration")
        if self.kind.dim == 3:
            if self.case2d is not None:
                raise InvalidCase("3D branches take no 2D case")
            if self.qn.m is None:
                raise InvalidCase("3D branches need a magnetic quantum number")
        elif self.case2d not in RWH_CASES:
            raise InvalidCase(f"2D branches need a case in {sorted(RWH_CASES)}")
        if self.n < 0:
            raise InvalidCase(f"negative QES degree for {self}")

    # exact scalars -----------------------------------------------------------
    def _num(self, x):
        return Fraction(x) if self.config.exact else float(x)

    @property
    def principal(self) -> int:
        """Hydrogen-like principal number: ``n1`` (radial) or ``n2`` (angular)."""
        return self.qn.n1 if self.kind.radial else self.qn.n2

    @property
    def charge(self):
        """Signed effective charge: ``Z1 + Z2`` (radial) or ``Z2 - Z1`` (angular)."""
        Z1, Z2 = self._num(self.config.Z1), self._num(self.config.Z2)
        return Z1 + Z2 if self.kind.radial else Z2 - Z1

    @property
    def gamma(self):
        if self.kind.dim == 3:
            return Fraction(abs(self.qn.m) + 1)
        return RWH_CASES[self.case2d][0]

    @property
    def delta(self):
        if self.kind.dim == 3:
            return Fraction(abs(self.qn.m) + 1)
        return RWH_CASES[self.case2d][1]

    @property
    def n(self) -> int:
        """Degree of the polynomial factor."""
        N = self.principal
        if self.kind.dim == 3:
            return N - abs(self.qn.m) - 1
        twice = N - (self.gamma + self.delta)
        if twice.denominator != 1 or twice % 2:
            raise InvalidCase(f"principal number {N} is incompatible with case {self.case2d}")
        return int(twice) // 2

    @property
    def eps_per_R(self):
        """``eps / R``: ``-2 S / N`` in 3D, ``-4 S / N`` in 2D."""
        k = 2 if self.kind.dim == 3 else 4
        return -k * self.charge / self.principal

    def q_map(self) -> BivariatePolynomial:
        """``q`` as a polynomial in ``(lambda, R)``."""
        g, d, n = self.gamma, self.delta, self.n
        e1 = self.eps_per_R
        one = self._num(1)
        if self.kind.dim == 3:
            m = abs(self.qn.m)
            return BivariatePolynomial({(0, 0): one * (-m * (m + 1)), (1, 0): -one,
                                        (0, 1): self.charge * n / self.principal})
        c0 = -(g + d) * (g + d - 2) / 4 - Fraction(1, 4)
        return BivariatePolynomial({(0, 0): one * c0, (1, 0): -one,
                                    (0, 1): e1 * (g - d) / 4 - n * e1 / 2,
                                    (0, 2): e1 * e1 / 16})

    def cheq_params(self, lam, R) -> CheqParams:
        eps = self.eps_per_R * R
        q = self.q_map()(lam, R)
        return CheqParams(-self.n * eps, self.gamma, self.delta, eps, q)

    def energy(self):
        S, N = self.charge, self.principal
        if self.kind.dim == 3:
            return -S * S / (2 * N * N)
        return -2 * S * S / (N * N)

    def prefactor_exponents(self):
        """``(p, m, rate)``: prefactor ``(z+1)^p |z-1|^m e^{rate R z}``."""
        g, d = self.gamma, self.delta
        if self.kind.dim == 3:
            h = (g - 1) / 2
            return h, h, self.eps_per_R / 4
        return (2 * g - 1) / 4, (2 * d - 1) / 4, self.eps_per_R / 4


def diophantine_enumerate(config: CenterConfig, n_max: int) -> list:
    """Quantum numbers with ``(Z1+Z2)^2 / n1^2 = (Z1-Z2)^2 / n2^2``.

    Exact when the charges are rational. 3D pairs are expanded over
    ``0 <= m <= min(n1, n2) - 1`` (the sign of ``m`` does not change the
    separated equations). ``Z1 == Z2`` has no solutions.
    """
    exact, (Z1, Z2) = coerce_all(config.Z1, config.Z2)
    if Z1 == Z2:
        return []
    s, d = (Z1 + Z2) ** 2, (Z1 - Z2) ** 2
    out = []
    for n1 in range(1, n_max + 1):
        for n2 in range(1, n_max + 1):
            lhs, rhs = s * n2 * n2, d * n1 * n1
            ok = lhs == rhs if exact else math.isclose(lhs, rhs, rel_tol=1e-12)
            if not ok:
                continue
            if config.dim == 3:
                out.extend(QuantumNumbers(n1, n2, m) for m in range(min(n1, n2)))
            else:
                out.append(QuantumNumbers(n1, n2))
    return out


def branch_cheq_params(branch: BranchSpec, lam, R) -> CheqParams:
    return branch.cheq_params(lam, R)


def hydrogenoid_energy(branch: BranchSpec):
    return branch.energy()


def compatibility_polynomials(branch_r: BranchSpec, branch_a: BranchSpec):
    """``P_{n+1}(q(lambda, R))`` for the radial and the angular branch."""
    if branch_r.config != branch_a.config:
        raise InvalidCase("branches belong to different configurations")
    return _critical_bivariate(branch_r), _critical_bivariate(branch_a)


def _critical_bivariate(b: BranchSpec) -> BivariatePolynomial:
    n, g, d = b.n, b.gamma, b.delta
    if not b.config.exact:
        g, d = float(g), float(d)
    eps = BivariatePolynomial.var(1, b.eps_per_R)
    M = eps * -1 + (g + d)
    q = b.q_map()
    prev, cur = BivariatePolynomial.constant(b._num(1)), q
    for k in range(1, n + 1):
        nxt = (q - (M + (k - 1)) * k) * cur - prev * eps * (k * (n - k + 1) * (g + k - 1))
        prev, cur = cur, nxt
    return cur


# --- elimination ---------------------------------------------------------------

def _bareiss_det(rows) -> Fraction:
    """Exact determinant (fraction-free elimination on Fractions)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign, prev = 1, Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _sylvester(f: list, g: list):
    """Sylvester matrix of two coefficient lists given in descending order."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + f + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g + [0] * (size - n - 1 - i))
    return rows


def resultant_in_R(F: BivariatePolynomial, G: BivariatePolynomial) -> RealPolynomial:
    """``Res_lambda(F, G)`` as a polynomial in ``R``.

    The Sylvester determinant is evaluated at integer sample points and the
    polynomial is recovered by Newton interpolation. Everything is exact for
    rational inputs; float inputs fall back to a least-squares fit on
    Chebyshev nodes.
    """
    dF, dG = F.degree(0), G.degree(0)
    if dF < 0 or dG < 0:
        raise EliminationDegenerate("zero polynomial in elimination")
    bound = dG * max(F.degree(1), 0) + dF * max(G.degree(1), 0)
    exact = F.exact and G.exact
    cF, cG = F.coefficients_in(0), G.coefficients_in(0)

    def res_at(r):
        f = [c(r) for c in reversed(cF)]
        g = [c(r) for c in reversed(cG)]
        if exact:
            return _bareiss_det(_sylvester(f, g))
        return float(np.linalg.det(np.array(_sylvester(f, g), dtype=float)))

    if exact:
        xs = [Fraction(i) for i in range(bound + 1)]
        ys = [res_at(x) for x in xs]
        # Newton divided differences
        coef = list(ys)
        for j in range(1, len(xs)):
            for i in range(len(xs) - 1, j - 1, -1):
                coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
        poly = RealPolynomial((coef[-1],))
        for i in range(len(xs) - 2, -1, -1):
            poly = poly * RealPolynomial((-xs[i], Fraction(1))) + coef[i]
        return poly
    xs = np.cos(np.pi * (np.arange(2 * bound + 2) + 0.5) / (2 * bound + 2)) * 4
    ys = np.array([res_at(x) for x in xs])
    return RealPolynomial(list(np.polynomial.polynomial.polyfit(xs, ys, bound)))


def _scaled_residual(F: BivariatePolynomial, lam: float, R: float) -> float:
    val = abs(float(F(lam, R)))
    lam, R = max(1.0, abs(lam)), max(1.0, abs(R))
    scale = sum(abs(float(c)) * lam**i * R**j for (i, j), c in F.terms.items())
    return val / max(scale, 1e-300)


def _real_roots_float(p: RealPolynomial) -> list:
    """Real roots of a low-degree univariate polynomial with float coefficients."""
    p = p.to_float()
    if p.degree < 1:
        return []
    if p.degree == 1:
        return [-p[0] / p[1]]
    r = p.companion_roots()
    scale = max(1.0, float(np.max(np.abs(r))))
    return [float(x.real) for x in r if abs(x.imag) <= 1e-7 * scale]


def _newton2(F, G, lam, R, steps: int = 20):
    Fl, FR, Gl, GR = F.partial(0).to_float(), F.partial(1).to_float(), G.partial(0).to_float(), G.partial(1).to_float()
    Ff, Gf = F.to_float(), G.to_float()
    for _ in range(steps):
        J = np.array([[Fl(lam, R), FR(lam, R)], [Gl(lam, R), GR(lam, R)]], dtype=float)
        if abs(np.linalg.det(J)) < 1e-12 * max(1.0, np.max(np.abs(J))) ** 2:
            break
        step = np.linalg.solve(J, -np.array([Ff(lam, R), Gf(lam, R)], dtype=float))
        lam, R = lam + step[0], R + step[1]
        if np.max(np.abs(step)) <= 1e-16 * max(1.0, abs(lam), abs(R)):
            break
    return float(lam), float(R)


def joint_solve(F_r: BivariatePolynomial, F_a: BivariatePolynomial,
                tol: float = 1e-10, dedupe: float = 1e-9) -> list:
    """All real common zeros ``(lambda, R)`` of two polynomials.

    ``R`` is eliminated first through the resultant in ``lambda``; its real
    roots are isolated with exact Sturm sequences. Candidate ``lambda`` are
    the real roots of either polynomial at that ``R``; pairs with both
    scaled residuals below ``tol`` are kept after a 2D Newton polish.
    """
    if F_r.is_zero() or F_a.is_zero():
        raise EliminationDegenerate("one of the compatibility polynomials is identically zero")
    res = resultant_in_R(F_r, F_a)
    if res.is_zero() or all(abs(float(c)) == 0 for c in res.coeffs):
        raise EliminationDegenerate("resultant vanishes identically: shared component")
    if res.exact:
        sf = square_free(res)
        R_roots = [refine_root(sf, a, b) for a, b in isolate_real_roots(sf)]
    else:
        R_roots = sorted(_real_roots_float(res))
    Ff, Gf = F_r.to_float(), F_a.to_float()
    found: list = []
    for R in R_roots:
        cands = []
        for P in (F_a, F_r):
            uni = P.specialize(1, R).to_float()
            if uni.degree >= 1:
                cands.extend(_real_roots_float(uni))
        for lam in cands:
            lam, Rr = _newton2(F_r, F_a, lam, R)
            if abs(Rr - R) > 1e-6 * max(1.0, abs(R)):
                lam, Rr = lam, R
            if _scaled_residual(Ff, lam, Rr) < tol and _scaled_residual(Gf, lam, Rr) < tol:
                if not any(abs(lam - l2) <= dedupe * max(1, abs(l2)) and
                           abs(Rr - r2) <= dedupe * max(1, abs(r2)) for l2, r2 in found):
                    found.append((lam, Rr))
    return sorted(found, key=lambda t: (t[1], t[0]))


# --- root pairing and assembly ---------------------------------------------------

def _branch_family(branch: BranchSpec, R: float):
    return build_family(branch.gamma, branch.delta, float(branch.eps_per_R) * R, branch.n)


def select_root_pairing(branch_r: BranchSpec, branch_a: BranchSpec, lam: float, R: float,
                        tol: float = 1e-8):
    """1-based indices (ascending order) of the spectral roots matching ``lambda``."""
    return _match_root(branch_r, lam, R, tol), _match_root(branch_a, lam, R, tol)


def _match_root(branch: BranchSpec, lam: float, R: float, tol: float) -> int:
    target = float(branch.q_map().to_float()(lam, R))
    roots = spectral_roots(_branch_family(branch, R))
    hits = [j + 1 for j, q in enumerate(roots) if abs(q - target) <= tol * max(1.0, abs(target))]
    if not hits:
        raise NoMatchingRoot(f"no root of {branch.kind.name} matches q={target}")
    if len(hits) > 1:
        raise AmbiguousRoot(f"roots {hits} of {branch.kind.name} all match q={target}")
    return hits[0]


@dataclass(frozen=True)
class DemkovSolution:
    config: CenterConfig
    qn: QuantumNumbers
    E: float
    lam: float
    R: float
    radial: PolynomialSolution
    angular: PolynomialSolution
    branch_r: BranchSpec
    branch_a: BranchSpec
    case_r: Optional[str] = None
    case_a: Optional[str] = None
    reflected: bool = False

    @property
    def q_r(self) -> float:
        return self.radial.q_j

    @property
    def q_a(self) -> float:
        return self.angular.q_j

    @property
    def sort_key(self):
        return (self.qn.n1, self.qn.n2, self.qn.m or 0, self.R)

    def as_dict(self) -> dict:
        return {
            "Z1": _jsonnum(self.config.Z1), "Z2": _jsonnum(self.config.Z2), "dim": self.config.dim,
            "n1": self.qn.n1, "n2": self.qn.n2, "m": self.qn.m,
            "case_radial": self.case_r, "case_angular": self.case_a,
            "n_radial": self.radial.n, "n_angular": self.angular.n,
            "E": float(self.E), "lambda": self.lam, "R": self.R,
            "root_index_radial": self.radial.j, "root_index_angular": self.angular.j,
            "q_radial": self.q_r, "q_angular": self.q_a,
            "radial_poly_monic": [float(c) for c in self.radial.monic()],
            "angular_poly_monic": [float(c) for c in self.angular.monic()],
            "reflected": self.reflected,
        }


def _jsonnum(x):
    return float(x) if not is_exact(x) or Fraction(x).denominator != 1 else int(x)


class Wavefunction:
    """Separated Demkov wave function in spheroidal and Cartesian coordinates.

    Polynomial factors are taken monic, matching the usual display.
    """

    def __init__(self, sol: DemkovSolution):
        self.sol = sol
        self.R = float(sol.R)
        self.dim = sol.config.dim
        self.m = sol.qn.m or 0
        self.u_r = sol.radial.monic().to_float()
        self.u_a = sol.angular.monic().to_float()
        pr, mr, kr = sol.branch_r.prefactor_exponents()
        pa, ma, ka = sol.branch_a.prefactor_exponents()
        self._r = (float(pr), float(mr), float(kr) * self.R)
        self._a = (float(pa), float(ma), float(ka) * self.R)

    def radial(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 1):
            raise ValueError("xi must be >= 1")
        p, m, k = self._r
        return (xi + 1) ** p * (xi - 1) ** m * np.exp(k * xi) * self.u_r(xi)

    def angular(self, eta):
        eta = np.asarray(eta, dtype=float)
        if np.any(np.abs(eta) > 1):
            raise ValueError("|eta| must be <= 1")
        p, m, k = self._a
        return (1 + eta) ** p * (1 - eta) ** m * np.exp(k * eta) * self.u_a(eta)

    def __call__(self, xi, eta, phi=0.0):
        if self.sol.reflected:
            eta = -np.asarray(eta, dtype=float)
        val = self.radial(xi) * self.angular(eta)
        if self.dim == 3 and self.m:
            return val * np.exp(1j * self.m * np.asarray(phi))
        return val

    def spheroidal(self, points):
        """``(xi, eta, phi)`` of Cartesian points (last axis = coordinates)."""
        x = np.asarray(points, dtype=float)
        h = self.R / 2
        shift = np.zeros(x.shape[-1])
        shift[0] = h
        r1 = np.linalg.norm(x - shift, axis=-1)
        r2 = np.linalg.norm(x + shift, axis=-1)
        xi = np.maximum((r1 + r2) / self.R, 1.0)
        eta = np.clip((r2 - r1) / self.R, -1.0, 1.0)
        phi = np.arctan2(x[..., 2], x[..., 1]) if x.shape[-1] == 3 else np.zeros_like(xi)
        return xi, eta, phi

    def cartesian(self, points):
        return self(*self.spheroidal(points))


def assemble_wavefunction(sol: DemkovSolution) -> Wavefunction:
    return Wavefunction(sol)


def _build_demkov(branch_r: BranchSpec, branch_a: BranchSpec, lam: float, R: float,
                  config: CenterConfig, reflected: bool) -> DemkovSolution:
    jr, ja = select_root_pairing(branch_r, branch_a, lam, R)
    fr, fa = _branch_family(branch_r, R), _branch_family(branch_a, R)
    sr = build_solution(fr, spectral_roots(fr)[jr - 1], j=jr)
    sa = build_solution(fa, spectral_roots(fa)[ja - 1], j=ja)
    return DemkovSolution(
        config=config, qn=branch_r.qn, E=branch_r.energy(), lam=lam, R=R,
        radial=sr, angular=sa, branch_r=branch_r, branch_a=branch_a,
        case_r=branch_r.case2d, case_a=branch_a.case2d, reflected=reflected,
    )


def _branch_pairs(config: CenterConfig, qn: QuantumNumbers):
    if config.dim == 3:
        yield (BranchSpec(BranchKind.Radial3D, qn, config),
               BranchSpec(BranchKind.Angular3D, qn, config))
        return
    for cr in sorted(RWH_CASES):
        for ca in sorted(RWH_CASES):
            try:
                yield (BranchSpec(BranchKind.Radial2D, qn, config, cr),
                       BranchSpec(BranchKind.Angular2D, qn, config, ca))
            except InvalidCase:
                continue


@dataclass
class SearchDiagnostics:
    """Non-physical or failed candidates collected during a search."""

    messages: list = field(default_factory=list)
    unphysical: list = field(default_factory=list)


def _solve_candidate(br: BranchSpec, ba: BranchSpec, config: CenterConfig, reflected: bool):
    """Physical solutions, unphysical pairs and messages for one branch pair."""
    qn = br.qn
    tag = f"{qn} cases=({br.case2d},{ba.case2d})"
    found, unphysical, messages = [], [], []
    try:
        Fr, Fa = compatibility_polynomials(br, ba)
        sols = joint_solve(Fr, Fa)
    except EliminationDegenerate as exc:
        return found, unphysical, [f"{tag}: {exc}"]
    for lam, R in sols:
        if R <= 1e-12:
            unphysical.append((qn, br.case2d, ba.case2d, lam, R))
            continue
        try:
            found.append(_build_demkov(br, ba, lam, R, config, reflected))
        except (NoMatchingRoot, AmbiguousRoot) as exc:
            messages.append(f"{tag}: {exc}")
    return found, unphysical, messages


def demkov_search(config: CenterConfig, n_max: int, pairs=None,
                  diagnostics: Optional[SearchDiagnostics] = None, workers: int = 1) -> list:
    """All Demkov solutions with principal numbers up to ``n_max``.

    ``pairs`` optionally restricts the search to given ``(n1, n2)``.
    Candidates with ``R <= 0`` are recorded in ``diagnostics.unphysical``.
    With ``workers > 1`` the branch pairs are solved on a thread pool; the
    output order does not depend on the number of workers.
    """
    diagnostics = diagnostics if diagnostics is not None else SearchDiagnostics()
    if config.Z1 == config.Z2:
        diagnostics.messages.append("Z1=Z2 degenerate: the angular equation admits no Demkov factor")
        return []
    reflected = config.Z1 < config.Z2
    work = config.swapped() if reflected else config
    wanted = None if pairs is None else set(map(tuple, pairs))
    jobs = [(br, ba) for qn in diophantine_enumerate(work, n_max)
            if wanted is None or (qn.n1, qn.n2) in wanted
            for br, ba in _branch_pairs(work, qn)]

    def run(job):
        return _solve_candidate(job[0], job[1], config, reflected)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    out = []
    for found, unphysical, messages in results:
        out.extend(found)
        diagnostics.unphysical.extend(unphysical)
        diagnostics.messages.extend(messages)
    return sorted(out, key=lambda s: s.sort_key)


# --- normalization and densities --------------------------------------------------

def _factor_integrals(wf: Wavefunction, radial: bool):
    """``(int f^2 w, int f^2 z^2 w)`` for the radial or angular factor.

    The squared prefactor combined with the coordinate Jacobian is exactly a
    confluent-Heun weight, so the integrals reuse the weighted quadrature of
    :mod:`qesheun.ortho`.
    """
    p, m, k = wf._r if radial else wf._a
    u = wf.u_r if radial else wf.u_a
    # 3D: Jacobian carries no 1/sqrt factor; 2D: 1/sqrt(z^2-1) (resp. 1/sqrt(1-z^2))
    shift = 0.0 if wf.dim == 3 else -0.5
    w = ortho.WeightFunction(2 * p + shift + 1, 2 * m + shift + 1, 4 * k)
    interval = "(1,inf)" if radial else "(-1,1)"
    if radial and k >= 0:
        raise NotNormalizable("radial factor does not decay")
    deg = 2 * u.degree + 2
    i0 = ortho._weighted_integral(lambda z: u(z) ** 2, w, interval, deg, epsabs=0.0)
    i2 = ortho._weighted_integral(lambda z: u(z) ** 2 * z * z, w, interval, deg, epsabs=0.0)
    return i0, i2


def norm_squared(sol: DemkovSolution) -> float:
    """``N^2 = int |Psi|^2`` over the whole space (plane in 2D)."""
    wf = sol if isinstance(sol, Wavefunction) else assemble_wavefunction(sol)
    f0, f2 = _factor_integrals(wf, True)
    g0, g2 = _factor_integrals(wf, False)
    h = wf.R / 2
    if wf.dim == 3:
        return 2 * math.pi * h**3 * (f2 * g0 - f0 * g2)
    # each (xi, eta) is hit twice, once per half plane
    return 2 * h**2 * (f2 * g0 - f0 * g2)


@dataclass(frozen=True)
class CartesianGrid:
    lo: tuple
    hi: tuple
    shape: tuple

    def axes(self):
        return [np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.shape)]

    def points(self):
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)


@dataclass(frozen=True)
class DensityGrid:
    grid: CartesianGrid
    rho: np.ndarray
    norm2: float

    def rows(self):
        """Flat ``(x..., rho)`` rows in C order."""
        pts = self.grid.points().reshape(-1, len(self.grid.shape))
        return np.column_stack([pts, self.rho.reshape(-1)])


def density_grid(sol: DemkovSolution, grid: CartesianGrid) -> DensityGrid:
    """Probability density ``|Psi|^2 / N^2`` sampled on a Cartesian box."""
    if len(grid.shape) != sol.config.dim:
        raise ValueError("grid dimension does not match the configuration")
    wf = assemble_wavefunction(sol)
    n2 = norm_squared(wf)
    if not (n2 > 0 and math.isfinite(n2)):
        raise NotNormalizable(f"N^2 = {n2}")
    rho = np.abs(wf.cartesian(grid.points())) ** 2 / n2
    return DensityGrid(grid, rho, n2)


def hamiltonian_residual(sol: DemkovSolution, points: np.ndarray, h: float) -> float:
    """``||H Psi - E Psi|| / ||Psi||`` over ``points`` with a central-difference Laplacian."""
    wf = assemble_wavefunction(sol)
    pts = np.asarray(points, dtype=float)
    dim = pts.shape[-1]
    psi = wf.cartesian(pts)
    lap = -2 * dim * psi
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        lap = lap + wf.cartesian(pts + e) + wf.cartesian(pts - e)
    lap = lap / h**2
    shift = np.zeros(dim)
    shift[0] = wf.R / 2
    r1 = np.linalg.norm(pts - shift, axis=-1)
    r2 = np.linalg.norm(pts + shift, axis=-1)
    Z1, Z2 = float(sol.config.Z1), float(sol.config.Z2)
    Hpsi = -0.5 * lap - (Z1 / r1 + Z2 / r2) * psi
    return float(np.linalg.norm(Hpsi - float(sol.E) * psi) / np.linalg.norm(psi))
