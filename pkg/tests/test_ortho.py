import itertools
import math
import random
import warnings

import numpy as np
import pytest

from qesheun.cheq_core import build_all_solutions, build_family, spectral_roots
from qesheun.errors import Divergent, SingularPoint, SingularSystem
from qesheun.ortho import (_p_exact, WeightFunction, defining_system_residual, double_orthogonality,
                           moment_functional, nu_coefficients, orthogonality_defect,
                           tail_cutoff, weak_orthogonality_check, weight_eval)


def trapezoid_oracle(f, w: WeightFunction, interval, n=400_001):
    """Brute-force composite rule on a graded grid (independent of QUADPACK).

    The endpoint powers are folded into the substitution so the integrand
    stays bounded for exponents down to -1/2.
    """
    g1, d1, e = w.gamma - 1, w.delta - 1, w.epsilon
    if interval == "(-1,1)":
        t = np.linspace(0, math.pi, n)
        z = -np.cos(t)  # z + 1 = 2 sin^2(t/2), 1 - z = 2 cos^2(t/2)
        jac = 2 ** (g1 + d1 + 1) * np.sin(t / 2) ** (2 * g1 + 1) * np.cos(t / 2) ** (2 * d1 + 1)
        return np.trapezoid(f(z) * jac * np.exp(e * z / 2), t)
    top = 1 - 2 * math.log(1e-16) / -e + 40
    s = np.linspace(0, math.sqrt(top - 1), n)
    z = 1 + s * s
    jac = 2 * s ** (2 * d1 + 1) * (z + 1) ** g1
    return np.trapezoid(f(z) * jac * np.exp(e * z / 2), s)


@pytest.mark.parametrize("g,d,e,z,expected", [(1, 1, 0, 0.3, 1), (1, 1, -2, 0, 1), (2, 2, 0, 3, 8),
                                              (1.5, 0.5, 0, 0.0, 1.0)])
def test_weight_eval(g, d, e, z, expected):
    assert weight_eval(WeightFunction(g, d, e), z) == pytest.approx(expected)


def test_weight_pole():
    with pytest.raises(SingularPoint):
        weight_eval(WeightFunction(0.5, 1, -1), -1.0)
    with pytest.raises(SingularPoint):
        weight_eval(WeightFunction(1, 0.5, -1), 1.0)
    assert weight_eval(WeightFunction(1, 0.5, -1), 0.0) > 0


def test_divergent_cases():
    sols = build_all_solutions(build_family(1, 1, 2, 1))
    with pytest.raises(Divergent):
        double_orthogonality(sols[0], sols[1], interval="(1,inf)")
    sols = build_all_solutions(build_family(1, 1, -2, 1))
    with pytest.raises(Divergent):
        double_orthogonality(sols[0], sols[1], WeightFunction(1, -0.5, -2))
    with pytest.raises(Divergent):
        double_orthogonality(sols[0], sols[1], WeightFunction(-1, 1, -2))
    with pytest.raises(ValueError):
        double_orthogonality(sols[0], sols[1], interval="(0,1)")


def test_tail_cutoff_bound():
    z = tail_cutoff(-2.0, 6)
    assert 6 * math.log(z) - z < 6 * math.log(6) - 6 + math.log(1e-16)


GRID = [(g, e, n) for g in (1, 1.5, 2) for e in (-1, -2, -4) for n in (1, 2, 3)]


@pytest.mark.parametrize("g,e,n", GRID)
def test_double_orthogonality_both_intervals(g, e, n):
    sols = build_all_solutions(build_family(g, g, e, n))
    for a, b in itertools.combinations(sols, 2):
        for interval in ("(-1,1)", "(1,inf)"):
            assert orthogonality_defect(a, b, interval) < 1e-6


def test_against_trapezoid_oracle():
    sols = build_all_solutions(build_family(1, 1, -2, 1))
    w = WeightFunction(1, 1, -2)
    for interval in ("(-1,1)", "(1,inf)"):
        ua, ub = sols[0].in_z().to_float(), sols[1].in_z().to_float()
        ours = double_orthogonality(sols[0], sols[1], w, interval)
        ref = trapezoid_oracle(lambda z: ua(z) * ub(z), w, interval)
        assert abs(ours) < 1e-6 and abs(ref) < 1e-6
        norm = double_orthogonality(sols[0], sols[0], w, interval)
        assert norm > 0
        assert norm == pytest.approx(trapezoid_oracle(lambda z: ua(z) ** 2, w, interval), rel=1e-6)


@pytest.mark.parametrize("g,d,e,n", [(1.5, 1.5, -2, 2), (0.5, 0.5, -3, 2), (1.5, 0.5, -1, 3),
                                     (0.5, 1.5, -4, 1), (2, 2, -1, 3)])
def test_quadrature_oracle_agreement(g, d, e, n):
    """QAWS handles the algebraic endpoints; the graded rule is a brute-force check."""
    sols = build_all_solutions(build_family(g, d, e, n))
    w = WeightFunction(g, d, e)
    u = sols[-1].in_z().to_float()
    for interval in ("(-1,1)", "(1,inf)"):
        ours = double_orthogonality(sols[-1], sols[-1], w, interval)
        ref = trapezoid_oracle(lambda z: u(z) ** 2, w, interval, n=2_000_001)
        assert ours == pytest.approx(ref, rel=1e-6)


def test_no_integration_warnings():
    sols = build_all_solutions(build_family(1.5, 1.5, -4, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for a, b in itertools.combinations(sols, 2):
            double_orthogonality(a, b, interval="(1,inf)")
            double_orthogonality(a, b, interval="(-1,1)")


def test_nu_coefficients():
    R = 0.7
    fam = build_family(1, 1, -4 * R, 2)
    nus = nu_coefficients(fam)
    assert nus[0] == 1
    assert nus[1] == pytest.approx(-4 * R * 2 * 1)
    assert nus[2] == pytest.approx(8 * (4 * R) ** 2 / 1)  # 1*eps*2*1 x 2*eps*1*2 = 8 eps^2
    assert nus[2] == pytest.approx(128 * R * R)


def test_moment_functional_small():
    fam = build_family(1, 1, 5, 0)
    mf = moment_functional(fam, spectral_roots(fam))
    assert mf.omegas == (pytest.approx(1.0),)
    fam = build_family(1, 1, -2, 1)
    roots = spectral_roots(fam)
    mf = moment_functional(fam, roots)
    assert sum(mf.omegas) == pytest.approx(1, abs=1e-14)
    # explicit 2x2 solve
    q1, q2 = roots
    om2 = -q1 / (q2 - q1)
    om1 = 1 - om2
    assert mf.omegas == pytest.approx((om1, om2), rel=1e-13)
    assert om1 * q1**2 + om2 * q2**2 == pytest.approx(-2 * 1 * 1)
    assert mf(lambda q: q) == pytest.approx(0, abs=1e-13)
    assert mf(lambda q: q * q) == pytest.approx(mf.nus[1])
    assert weak_orthogonality_check(mf, fam) < 1e-10
    assert mf.step_measure(q1 - 1) == 0
    assert mf.step_measure(q2) == pytest.approx(1)


def test_singular_system():
    fam = build_family(1, 1, -2, 1)
    roots = spectral_roots(fam)

    class Dup:
        def __iter__(self):
            return iter([roots[0], roots[0]])

        def __len__(self):
            return 2

    with pytest.raises(SingularSystem):
        moment_functional(fam, Dup())


def test_weak_orthogonality_random():
    rng = random.Random(5)
    for _ in range(20):
        g = rng.uniform(0.5, 3)
        d = rng.uniform(0.5, 3)
        e = -rng.uniform(0.3, 5)
        for n in range(0, 7):
            fam = build_family(g, d, e, n)
            mf = moment_functional(fam, spectral_roots(fam))
            # Omega_j is stored in double precision, so each row of the system
            # carries a rounding floor proportional to its largest term.
            terms = [abs(float(a)) * abs(o) for row in _p_exact(fam, mf.precise_roots)
                     for a, o in zip(row, mf.omegas)]
            assert defining_system_residual(mf, fam) < 1e-10 * max(1.0, max(terms) / 1e5)
            assert weak_orthogonality_check(mf, fam) < 1e-8 * max(abs(v) for v in mf.nus)
