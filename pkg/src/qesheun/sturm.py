"""Sturm sequences and real-root isolation.

All sign evaluations are done in exact rational arithmetic. A float
polynomial is first converted to its exact rational image, so the counts
are exact for the polynomial as stored, whatever its rounding history.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .polynomial import RealPolynomial

__all__ = [
    "poly_divmod",
    "poly_gcd",
    "square_free",
    "sturm_chain",
    "sign_changes",
    "count_roots",
    "isolate_real_roots",
    "refine_root",
]


def poly_divmod(num: RealPolynomial, den: RealPolynomial):
    """Exact long division; both operands must have Fraction coefficients."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num.coeffs)
    dd = den.degree
    lead = den.leading
    if len(rem) - 1 < dd:
        return RealPolynomial(), num
    quot = [Fraction(0)] * (len(rem) - dd)
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k] / lead
        quot[k - dd] = c
        if c:
            for i, d in enumerate(den.coeffs):
                rem[k - dd + i] -= c * d
    return RealPolynomial(quot), RealPolynomial(rem[:dd])


def _normalize(p: RealPolynomial) -> RealPolynomial:
    # positive rescaling keeps signs intact and numbers small
    return p / abs(p.leading) if not p.is_zero() else p


def poly_gcd(a: RealPolynomial, b: RealPolynomial) -> RealPolynomial:
    a, b = a.to_fraction(), b.to_fraction()
    while not b.is_zero():
        a, b = b, _normalize(poly_divmod(a, b)[1])
    return a.monic() if not a.is_zero() else a


def square_free(p: RealPolynomial) -> RealPolynomial:
    """Square-free part ``p / gcd(p, p')`` (exact)."""
    p = p.to_fraction()
    g = poly_gcd(p, p.deriv())
    if g.degree <= 0:
        return p
    return poly_divmod(p, g)[0]


def sturm_chain(p: RealPolynomial) -> list:
    p = p.to_fraction()
    if p.is_zero():
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [_normalize(p)]
    if p.degree == 0:
        return chain
    chain.append(_normalize(p.deriv()))
    while True:
        r = poly_divmod(chain[-2], chain[-1])[1]
        if r.is_zero():
            break
        chain.append(_normalize(-r))
    return chain


def _sign_at(p: RealPolynomial, x) -> int:
    if x == math.inf or x == -math.inf:
        s = 1 if p.leading > 0 else -1
        if x < 0 and p.degree % 2 == 1:
            s = -s
        return s
    v = p(x)
    return (v > 0) - (v < 0)


def sign_changes(chain: list, x) -> int:
    if x not in (math.inf, -math.inf):
        x = Fraction(x)
    signs = [s for s in (_sign_at(p, x) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p, a, b) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval ``(a, b]``.

    ``p`` may be a polynomial or a precomputed Sturm chain; ``a`` and ``b``
    may be infinite.
    """
    chain = p if isinstance(p, list) else sturm_chain(p)
    return sign_changes(chain, a) - sign_changes(chain, b)


def cauchy_bound(p: RealPolynomial) -> Fraction:
    p = p.to_fraction()
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(p: RealPolynomial, max_depth: int = 200) -> list:
    """Disjoint rational intervals ``(a, b]`` each holding exactly one distinct root.

    Intervals come back sorted ascending.
    """
    p = p.to_fraction()
    if p.degree < 1:
        return []
    chain = sturm_chain(p)
    bound = cauchy_bound(p)
    # endpoints strictly outside all roots
    stack = [(-bound - 1, bound + 1, 0)]
    out = []
    while stack:
        a, b, depth = stack.pop()
        n = count_roots(chain, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        if depth > max_depth:
            raise RuntimeError("root isolation did not separate clustered roots")
        mid = (a + b) / 2
        stack.append((mid, b, depth + 1))
        stack.append((a, mid, depth + 1))
    return sorted(out)


def refine_root(p: RealPolynomial, a, b, newton_steps: int = 4) -> float:
    """Locate the unique root of ``p`` in ``(a, b]`` to double precision.

    The root must be simple in the square-free part, which is used for the
    sign tests. Bisection on the exact signs narrows the bracket until it is
    a few ulps wide in float, then Newton steps on the float polynomial polish the
    result (kept only when they stay inside the bracket).
    """
    pe = square_free(p)
    a, b = Fraction(a), Fraction(b)
    sb = _sign_at(pe, b)
    if sb == 0:
        return float(b)
    for _ in range(2000):
        fa, fb = float(a), float(b)
        if math.nextafter(fa, math.inf) >= fb:
            break
        mid = Fraction((fa + fb) / 2)
        if mid <= a or mid >= b:
            mid = (a + b) / 2
        sm = _sign_at(pe, mid)
        if sm == 0:
            return float(mid)
        if sm == sb:
            b = mid
        else:
            a = mid
    x = float((a + b) / 2)
    pf = p.to_float()
    dpf = pf.deriv()
    lo, hi = float(a), float(b)
    for _ in range(newton_steps):
        d = dpf(x)
        if d == 0:
            break
        nx = x - pf(x) / d
        if not lo <= nx <= hi or nx == x:
            break
        x = nx
    return x
