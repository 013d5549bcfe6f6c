"""Dense univariate and sparse bivariate polynomials.

Coefficients are either all exact (``fractions.Fraction``) or all floats.
Exact mode is selected automatically when every input is an ``int`` or a
``Fraction``; anything else drops the computation to double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "RealPolynomial",
    "BivariatePolynomial",
    "is_exact",
    "coerce",
    "coerce_all",
]


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def coerce(x, exact: bool):
    """Convert ``x`` to a Fraction (``exact``) or a float."""
    if exact:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)


def coerce_all(*values):
    """Coerce a group of scalars to a common arithmetic mode.

    Returns ``(exact, converted_values)``.
    """
    exact = all(is_exact(v) for v in values)
    return exact, tuple(coerce(v, exact) for v in values)


def _trim(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial with real coefficients stored in ascending degree order.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, c) -> "RealPolynomial":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> "RealPolynomial":
        zero = Fraction(0) if is_exact(c) else 0.0
        return cls((zero,) * k + (c,))

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        if k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    # evaluation ---------------------------------------------------------
    def __call__(self, x):
        acc = 0 * x if isinstance(x, np.ndarray) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def deriv(self, m: int = 1) -> "RealPolynomial":
        c = list(self.coeffs)
        for _ in range(m):
            c = [k * c[k] for k in range(1, len(c))]
        return RealPolynomial(c)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPolynomial([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RealPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RealPolynomial):
            return RealPolynomial([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return RealPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return RealPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RealPolynomial([c / scalar for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, RealPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # conversions --------------------------------------------------------
    def shift(self, c) -> "RealPolynomial":
        """Return the polynomial ``x -> self(x + c)``."""
        out = list(self.coeffs)
        n = len(out)
        # repeated synthetic division (Taylor shift)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                out[k] = out[k] + c * out[k + 1]
        return RealPolynomial(out)

    def monic(self) -> "RealPolynomial":
        return self / self.leading

    def to_float(self) -> "RealPolynomial":
        return RealPolynomial([float(c) for c in self.coeffs])

    def to_fraction(self) -> "RealPolynomial":
        """Exact rational image of the coefficients (floats convert without rounding)."""
        return RealPolynomial([Fraction(c) for c in self.coeffs])

    def to_numpy(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def companion_roots(self) -> np.ndarray:
        """All complex roots from the companion matrix (numpy)."""
        return np.polynomial.polynomial.polyroots(self.to_numpy())

    def __repr__(self):
        return f"RealPolynomial({list(self.coeffs)!r})"

    def __str__(self):
        return format_poly(self.coeffs, "x")


def format_poly(coeffs: Sequence, var: str) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        terms.append(f"({c})" + (f"*{mono}" if mono else ""))
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class BivariatePolynomial:
    """Sparse polynomial in two variables, stored as ``{(i, j): coeff}``.

    Used for polynomials in the separation constant (first variable) and the
    intercenter distance (second variable).
    """

    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: v for k, v in dict(self.terms).items() if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, c) -> "BivariatePolynomial":
        return cls({(0, 0): c})

    @classmethod
    def var(cls, which: int, c=1) -> "BivariatePolynomial":
        return cls({(1, 0) if which == 0 else (0, 1): c})

    @classmethod
    def linear(cls, c0, c_first, c_second) -> "BivariatePolynomial":
        """``c0 + c_first * x + c_second * y``."""
        return cls({(0, 0): c0, (1, 0): c_first, (0, 1): c_second})

    def _lift(self, other):
        if isinstance(other, BivariatePolynomial):
            return other
        return BivariatePolynomial.constant(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BivariatePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BivariatePolynomial):
            return BivariatePolynomial({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + a * b
        return BivariatePolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.terms.values())

    def degree(self, which: int) -> int:
        if not self.terms:
            return -1
        return max(k[which] for k in self.terms)

    def __call__(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.terms.items())

    def partial(self, which: int) -> "BivariatePolynomial":
        out = {}
        for (i, j), c in self.terms.items():
            if which == 0 and i > 0:
                out[(i - 1, j)] = c * i
            elif which == 1 and j > 0:
                out[(i, j - 1)] = c * j
        return BivariatePolynomial(out)

    def coefficients_in(self, which: int) -> list:
        """Split into univariate polynomials in the *other* variable.

        Returns ``[c_0, c_1, ...]`` with ``self = sum_k c_k * v**k`` where ``v``
        is the variable selected by ``which``.
        """
        deg = self.degree(which)
        rows: list = [dict() for _ in range(deg + 1)]
        for (i, j), c in self.terms.items():
            k, other = (i, j) if which == 0 else (j, i)
            rows[k][other] = c
        out = []
        for row in rows:
            if not row:
                out.append(RealPolynomial())
                continue
            top = max(row)
            zero = 0 if self.exact else 0.0
            out.append(RealPolynomial([row.get(t, zero) for t in range(top + 1)]))
        return out

    def specialize(self, which: int, value) -> RealPolynomial:
        """Fix the variable ``which`` to ``value``; return a polynomial in the other."""
        other = 1 - which
        parts = self.coefficients_in(other)
        return RealPolynomial([p(value) for p in parts])

    def to_float(self) -> "BivariatePolynomial":
        return BivariatePolynomial({k: float(v) for k, v in self.terms.items()})

    def format(self, names: Iterable[str] = ("lambda", "R")) -> str:
        x, y = tuple(names)
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: (-t[0][0], -t[0][1])):
            mono = []
            if i:
                mono.append(x if i == 1 else f"{x}^{i}")
            if j:
                mono.append(y if j == 1 else f"{y}^{j}")
            parts.append("*".join([f"({c})"] + mono))
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.format()
