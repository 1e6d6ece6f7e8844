"""Truncated formal power series over exact rationals.

Coefficients are ``fractions.Fraction``; arithmetic truncates to the
smaller operand order and never silently extends it.  The tree function
T(z) = sum_{n>=1} n^{n-1} z^n / n! and negative powers of (1 - T) are the
workhorses for the exact moment formulas of the tree-like models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

from .errors import SingularSeriesError
from .numerics import gen_binomial

Number = Union[int, Fraction]

DEFAULT_ORDER = 400

__all__ = [
    "TruncatedSeries",
    "tree_series",
    "tree_resolvent_coeff",
    "coeff_binom_4z",
    "DEFAULT_ORDER",
]


def _frac(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class TruncatedSeries:
    """A power series known through z^order, coefficients exact rationals."""

    coeffs: Tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(values: Iterable[Number]) -> "TruncatedSeries":
        return TruncatedSeries(tuple(_frac(v) for v in values))

    @staticmethod
    def constant(value: Number, order: int) -> "TruncatedSeries":
        if order < 0:
            raise ValueError("order must be >= 0")
        return TruncatedSeries((_frac(value),) + (Fraction(0),) * order)

    @staticmethod
    def identity(order: int) -> "TruncatedSeries":
        # The series z.
        if order < 1:
            raise ValueError("identity needs order >= 1")
        return TruncatedSeries((Fraction(0), Fraction(1)) + (Fraction(0),) * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, n: int) -> Fraction:
        if n < 0 or n > self.order:
            raise IndexError(f"coefficient {n} outside truncation order {self.order}")
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coeffs[i] - other.coeffs[i] for i in range(n + 1)))

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs))

    def scalar_mul(self, c: Number) -> "TruncatedSeries":
        c = _frac(c)
        return TruncatedSeries(tuple(c * v for v in self.coeffs))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if not ai:
                continue
            for j in range(n + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return TruncatedSeries(tuple(out))

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by z^k (order preserved, top coefficients fall off)."""
        if k < 0:
            raise ValueError("shift needs k >= 0")
        n = self.order
        return TruncatedSeries((Fraction(0),) * min(k, n + 1) + self.coeffs[: max(n + 1 - k, 0)])

    def integrate(self) -> "TruncatedSeries":
        """Termwise antiderivative with zero constant term; order grows by one."""
        out = [Fraction(0)]
        for m, c in enumerate(self.coeffs):
            out.append(c / (m + 1))
        return TruncatedSeries(tuple(out))

    def reciprocal(self) -> "TruncatedSeries":
        if self.coeffs[0] == 0:
            raise SingularSeriesError("reciprocal of a series with zero constant term")
        n = self.order
        a = self.coeffs
        inv0 = 1 / a[0]
        out = [Fraction(0)] * (n + 1)
        out[0] = inv0
        for m in range(1, n + 1):
            s = Fraction(0)
            for k in range(1, m + 1):
                if a[k]:
                    s += a[k] * out[m - k]
            out[m] = -inv0 * s
        return TruncatedSeries(tuple(out))

    def neg_pow(self, a: int) -> "TruncatedSeries":
        """Return self**(-a) for a positive integer a; needs nonzero constant term."""
        if a < 1:
            raise ValueError("neg_pow needs a positive integer exponent")
        if self.coeffs[0] == 0:
            raise SingularSeriesError("negative power of a series with zero constant term")
        inv = self.reciprocal()
        out = inv
        for _ in range(a - 1):
            out = out * inv
        return out

    def exp(self) -> "TruncatedSeries":
        """exp of a series with zero constant term, via f' = g' f."""
        if self.coeffs[0] != 0:
            raise ValueError("exp requires zero constant term")
        n = self.order
        g = self.coeffs
        out = [Fraction(0)] * (n + 1)
        out[0] = Fraction(1)
        # m * f_m = sum_{k=1}^{m} k * g_k * f_{m-k}
        for m in range(1, n + 1):
            s = Fraction(0)
            for k in range(1, m + 1):
                if g[k]:
                    s += k * g[k] * out[m - k]
            out[m] = s / m
        return TruncatedSeries(tuple(out))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(z)) by Horner; inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("composition needs inner series with zero constant term")
        n = min(self.order, inner.order)
        acc = TruncatedSeries.constant(0, n)
        inner_t = inner.truncate(n)
        for c in reversed(self.coeffs[: n + 1]):
            acc = acc * inner_t
            acc = TruncatedSeries((acc.coeffs[0] + c,) + acc.coeffs[1:])
        return acc


def tree_series(order: int) -> TruncatedSeries:
    """T(z) with coefficient n^{n-1}/n! at z^n for 1 <= n <= order; T(0) = 0."""
    if order < 0:
        raise ValueError("order must be >= 0")
    coeffs = [Fraction(0)]
    for n in range(1, order + 1):
        coeffs.append(Fraction(n ** (n - 1), math.factorial(n)))
    return TruncatedSeries(tuple(coeffs))


def tree_resolvent_coeff(m: int, a: int) -> Fraction:
    """Exact [z^m] (1 - T(z))^{-a} for a positive integer power a.

    Lagrange inversion on T = z e^T gives

        [z^m] (1-T)^{-a} = (a/m) [t^{m-1}] e^{mt} (1-t)^{-(a+1)}
                         = (a/m!) sum_{r=0}^{m-1} m^r (m-1)!/r! * C(a+m-1-r, a),

    a single integer sum, so coefficients at m ~ 10^4 stay tractable where
    the full O(m^2) rational series pipeline would not.
    """
    if a < 1:
        raise ValueError("tree_resolvent_coeff needs a >= 1")
    if m < 0:
        raise ValueError("tree_resolvent_coeff needs m >= 0")
    if m == 0:
        return Fraction(1)
    total = 0
    p = math.factorial(m - 1)  # p = m^r (m-1)!/r!, exact integers throughout
    for r in range(m):
        total += p * math.comb(a + m - 1 - r, a)
        if r < m - 1:
            p = p * m // (r + 1)
    return Fraction(a * total, math.factorial(m))


def coeff_binom_4z(a_num: int, a_den: int, m: int) -> Fraction:
    """Exact [z^m] (1 - 4z)^{-a} with a = a_num/a_den > 0, via 4^m C(a+m-1, m)."""
    a = Fraction(a_num, a_den)
    if a <= 0:
        raise ValueError("coeff_binom_4z needs a > 0")
    if m < 0:
        return Fraction(0)
    return Fraction(4) ** m * gen_binomial(a + m - 1, m)
