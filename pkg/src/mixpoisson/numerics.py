"""Exact combinatorial numbers and real special functions.

Everything combinatorial here (Stirling numbers, generalized binomials,
falling/rising factorials) is exact: integers or ``fractions.Fraction``.
Floating point enters only through the Gamma family, where results carry
at least 13 correct significant digits.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, List, Union

Number = Union[int, Fraction, float]

__all__ = [
    "stirling2",
    "stirling1_unsigned",
    "falling",
    "rising",
    "gen_binomial",
    "log_gamma",
    "gamma_ratio",
    "upper_incomplete_gamma",
    "regularized_gamma_q",
    "chi2_sf",
    "adaptive_quad",
]

_LOCK = threading.Lock()
# Row-major triangles grown on demand; row s holds values for k = 0..s.
_S2_ROWS: List[List[int]] = [[1]]
_S1_ROWS: List[List[int]] = [[1]]


def _extend_rows(rows: List[List[int]], s: int, step: Callable[[int, int, List[int], List[int]], int]) -> None:
    while len(rows) <= s:
        m = len(rows)
        prev = rows[-1]
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            row[k] = step(m, k, prev, row)
        rows.append(row)


def stirling2(s: int, k: int) -> int:
    """Stirling number of the second kind S(s,k): set partitions of s into k blocks."""
    if s < 0 or k < 0:
        raise ValueError("stirling2 requires non-negative arguments")
    if k > s:
        return 0
    if len(_S2_ROWS) <= s:
        with _LOCK:
            _extend_rows(_S2_ROWS, s, lambda m, j, prev, _row: prev[j - 1] + j * (prev[j] if j < m else 0))
    return _S2_ROWS[s][k]


def stirling1_unsigned(s: int, k: int) -> int:
    """Unsigned Stirling number of the first kind c(s,k): permutations of s with k cycles."""
    if s < 0 or k < 0:
        raise ValueError("stirling1_unsigned requires non-negative arguments")
    if k > s:
        return 0
    if len(_S1_ROWS) <= s:
        with _LOCK:
            _extend_rows(_S1_ROWS, s, lambda m, j, prev, _row: prev[j - 1] + (m - 1) * (prev[j] if j < m else 0))
    return _S1_ROWS[s][k]


def falling(x: Number, s: int) -> Number:
    """Falling factorial x(x-1)...(x-s+1); equals 1 for s = 0."""
    if s < 0:
        raise ValueError("falling factorial needs s >= 0")
    out: Number = 1
    for i in range(s):
        out = out * (x - i)
    return out


def rising(x: Number, s: int) -> Number:
    """Rising factorial x(x+1)...(x+s-1); equals 1 for s = 0."""
    if s < 0:
        raise ValueError("rising factorial needs s >= 0")
    out: Number = 1
    for i in range(s):
        out = out * (x + i)
    return out


def gen_binomial(a: Number, m: int) -> Number:
    """Generalized binomial C(a, m) = a(a-1)...(a-m+1)/m! for m >= 0.

    Exact when ``a`` is an int or Fraction.  The product form is used
    throughout (never Gamma ratios), so negative-integer arguments are
    handled without spurious poles.  Returns 0 for m < 0, matching the
    usual convention for vanishing binomials in moment formulas.
    """
    if m < 0:
        return 0
    if isinstance(a, int):
        a = Fraction(a)
    if isinstance(a, Fraction):
        # Single big-integer product, one reduction at the end: much faster
        # than m Fraction multiplications when m is large.
        p, q = a.numerator, a.denominator
        num = 1
        for i in range(m):
            num *= p - i * q
        return Fraction(num, q**m * math.factorial(m))
    out = 1.0
    for i in range(m):
        out *= (a - i) / (i + 1)
    return out


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError("log_gamma requires a positive argument")
    return math.lgamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) via exp(lgamma(a) - lgamma(b)), avoiding overflow."""
    if a <= 0 or b <= 0:
        raise ValueError("gamma_ratio requires positive arguments")
    return math.exp(math.lgamma(a) - math.lgamma(b))


def _gamma_q_series(s: float, x: float) -> float:
    # Lower regularized series: P(s,x) = x^s e^{-x} / Gamma(s) * sum x^n / (s(s+1)...(s+n)).
    term = 1.0 / s
    total = term
    n = s
    for _ in range(10000):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    log_p = s * math.log(x) - x - math.lgamma(s) + math.log(total)
    return 1.0 - math.exp(log_p)


def _gamma_q_contfrac(s: float, x: float) -> float:
    # Lentz continued fraction for Q(s,x), stable for x > s + 1.
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(s * math.log(x) - x - math.lgamma(s)) * h


def regularized_gamma_q(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s), s > 0, x >= 0."""
    if s <= 0:
        raise ValueError("regularized_gamma_q requires s > 0")
    if x < 0:
        raise ValueError("regularized_gamma_q requires x >= 0")
    if x == 0.0:
        return 1.0
    if x > s + 1.0:
        return _gamma_q_contfrac(s, x)
    return _gamma_q_series(s, x)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma Gamma(s,x) = int_x^inf t^{s-1} e^{-t} dt, s > 0, x >= 0."""
    return regularized_gamma_q(s, x) * math.exp(math.lgamma(s))


def chi2_sf(x: float, dof: int) -> float:
    """Chi-squared survival function P(X >= x) with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError("chi2_sf requires dof >= 1")
    if x <= 0:
        return 1.0
    return regularized_gamma_q(dof / 2.0, x / 2.0)


def _simpson(f: Callable[[float], float], a: float, fa: float, b: float, fb: float, fm: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_step(f, a, fa, b, fb, fm, whole, tol, depth) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, m, fm, flm)
    right = _simpson(f, m, fm, b, fb, frm)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_step(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) + _adaptive_step(
        f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1
    )


def adaptive_quad(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    """Adaptive Simpson quadrature of ``f`` on [a, b] to absolute tolerance ``tol``.

    The interval is pre-split into 16 panels so narrow features away from
    the endpoints are not missed by the first bisection.
    """
    if b <= a:
        return 0.0
    total = 0.0
    k = 16
    xs = [a + (b - a) * i / k for i in range(k + 1)]
    fs = [f(x) for x in xs]
    for i in range(k):
        lo, hi = xs[i], xs[i + 1]
        fm = f(0.5 * (lo + hi))
        whole = _simpson(f, lo, fs[i], hi, fs[i + 1], fm)
        total += _adaptive_step(f, lo, fs[i], hi, fs[i + 1], fm, whole, tol / k, 48)
    return total
