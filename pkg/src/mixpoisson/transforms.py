"""Stirling transforms and moment-basis conversions.

A :class:`MomentSeq` is a lazy, memoized map s -> moment value (s >= 1),
tagged with the basis it lives in (power, falling-factorial,
rising-factorial or binomial moments).  All transforms are exact when fed
Fractions; a float anywhere makes the output floats.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Union

from .numerics import falling, gen_binomial, rising, stirling1_unsigned, stirling2
from .series import TruncatedSeries

Number = Union[int, Fraction, float]

KINDS = ("power", "falling", "rising", "binomial")

__all__ = [
    "MomentSeq",
    "stirling_transform",
    "inverse_stirling_transform",
    "falling_to_power",
    "power_to_falling",
    "rising_to_falling_shifted",
    "egf_stirling_substitute",
]


@dataclass
class MomentSeq:
    """Lazy moment sequence: eval(s) defined for 1 <= s <= max_order (or all s)."""

    kind: str
    _eval: Callable[[int], Number]
    max_order: Optional[int] = None
    _cache: Dict[int, Number] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown moment kind {self.kind!r}")

    def __call__(self, s: int) -> Number:
        if s < 1:
            raise ValueError("moments are indexed from s = 1")
        if self.max_order is not None and s > self.max_order:
            raise ValueError(f"moment order {s} beyond max_order {self.max_order}")
        with self._lock:
            if s not in self._cache:
                self._cache[s] = self._eval(s)
            return self._cache[s]

    @staticmethod
    def from_values(values: Sequence[Number], kind: str = "power") -> "MomentSeq":
        vals = list(values)
        return MomentSeq(kind, lambda s: vals[s - 1], max_order=len(vals))

    def values(self, upto: int) -> list:
        return [self(s) for s in range(1, upto + 1)]


def stirling_transform(a: MomentSeq, rho: Number, max_order: Optional[int] = None) -> MomentSeq:
    """b_s = sum_{k=1}^{s} rho^k S(s,k) a_k (power moments from falling moments / ...)."""
    order = max_order if max_order is not None else a.max_order

    def ev(s: int) -> Number:
        return sum(rho**k * stirling2(s, k) * a(k) for k in range(1, s + 1))

    return MomentSeq("power", ev, max_order=order)


def inverse_stirling_transform(b: MomentSeq, rho: Number, max_order: Optional[int] = None) -> MomentSeq:
    """a_s = rho^{-s} sum_{k=1}^{s} (-1)^{s-k} c(s,k) b_k; exact inverse of the above."""
    order = max_order if max_order is not None else b.max_order

    def ev(s: int) -> Number:
        tot = sum((-1) ** (s - k) * stirling1_unsigned(s, k) * b(k) for k in range(1, s + 1))
        if isinstance(tot, (int, Fraction)) and isinstance(rho, (int, Fraction)):
            return tot / Fraction(rho) ** s
        return tot / rho**s

    return MomentSeq("power", ev, max_order=order)


def falling_to_power(fm: MomentSeq, max_order: Optional[int] = None) -> MomentSeq:
    """Power moments from falling-factorial moments: p_s = sum_k S(s,k) f_k."""
    order = max_order if max_order is not None else fm.max_order

    def ev(s: int) -> Number:
        return sum(stirling2(s, k) * fm(k) for k in range(1, s + 1))

    return MomentSeq("power", ev, max_order=order)


def power_to_falling(pm: MomentSeq, max_order: Optional[int] = None) -> MomentSeq:
    """Falling moments from power moments: f_s = sum_k (-1)^{s-k} c(s,k) p_k."""
    order = max_order if max_order is not None else pm.max_order

    def ev(s: int) -> Number:
        return sum((-1) ** (s - k) * stirling1_unsigned(s, k) * pm(k) for k in range(1, s + 1))

    return MomentSeq("falling", ev, max_order=order)


def rising_to_falling_shifted(rm: MomentSeq, shift: Number, max_order: Optional[int] = None) -> MomentSeq:
    """Falling-factorial moments of X - c from rising-factorial moments of X.

    Two binomial expansions:
        (x)_falling^s = sum_l C(s,l) (-1)^{s-l} (s-1)_falling^{s-l} (x)_rising^l
        (x - c)_rising^l = sum_j C(l,j) (x)_rising^j (-c)_rising^{l-j}
    with the convention that the 0th rising moment is 1.
    """
    order = max_order if max_order is not None else rm.max_order
    c = shift

    def rising_shifted(ell: int) -> Number:
        # E((X - c)_rising^ell)
        tot: Number = 0
        for j in range(ell + 1):
            rj = 1 if j == 0 else rm(j)
            tot = tot + gen_binomial(ell, j) * rj * rising(-c, ell - j)
        return tot

    def ev(s: int) -> Number:
        tot: Number = 0
        for ell in range(s + 1):
            w = gen_binomial(s, ell) * (-1) ** (s - ell) * falling(s - 1, s - ell)
            if w:
                tot = tot + w * rising_shifted(ell)
        return tot

    return MomentSeq("falling", ev, max_order=order)


def egf_stirling_substitute(a_egf: TruncatedSeries, rho: Number, order: Optional[int] = None) -> TruncatedSeries:
    """Coefficient-exact composition B(z) = A(rho (e^z - 1)) truncated at ``order``."""
    n = a_egf.order if order is None else min(order, a_egf.order)
    rho = rho if isinstance(rho, Fraction) else Fraction(rho)
    a = a_egf.truncate(n)
    # rho (e^z - 1) has zero constant term, so composition is well defined.
    expm1 = (TruncatedSeries.identity(n).exp() - TruncatedSeries.constant(1, n)) if n >= 1 else TruncatedSeries.constant(0, 0)
    inner = expm1.scalar_mul(rho)
    return a.compose(inner)
