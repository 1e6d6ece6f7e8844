"""Closed-form exact moments and scale parameters for the combinatorial models.

One function per model family returns the exact factorial (or rising)
moment of the statistic of interest as a ``Fraction``.  Gamma-ratio
expressions whose arguments differ by integers are evaluated as telescoping
rational products, so every value here is bit-exact and can be compared
against exhaustive enumeration with zero tolerance.

``scale_lambda`` packages the model's scale parameter together with its
limiting mixing law and a regime classification (the limit-law dichotomy:
scaled convergence to the mixing law when the scale blows up, a mixed
Poisson limit at a finite scale, mass escaping to zero otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, NamedTuple, Optional, Union

import numpy as np

from . import mixing as mixlaws
from .errors import SeriesOrderExceededError, UnknownModelError
from .mixing import MixingLaw
from .numerics import falling, gen_binomial, rising
from .series import TruncatedSeries, tree_resolvent_coeff, tree_series, coeff_binom_4z, DEFAULT_ORDER

Number = Union[int, Fraction, float]

MODEL_TAGS = (
    "blocks",
    "dimurn",
    "descendants",
    "nodedeg",
    "branches",
    "crp",
    "triangular",
    "inversions",
    "records",
    "edgecut",
    "parking",
    "bridge",
    "mapping",
)

__all__ = [
    "MODEL_TAGS",
    "ModelSpec",
    "ScaleInfo",
    "AsymptoticValue",
    "blocks_fm",
    "dimurn_fm",
    "descendants_fm",
    "family_ratio",
    "nodedeg_fm",
    "branches_fm",
    "crp_params",
    "crp_fm",
    "triangular_rising_fm",
    "triangular_rising_fm_gamma_form",
    "triangular_mean",
    "inversions_fm",
    "records_fm",
    "records_fm_series",
    "edgecut_fm",
    "edgecut_fm_numeric",
    "parking_fm",
    "parking_fm_numeric",
    "bridge_fm",
    "mapping_fm",
    "scale_lambda",
]


@dataclass(frozen=True)
class ModelSpec:
    """Tagged description of one combinatorial model and its parameters."""

    tag: str
    params: Dict[str, Number] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.tag not in MODEL_TAGS:
            raise UnknownModelError(f"unknown model tag {self.tag!r}")

    def get(self, key: str, default: Optional[Number] = None) -> Number:
        if key in self.params:
            return self.params[key]
        if default is None:
            raise ValueError(f"model {self.tag!r} needs parameter {key!r}")
        return default


class AsymptoticValue(NamedTuple):
    """A value that is an asymptotic main term rather than an exact quantity."""

    value: float
    exact: bool = False


class ScaleInfo(NamedTuple):
    lam: float
    mixing: MixingLaw
    regime: str  # "to-infinity" | "finite-rho" | "degenerate"


def _regime(lam: float) -> str:
    if lam <= 0.1:
        return "degenerate"
    if lam >= 10.0:
        return "to-infinity"
    return "finite-rho"


def blocks_fm(n: int, k: int, ell: int, s: int) -> Fraction:
    """E(falling(X_{n,ell}, s)) for counts of size-(k*ell) blocks in k-ary
    ascent-restricted multiset permutations of order n.

    s!/(k ell)^s * C(ell-1-1/k, ell-1)^s * C(n - ell s + (s+1)/k - 1, n - ell s)
    / C(n - 1 + 1/k, n); zero once n - ell*s < 0.
    """
    if n < 1 or k < 1 or ell < 1 or s < 0:
        raise ValueError("blocks_fm needs n,k,ell >= 1 and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - ell * s < 0:
        return Fraction(0)
    invk = Fraction(1, k)
    top = gen_binomial(n - ell * s + (s + 1) * invk - 1, n - ell * s)
    bottom = gen_binomial(n - 1 + invk, n)
    lead = Fraction(math.factorial(s), (k * ell) ** s) * gen_binomial(ell - 1 - invk, ell - 1) ** s
    return lead * top / bottom


def dimurn_fm(n: int, m: int, alpha: int, delta: int, s: int) -> Fraction:
    """E(falling(X_hat, s)) for the number of white-ball units left when the
    black balls of a diminishing two-colour urn run out.

    falling(n, s) / C(m + alpha*s/delta, m); zero for s > n.
    """
    if n < 0 or m < 0 or alpha < 1 or delta < 1 or s < 0:
        raise ValueError("dimurn_fm needs n,m >= 0, alpha,delta >= 1, s >= 0")
    if s == 0:
        return Fraction(1)
    if s > n:
        return Fraction(0)
    return Fraction(falling(n, s)) / gen_binomial(m + Fraction(alpha * s, delta), m)


def family_ratio(family: str, alpha: Number = 1, d: int = 2) -> Fraction:
    """The degree-weight ratio r = c2/c1 for an increasing-tree family:
    0 for uniform attachment, -1/(1+alpha) for preferential attachment with
    weight alpha, 1/(d-1) for d-ary trees."""
    if family == "rect":
        return Fraction(0)
    if family == "gport":
        return -1 / (1 + Fraction(alpha))
    if family == "dary":
        if d < 2:
            raise ValueError("d-ary needs d >= 2")
        return Fraction(1, d - 1)
    raise UnknownModelError(f"unknown increasing-tree family {family!r}")


def descendants_fm(n: int, j: int, s: int, ratio: Number) -> Fraction:
    """E(falling(D_hat_{n,j}, s)) for descendants-minus-one of node j:
    s! C(n-j, s) C(s+r, s) / C(j-1+r+s, s) with r the family ratio."""
    if not (1 <= j <= n) or s < 0:
        raise ValueError("descendants_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    r = Fraction(ratio)
    return (
        Fraction(math.factorial(s))
        * gen_binomial(Fraction(n - j), s)
        * gen_binomial(s + r, s)
        / gen_binomial(j - 1 + r + s, s)
    )


def _gamma_shift_ratio(a: Fraction, lo: int, hi: int) -> Fraction:
    """Gamma(hi + a) / Gamma(lo + a) as the exact product prod_{i=lo}^{hi-1}(i+a)."""
    out = Fraction(1)
    for i in range(lo, hi):
        out *= i + a
    return out


def nodedeg_fm(n: int, j: int, s: int, alpha: Number) -> Fraction:
    """E(falling(X_{n,j}, s)) for the outdegree of node j in a plane
    recursive tree with attachment weight alpha (2 <= j <= n).

    The Gamma ratios all telescope (the argument offsets are integers), so
    despite the irrational-looking display the value is an exact rational.
    """
    if not (2 <= j <= n) or s < 0:
        raise ValueError("nodedeg_fm needs 2 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    a = Fraction(alpha)
    w = 1 / (1 + a)
    total = Fraction(0)
    for k in range(s + 1):
        u = Fraction(s - 1 - k, 1) / (1 + a)
        term = gen_binomial(s, k) * (-1) ** k * _gamma_shift_ratio(u, j, n) / _gamma_shift_ratio(-w, j, n)
        total += term
    return rising(a, s) * total


def branches_fm(n: int, j: int, k: int, s: int, alpha: Number) -> Fraction:
    """E(falling(X_{n,j,k}, s)) for the number of size-k branches attached
    to node j in a plane recursive tree with weight alpha.

    The leading per-branch factor is C(k-1-1/(alpha+1), k-1)/((alpha+1)k),
    matching the table-size moments of the restaurant-process view at the
    root; exhaustive enumeration pins this index down (an off-by-one in the
    binomial's upper argument inflates every k >= 2 value by
    ((alpha+1)k-1)^s).
    """
    if j < 1 or k < 1 or s < 0 or n < 1:
        raise ValueError("branches_fm needs n,j,k >= 1 and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j - k * s < 0:
        return Fraction(0)
    a = Fraction(alpha)
    w = 1 / (1 + a)
    lead = (gen_binomial(k - 1 - w, k - 1) / ((a + 1) * k)) ** s
    num = gen_binomial(j - 1 - w, j - 1) * gen_binomial(n - k * s - 1 + Fraction(s - 1, 1) / (1 + a), n - j - k * s)
    den = gen_binomial(Fraction(n - 1), j - 1) * gen_binomial(n - 1 - w, n - 1)
    return lead * rising(a, s) * num / den


def crp_params(a: Number, theta: Number) -> tuple:
    """Map Chinese-restaurant parameters (a, theta) to the tree-growth
    parameters (alpha, beta): a = 1/(1+alpha), theta = beta/(1+alpha)."""
    a = Fraction(a)
    theta = Fraction(theta)
    if not (0 < a < 1):
        raise ValueError("crp needs 0 < a < 1")
    alpha = 1 / a - 1
    beta = theta / a
    if beta <= 0:
        raise ValueError("crp_params requires theta > 0 (beta > 0)")
    return alpha, beta


def crp_fm(n: int, j: int, s: int, alpha: Number, beta: Number) -> Fraction:
    """E(falling(C_{n,j}, s)) for the number of size-j tables after n
    customers of the Chinese restaurant process (root-weighted tree view).

    (C(j-1-1/(alpha+1), j-1) / ((alpha+1) j))^s * s!/C(beta/(alpha+1)+n-1, n)
    * C(beta-1+s, s) * C(n-js-1+(beta+s)/(alpha+1), n-js).
    """
    a = Fraction(alpha)
    b = Fraction(beta)
    if b <= 0:
        raise ValueError("crp_fm needs beta > 0")
    if not (1 <= j <= n) or s < 0:
        raise ValueError("crp_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j * s < 0:
        return Fraction(0)
    w = 1 / (1 + a)
    lead = (gen_binomial(j - 1 - w, j - 1) / ((a + 1) * j)) ** s
    return (
        lead
        * Fraction(math.factorial(s))
        / gen_binomial(b * w + n - 1, n)
        * gen_binomial(b - 1 + s, s)
        * gen_binomial(n - j * s - 1 + (b + s) * w, n - j * s)
    )


def triangular_rising_fm(n: int, w0: int, b0: int, alpha: int, beta: int, s: int) -> Fraction:
    """E(rising(X_n, s)) for X_n = W_n/alpha in a balanced triangular urn
    ((alpha, beta), (0, gamma)) with gamma = alpha + beta, started from
    (w0, b0); exact telescoping-product evaluation:

        prod_{i=0}^{n-1} (T0 + s*alpha + i*gamma)/(T0 + i*gamma) * rising(w0/alpha, s).
    """
    _check_triangular(n, w0, b0, alpha, beta)
    if s < 0:
        raise ValueError("s >= 0 required")
    if s == 0:
        return Fraction(1)
    g = alpha + beta
    t0 = w0 + b0
    out = rising(Fraction(w0, alpha), s)
    for i in range(n):
        out *= Fraction(t0 + s * alpha + i * g, t0 + i * g)
    return out


def triangular_rising_fm_gamma_form(n: int, w0: int, b0: int, alpha: int, beta: int, s: int) -> Fraction:
    """Same rising moment via the binomial-moment form
    s! * C(n-1+(T0+s*alpha)/gamma, n)/C(n-1+T0/gamma, n) * C(w0/alpha+s-1, s);
    an independent exact route used to cross-check the product form."""
    _check_triangular(n, w0, b0, alpha, beta)
    if s < 0:
        raise ValueError("s >= 0 required")
    if s == 0:
        return Fraction(1)
    g = Fraction(alpha + beta)
    t0 = Fraction(w0 + b0)
    return (
        Fraction(math.factorial(s))
        * gen_binomial(n - 1 + (t0 + s * alpha) / g, n)
        / gen_binomial(n - 1 + t0 / g, n)
        * gen_binomial(Fraction(w0, alpha) + s - 1, s)
    )


def triangular_mean(n: int, w0: int, b0: int, alpha: int, beta: int) -> Fraction:
    """Martingale mean E(X_n) = C(n-1+(T0+alpha)/gamma, n)/C(n-1+T0/gamma, n) * w0/alpha."""
    _check_triangular(n, w0, b0, alpha, beta)
    g = Fraction(alpha + beta)
    t0 = Fraction(w0 + b0)
    return gen_binomial(n - 1 + (t0 + alpha) / g, n) / gen_binomial(n - 1 + t0 / g, n) * Fraction(w0, alpha)


def _check_triangular(n: int, w0: int, b0: int, alpha: int, beta: int) -> None:
    if n < 0 or w0 < 1 or b0 < 0 or alpha < 1 or beta < 0:
        raise ValueError("triangular urn needs n,b0 >= 0, w0,alpha >= 1, beta >= 0")


def inversions_fm(n: int, j: int, s: int, kappa: float) -> AsymptoticValue:
    """Asymptotic main term of E(falling(I_{n,j}, s)) for inversions induced
    by node j in a size-n random tree of a simply generated family with
    variance constant kappa (an input here, family-specific):

        Gamma(s/2+1) (2/kappa)^{s/2} falling(n-j, s) / n^{s/2}.

    Not exact: the only asymptotic-only operation in this module, and the
    result is flagged accordingly.
    """
    if kappa <= 0:
        raise ValueError("inversions_fm needs kappa > 0")
    if not (1 <= j <= n) or s < 0:
        raise ValueError("inversions_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return AsymptoticValue(1.0)
    val = (
        math.exp(math.lgamma(s / 2.0 + 1))
        * (2.0 / kappa) ** (s / 2.0)
        * float(falling(n - j, s))
        / n ** (s / 2.0)
    )
    return AsymptoticValue(val)


def _tilde_t(j: int) -> Fraction:
    # number of rooted labelled trees over j!, i.e. j^{j-1}/j!
    return Fraction(j ** (j - 1), math.factorial(j))


def records_fm(n: int, j: int, s: int) -> Fraction:
    """E(falling(R_{n,j}, s)) for size-j record subtrees of a uniform rooted
    labelled tree on n nodes:

        (s! n! / n^{n-1}) * (T~_j^s / n) * [z^{n-js}] (1-T(z))^{-(s+1)}.

    The coefficient is extracted by the exact Lagrange-inversion sum, so the
    operation is practical far beyond any series truncation budget.
    """
    if not (1 <= j <= n) or s < 0:
        raise ValueError("records_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j * s < 0:
        return Fraction(0)
    coeff = tree_resolvent_coeff(n - j * s, s + 1)
    return Fraction(math.factorial(s) * math.factorial(n), n ** (n - 1)) * _tilde_t(j) ** s / n * coeff


def mapping_fm(n: int, j: int, s: int) -> Fraction:
    """E(falling(X_{n,j}, s)) for size-j trees hanging off the cyclic part of
    a uniform mapping of [n]:

        (s! n! / n^n) * T~_j^s * [z^{n-js}] (1-T(z))^{-(s+1)}.

    Shares the coefficient kernel with :func:`records_fm`; only the
    normalization differs (total weight n^n/n! instead of n^{n-1}/n! with
    the extra 1/n from integration).
    """
    if not (1 <= j <= n) or s < 0:
        raise ValueError("mapping_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j * s < 0:
        return Fraction(0)
    coeff = tree_resolvent_coeff(n - j * s, s + 1)
    return Fraction(math.factorial(s) * math.factorial(n), n**n) * _tilde_t(j) ** s * coeff


def records_fm_series(n: int, j: int, s: int, order: Optional[int] = None) -> Fraction:
    """Series-pipeline twin of :func:`records_fm` (full truncated-series
    route through neg_pow); kept as an independent cross-check."""
    if not (1 <= j <= n) or s < 0:
        raise ValueError("records_fm_series needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j * s < 0:
        return Fraction(0)
    cap = order if order is not None else DEFAULT_ORDER
    if n > cap:
        raise SeriesOrderExceededError(f"records_fm_series needs order >= n = {n}, have {cap}")
    one_minus_t = TruncatedSeries.constant(1, n) - tree_series(n)
    coeff = one_minus_t.neg_pow(s + 1).coeff(n - j * s)
    return Fraction(math.factorial(s) * math.factorial(n), n ** (n - 1)) * _tilde_t(j) ** s / n * coeff


def edgecut_fm(n: int, j: int, s: int, order: Optional[int] = None) -> Fraction:
    """E(falling(C_{n,j}, s)) for size-j subtrees discarded while isolating
    the root of a uniform rooted labelled tree on n nodes by random edge cuts.

    (s! n!/n^{n-1}) [z^n] T(z) * sum_{r=1}^{s} (1/r!) sum_{l1+...+lr=s}
    prod_q alpha_{j,lq}(z), with
    alpha_{j,l}(z) = T~_j^l \\int_0^z t^{jl-1} (1-T(t))^{-(l+1)} dt.

    Exact rational series evaluation; the composition sum is exponential in
    s (s is capped at 6) and the series work is O(n^2), so n beyond the
    truncation budget raises :class:`SeriesOrderExceededError` (use
    :func:`edgecut_fm_numeric` for large-n asymptotic checks).
    """
    if s < 0:
        raise ValueError("s >= 0 required")
    if s == 0:
        return Fraction(1)
    if not (1 <= j <= n - 1):
        raise ValueError("edgecut_fm needs 1 <= j <= n-1")
    if s > 6:
        raise ValueError("edgecut_fm composition sum capped at s <= 6")
    cap = order if order is not None else DEFAULT_ORDER
    if n > cap:
        raise SeriesOrderExceededError(f"edgecut_fm needs order >= n = {n}, have {cap}")
    if n - j * s < 0:
        return Fraction(0)
    t = tree_series(n)
    one_minus_t = TruncatedSeries.constant(1, n) - t
    alphas: Dict[int, TruncatedSeries] = {}
    for ell in range(1, s + 1):
        if j * ell - 1 > n:
            alphas[ell] = TruncatedSeries.constant(0, n)
            continue
        integrand = one_minus_t.neg_pow(ell + 1).shift(j * ell - 1)
        alphas[ell] = integrand.truncate(n - 1).integrate().scalar_mul(_tilde_t(j) ** ell)
    total = TruncatedSeries.constant(0, n)
    for parts in _compositions(s):
        prod = TruncatedSeries.constant(Fraction(1, math.factorial(len(parts))), n)
        for q in parts:
            prod = prod * alphas[q]
        total = total + prod
    coeff = (t * total).coeff(n)
    return Fraction(math.factorial(s) * math.factorial(n), n ** (n - 1)) * coeff


def _compositions(s: int):
    """All ordered compositions of s into positive parts."""
    if s == 0:
        yield ()
        return
    for first in range(1, s + 1):
        for rest in _compositions(s - first):
            yield (first,) + rest


def _poisson_partial_em(nmax: int) -> np.ndarray:
    """d_hat[m] = e^{-m} sum_{r=0}^{m} m^r / r! = e^{-m} [z^m](1-T)^{-2} for m >= 1.

    Hot double loop; accelerated by the kernels module when available.
    """
    from ._kernels import poisson_partial_em_array

    return poisson_partial_em_array(nmax)


def edgecut_fm_numeric(n: int, j: int, s: int = 1) -> float:
    """Float64 evaluation of edgecut_fm for first moments at large n.

    Uses the scaled coefficient sequence of (1-T)^{-2} (whose m-th entry is
    the Poisson(m) cdf at m, by Lagrange inversion) and the scaled tree
    coefficients, all O(n) after an O(n^2) kernel; relative accuracy ~1e-12,
    cross-checked against the exact route at moderate n in the tests.
    Implemented for s = 1, the order needed by the asymptotic validations.
    """
    if s != 1:
        raise ValueError("edgecut_fm_numeric implements s = 1 only")
    if not (1 <= j <= n - 1):
        raise ValueError("edgecut_fm_numeric needs 1 <= j <= n-1")
    dhat = _poisson_partial_em(n)  # dhat[m], 0 <= m <= n
    m = np.arange(1, n + 1, dtype=np.float64)
    # log of T~_k e^{-k} for k = 1..n
    log_that = (m - 1) * np.log(m) - _lgamma_array(n) - m
    that = np.exp(log_that)
    ks = np.arange(1, n - j + 1)
    total = float(np.sum(that[ks - 1] * dhat[n - ks - j] / (n - ks)))
    log_pref = math.lgamma(n + 1) + n - (n - 1) * math.log(n) + (j - 1) * math.log(j) - math.lgamma(j + 1) - j
    return math.exp(log_pref) * total


def _lgamma_array(n: int) -> np.ndarray:
    # lgamma(k+1) for k = 1..n
    return np.cumsum(np.log(np.arange(1, n + 1, dtype=np.float64)))


def parking_fm(n: int, j: int, s: int, order: Optional[int] = None) -> Fraction:
    """E(falling(X_{n,j}, s)) for initial-cluster increments of amount j in a
    uniform parking function of size n.

    Increments of a size-n parking function match the edge-cutting counts on
    rooted labelled trees of size n+1 (the forest bijection hangs the n-node
    forest under an extra root), so this delegates to edgecut_fm(n+1, j, s).
    The size-(n+1) convention is validated against exhaustive enumeration.
    """
    if not (1 <= j <= n):
        raise ValueError("parking_fm needs 1 <= j <= n")
    return edgecut_fm(n + 1, j, s, order=order)


def parking_fm_numeric(n: int, j: int, s: int = 1) -> float:
    return edgecut_fm_numeric(n + 1, j, s)


def bridge_fm(n: int, j: int, s: int) -> Fraction:
    """E(falling(X_{n,j}, s)) for returns-to-zero after excursions of length
    2j in a uniform bridge of 2n steps:

        s! 2^s D_j^s [z^{n-js}] (1-4z)^{-(s+1)/2} / C(2n, n),

    D_j = C(2(j-1), j-1)/j; the half-integer power is extracted by the
    product formula, so the value is exact at any n.
    """
    if not (1 <= j <= n) or s < 0:
        raise ValueError("bridge_fm needs 1 <= j <= n and s >= 0")
    if s == 0:
        return Fraction(1)
    if n - j * s < 0:
        return Fraction(0)
    dj = Fraction(math.comb(2 * (j - 1), j - 1), j)
    coeff = coeff_binom_4z(s + 1, 2, n - j * s)
    return Fraction(math.factorial(s) * 2**s) * dj**s * coeff / math.comb(2 * n, n)


def scale_lambda(model: ModelSpec) -> ScaleInfo:
    """Scale parameter lambda, limiting mixing law, and regime for a model.

    Regime thresholds: lambda <= 0.1 reads as the degenerate phase,
    lambda >= 10 as the to-infinity phase, in between as finite-rho.
    """
    tag = model.tag
    p = model.params
    n = int(model.get("n"))
    if tag == "blocks":
        k = int(model.get("k"))
        ell = int(model.get("ell"))
        lam = float(gen_binomial(ell - 1 - Fraction(1, k), ell - 1)) / (k * ell) * n ** (1.0 / k)
        return ScaleInfo(lam, mixlaws.block_law(k), _regime(lam))
    if tag == "dimurn":
        m = int(model.get("m"))
        alpha = int(model.get("alpha", 1))
        delta = int(model.get("delta", 1))
        lam = n / m ** (alpha / delta)
        return ScaleInfo(lam, mixlaws.weibull(Fraction(delta, alpha)), _regime(lam))
    if tag == "descendants":
        j = int(model.get("j"))
        r = family_ratio(str(p.get("family", "rect")), p.get("alpha", 1), int(p.get("d", 2)))
        lam = (n - j) / j
        return ScaleInfo(lam, mixlaws.gamma(1 + r, 1), _regime(lam))
    if tag == "nodedeg":
        j = int(model.get("j"))
        alpha = model.get("alpha", 1)
        lam = (n / j) ** (1.0 / (float(alpha) + 1)) - 1
        return ScaleInfo(lam, mixlaws.gamma(alpha, 1), _regime(lam))
    if tag == "branches":
        j = int(model.get("j"))
        k = int(model.get("k"))
        alpha = model.get("alpha", 1)
        a = Fraction(alpha)
        lam = n ** float(1 / (a + 1)) * float(gen_binomial(k - 1 - 1 / (1 + a), k - 1) / ((a + 1) * k))
        return ScaleInfo(lam, mixlaws.branch_law(j, alpha), _regime(lam))
    if tag == "crp":
        j = int(model.get("j"))
        alpha, beta = crp_params(model.get("a"), model.get("theta"))
        a = Fraction(alpha)
        lam = n ** float(1 / (a + 1)) * float(gen_binomial(j - 1 - 1 / (1 + a), j - 1) / ((a + 1) * j))
        return ScaleInfo(lam, mixlaws.crp_law(alpha, beta), _regime(lam))
    if tag == "triangular":
        w0 = int(model.get("w0"))
        b0 = int(model.get("b0"))
        alpha = int(model.get("alpha"))
        beta = int(model.get("beta"))
        g = alpha + beta
        lam = ((n + b0 / g) / (b0 / g)) ** (alpha / g) - 1 if b0 > 0 else math.inf
        return ScaleInfo(lam, mixlaws.gamma(Fraction(w0, alpha), 1), _regime(lam))
    if tag == "inversions":
        j = int(model.get("j"))
        kappa = float(model.get("kappa"))
        lam = (n - j) / math.sqrt(kappa * n)
        return ScaleInfo(lam, mixlaws.rayleigh(1), _regime(lam))
    if tag in ("records", "edgecut", "parking", "mapping"):
        j = int(model.get("j"))
        lam = math.sqrt(n) * math.exp((j - 1) * math.log(j) - math.lgamma(j + 1) - j)
        return ScaleInfo(lam, mixlaws.rayleigh(1), _regime(lam))
    if tag == "bridge":
        j = int(model.get("j"))
        lam = 2 * math.sqrt(2.0) * math.comb(2 * (j - 1), j - 1) * math.sqrt(n) / (j * 4.0**j)
        return ScaleInfo(lam, mixlaws.rayleigh(1), _regime(lam))
    raise UnknownModelError(f"no scale information for model {tag!r}")
