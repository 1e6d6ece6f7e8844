"""The mixed Poisson distribution engine for Y = MPo(rho * X).

Three independent PMF routes are exposed so they can cross-check each
other: the alternating moment series, adaptive quadrature against the
mixing density, and per-family closed forms.  Factorial moments are the
scaled power moments of the mixing law, exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

from .errors import DensityUnavailableError, NoClosedFormError, SeriesDivergenceError
from .mixing import MixingLaw, law_mgf
from .numerics import adaptive_quad, gen_binomial, regularized_gamma_q, stirling2

Number = Union[int, Fraction, float]

__all__ = [
    "MixedPoissonSpec",
    "mp_factorial_moment",
    "mp_power_moment",
    "mp_pmf_series",
    "mp_pmf_quadrature",
    "mp_pmf_closed",
    "mp_pmf",
    "mp_mgf",
    "mp_convolve",
    "ConvolvedMixedPoisson",
    "mp_pmf_normalization",
]

_REL_STOP = 1e-15
_STOP_RUN = 5
_GROW_RUN = 30


@dataclass(frozen=True)
class MixedPoissonSpec:
    """The pair (mixing law X, scale rho > 0) denoting MPo(rho X).

    rho = 0 is rejected; the degenerate boundary is expressed explicitly
    with a point-mass mixing law instead.
    """

    mixing: MixingLaw
    rho: Number

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise ValueError("rho must be > 0; use a degenerate mixing law for the boundary case")

    @property
    def exact(self) -> bool:
        return self.mixing.rational and isinstance(self.rho, (int, Fraction))


def mp_factorial_moment(spec: MixedPoissonSpec, s: int) -> Number:
    """E(falling(Y, s)) = rho^s * mu_s, exact restatement of the defining identity."""
    if s < 1:
        raise ValueError("s >= 1 required")
    return spec.rho**s * spec.mixing.moments(s)


def mp_power_moment(spec: MixedPoissonSpec, s: int) -> Number:
    """E(Y^s) = sum_j S(s,j) rho^j mu_j (generalized Stirling transform)."""
    if s < 1:
        raise ValueError("s >= 1 required")
    return sum(stirling2(s, j) * spec.rho**j * spec.mixing.moments(j) for j in range(1, s + 1))


def _euler_sum_exact(term_fn, count: int) -> float:
    """Euler-transform resummation of the alternating series sum_i term_fn(i).

    Works on exact rationals, so the wild intermediate growth of a
    divergent-looking alternating series (e.g. Gamma mixing at rho >= 1)
    cancels without roundoff.  The transform converges whenever the term
    magnitude ratio settles below 3 in absolute value; a sustained growth
    streak of the transformed contributions signals genuine failure
    (moment sequences growing faster than any geometric rate).
    """

    def _float_log(x: Fraction) -> float:
        # log |x| robust to Fractions far outside float range
        if not x:
            return -math.inf
        n, d = abs(x.numerator), x.denominator
        return (math.log2(n) - math.log2(d)) / math.log2(math.e)

    n_terms = max(count, 192)
    while True:
        mags = [abs(term_fn(i)) for i in range(n_terms)]
        # Euler summability pre-check on the tail ratio.
        ratios = [float(mags[i + 1] / mags[i]) for i in range(n_terms - 6, n_terms - 1) if mags[i]]
        if ratios and min(ratios) > 2.9:
            raise SeriesDivergenceError("PMF series is not Euler summable (term ratio beyond the transform's reach)")
        diffs = list(mags)
        total = Fraction(0)
        half = Fraction(1, 2)
        small = 0
        grow = 0
        prev = math.inf
        for m in range(n_terms - 1):
            contrib = diffs[0] * half ** (m + 1) * (-1) ** m
            total += contrib
            c = _float_log(contrib)
            tot = _float_log(total)
            if c < math.log(1e-17) + max(tot, math.log(1e-300)):
                small += 1
                if small >= 3:
                    return float(total)
            else:
                small = 0
            grow = grow + 1 if c > prev else 0
            if grow >= 60:
                raise SeriesDivergenceError("Euler resummation of the PMF series diverged")
            prev = c
            diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
        if n_terms >= 1536:
            raise SeriesDivergenceError("Euler resummation of the PMF series did not converge")
        n_terms *= 2


def mp_pmf_series(spec: MixedPoissonSpec, ell: int) -> float:
    """P{Y = ell} by the alternating moment series sum_{s>=ell} (-1)^{s-ell} C(s,ell) mu_s rho^s / s!.

    Plain (Kahan-compensated) summation with the stop rule "five
    consecutive terms below 1e-15 of the running value, while terms
    decrease".  If term magnitudes grow for thirty consecutive indices the
    raw series is hopeless; for laws with exact rational moments the sum
    is then re-evaluated by an exact Euler transform (the series is Euler
    summable precisely when the mixing MGF exists at -rho), otherwise a
    :class:`SeriesDivergenceError` is raised.
    """
    if ell < 0:
        raise ValueError("ell >= 0 required")
    if spec.exact:
        return _pmf_series_exact(spec, ell)
    acc = 0.0
    comp = 0.0
    prev_mag = math.inf
    grow = 0
    small = 0
    rho = float(spec.rho)
    binom = 1.0  # C(s, ell), updated multiplicatively
    for i in range(100000):
        s = ell + i
        mu = 1.0 if s == 0 else float(spec.mixing.moments(s))
        if s < 170:
            mag = binom * mu * rho**s / math.factorial(s)
        else:
            mag = binom * mu * math.exp(s * math.log(rho) - math.lgamma(s + 1))
        t = mag if i % 2 == 0 else -mag
        y = t - comp
        new = acc + y
        comp = (new - acc) - y
        acc = new
        if mag < _REL_STOP * max(abs(acc), 1e-300) and mag <= prev_mag:
            small += 1
            if small >= _STOP_RUN:
                return min(max(acc, 0.0), 1.0)
        else:
            small = 0
        grow = grow + 1 if mag > prev_mag else 0
        if grow >= _GROW_RUN:
            raise SeriesDivergenceError(
                f"PMF series terms grew for {_GROW_RUN} consecutive indices (law {spec.mixing.name}, rho={rho})"
            )
        prev_mag = mag
        binom *= (s + 1) / (s + 1 - ell)
    raise SeriesDivergenceError("PMF series did not converge within 100000 terms")


def _pmf_series_exact(spec: MixedPoissonSpec, ell: int) -> float:
    rho = Fraction(spec.rho)

    def term(i: int) -> Fraction:
        si = ell + i
        mu_i = Fraction(1) if si == 0 else Fraction(spec.mixing.moments(si))
        return (-1) ** i * gen_binomial(Fraction(si), ell) * mu_i * rho**si / math.factorial(si)

    acc = Fraction(0)
    prev_mag = math.inf
    grow = 0
    small = 0
    for i in range(2000):
        t = term(i)
        acc += t
        mag = abs(float(t))
        if mag < _REL_STOP * max(abs(float(acc)), 1e-300) and mag <= prev_mag:
            small += 1
            if small >= _STOP_RUN:
                return min(max(float(acc), 0.0), 1.0)
        else:
            small = 0
        # Non-decreasing magnitudes signal a tail the plain sum cannot
        # settle; the exact Euler transform agrees with the plain sum
        # whenever the latter converges, so a false trigger is harmless.
        grow = grow + 1 if mag >= prev_mag else 0
        if grow >= _GROW_RUN:
            return min(max(_euler_sum_exact(term, 4 * (i + 1)), 0.0), 1.0)
        prev_mag = mag
    return min(max(_euler_sum_exact(term, 512), 0.0), 1.0)


def mp_pmf_quadrature(spec: MixedPoissonSpec, ell: int) -> float:
    """P{Y = ell} = (rho^ell / ell!) \\int x^ell e^{-rho x} dLambda(x) by adaptive quadrature.

    The Poisson kernel is folded into the integrand in log space, so large
    ell cannot overflow.  The upper endpoint doubles until the integrand
    there is below 1e-16 of the peak value.
    """
    if ell < 0:
        raise ValueError("ell >= 0 required")
    if spec.mixing.density is None:
        raise DensityUnavailableError(f"{spec.mixing.name} has no density; use the series route")
    rho = float(spec.rho)
    dens = spec.mixing.density
    lgell = math.lgamma(ell + 1)

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        f = dens(x)
        if f <= 0.0:
            return 0.0
        return f * math.exp(ell * math.log(rho * x) - rho * x - lgell)

    peak_x = max((ell + 1) / rho, 1.0)
    peak = max(integrand(peak_x), max(integrand(0.25 * k * peak_x) for k in range(1, 9)), 1e-300)
    upper = peak_x
    while integrand(upper) > 1e-16 * peak:
        upper *= 2.0
    # densities with an integrable singularity at 0 (x^e, e < 0) defeat the
    # Richardson assumption of adaptive Simpson; substitute x = u^8, which
    # makes the transformed integrand smooth for every e >= -1/2
    if spec.mixing.density_zero_exponent + ell < 0:
        p = 8.0
        value = adaptive_quad(lambda u: integrand(u**p) * p * u ** (p - 1.0), 0.0, upper ** (1.0 / p), 1e-13)
    else:
        value = adaptive_quad(integrand, 0.0, upper, 1e-13)
    return min(max(value, 0.0), 1.0)


def _signed_logsumexp(logs: List[float], signs: List[int]) -> float:
    m = max(logs)
    if m == -math.inf:
        return 0.0
    return math.exp(m) * sum(sg * math.exp(lg - m) for lg, sg in zip(logs, signs))


def mp_pmf_closed(spec: MixedPoissonSpec, ell: int) -> float:
    """Closed-form PMF for the degenerate / gamma / rayleigh / poisson / weibull families."""
    if ell < 0:
        raise ValueError("ell >= 0 required")
    law = spec.mixing
    rho = float(spec.rho)
    fam = law.family
    if fam == "degenerate":
        c = float(law.params["c"])
        rate = rho * c
        if rate == 0.0:
            return 1.0 if ell == 0 else 0.0
        return math.exp(ell * math.log(rate) - rate - math.lgamma(ell + 1))
    if fam == "gamma":
        r = float(law.params["r"])
        theta = float(law.params["theta"])
        p = rho * theta / (1.0 + rho * theta)
        return math.exp(
            math.lgamma(ell + r) - math.lgamma(ell + 1) - math.lgamma(r) + ell * math.log(p) + r * math.log1p(-p)
        )
    if fam == "rayleigh":
        return _poisson_rayleigh_pmf(rho * float(law.params["sigma"]), ell)
    if fam == "poisson":
        lam = float(law.params["lam"])
        x = lam * math.exp(-rho)
        logs = []
        for j in range(ell + 1):
            s2 = stirling2(ell, j)
            if s2:
                logs.append(math.log(s2) + j * math.log(x))
        inner = _signed_logsumexp(logs, [1] * len(logs)) if logs else (1.0 if ell == 0 else 0.0)
        return math.exp(ell * math.log(rho) - math.lgamma(ell + 1) - lam + x) * inner
    if fam == "weibull":
        return _weibull_mix_pmf(spec, ell)
    raise NoClosedFormError(f"no closed-form PMF for mixing family {fam!r}")


def _poisson_rayleigh_pmf(rho: float, ell: int) -> float:
    """Poisson-Rayleigh PMF via the incomplete-gamma representation.

    P{Y=l} = (rho^l / l!) e^{rho^2/2} sum_{i=0}^{l+1} C(l+1,i) (-rho)^{l+1-i}
             2^{(i-1)/2} Gamma((i+1)/2, rho^2/2).

    Summed in log space (signs split out) to keep the huge binomial terms
    from overflowing; the final cancellation is benign because the
    prefactor rho^l/l! is tiny exactly when the terms are large.
    """
    half = rho * rho / 2.0
    logs: List[float] = []
    signs: List[int] = []
    for i in range(ell + 2):
        q = regularized_gamma_q((i + 1) / 2.0, half)
        if q <= 0.0:
            continue
        lg = (
            math.lgamma(ell + 2)
            - math.lgamma(i + 1)
            - math.lgamma(ell + 2 - i)
            + (ell + 1 - i) * math.log(rho)
            + ((i - 1) / 2.0) * math.log(2.0)
            + math.lgamma((i + 1) / 2.0)
            + math.log(q)
        )
        logs.append(lg)
        signs.append(1 if (ell + 1 - i) % 2 == 0 else -1)
    total = _signed_logsumexp(logs, signs)
    return max(total * math.exp(ell * math.log(rho) - math.lgamma(ell + 1) + half), 0.0)


def _weibull_mix_pmf(spec: MixedPoissonSpec, ell: int) -> float:
    """Three-regime closed form for Weibull mixing with shape w = delta/alpha.

    ratio a/d := 1/w.  For a/d < 1 the moment series converges outright;
    a/d = 1 is exactly geometric; a/d > 1 has the dual expansion in
    negative powers of rho.
    """
    w = float(spec.mixing.params["shape"])
    rho = float(spec.rho)
    ratio = 1.0 / w
    if ratio == 1.0:
        p = rho / (1.0 + rho)
        return (1.0 - p) * p**ell
    if ratio < 1.0:
        total = 0.0
        comp = 0.0
        small = 0
        for j in range(ell, 100000):
            t = (
                (-1) ** (j - ell)
                * math.exp(
                    math.lgamma(j + 1)
                    - math.lgamma(ell + 1)
                    - math.lgamma(j - ell + 1)
                    + math.lgamma(1 + ratio * j)
                    - math.lgamma(j + 1)
                    + j * math.log(rho)
                )
            )
            y = t - comp
            new = total + y
            comp = (new - total) - y
            total = new
            if abs(t) < 1e-16 * max(abs(total), 1e-300):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        return min(max(total, 0.0), 1.0)
    total = 0.0
    small = 0
    for j in range(0, 100000):
        t = (-1) ** j * math.exp(
            math.lgamma(j + ell + 1)
            - math.lgamma(j + 1)
            - math.lgamma(ell + 1)
            - w * (j + 1) * math.log(rho)
            + math.lgamma(w * (j + 1) + ell)
            - math.lgamma(j + ell + 1)
        )
        total += t
        if abs(t) < 1e-16 * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return min(max(w * total, 0.0), 1.0)


def mp_pmf(spec: MixedPoissonSpec, ell: int) -> float:
    """Default PMF policy: closed form when available, else the series for
    rho <= 1, else quadrature, else the (Euler-capable) series."""
    try:
        return mp_pmf_closed(spec, ell)
    except NoClosedFormError:
        pass
    if float(spec.rho) <= 1.0:
        try:
            return mp_pmf_series(spec, ell)
        except SeriesDivergenceError:
            if spec.mixing.density is not None:
                return mp_pmf_quadrature(spec, ell)
            raise
    if spec.mixing.density is not None:
        return mp_pmf_quadrature(spec, ell)
    return mp_pmf_series(spec, ell)


def mp_mgf(spec: MixedPoissonSpec, z: float) -> float:
    """E(e^{zY}) = psi(rho (e^z - 1)) where psi is the mixing MGF."""
    return law_mgf(spec.mixing, float(spec.rho) * (math.exp(z) - 1.0))


@dataclass(frozen=True)
class ConvolvedMixedPoisson:
    """Sum of two independent mixed Poissons: again mixed Poisson with
    mixing rho1 X1 + rho2 X2 (and scale 1)."""

    first: MixedPoissonSpec
    second: MixedPoissonSpec

    def mixing_power_moment(self, s: int) -> Number:
        """Moments of rho1 X1 + rho2 X2 by binomial convolution of scaled moments."""
        if s < 0:
            raise ValueError("s >= 0 required")
        if s == 0:
            return 1
        total: Number = 0
        for i in range(s + 1):
            m1 = 1 if i == 0 else self.first.rho**i * self.first.mixing.moments(i)
            m2 = 1 if s - i == 0 else self.second.rho ** (s - i) * self.second.mixing.moments(s - i)
            total = total + gen_binomial(s, i) * m1 * m2
        return total

    def factorial_moment(self, s: int) -> Number:
        return self.mixing_power_moment(s)

    def pmf(self, ell: int) -> float:
        """Discrete convolution of the component PMFs."""
        return sum(mp_pmf(self.first, i) * mp_pmf(self.second, ell - i) for i in range(ell + 1))

    def spec(self) -> MixedPoissonSpec:
        from .mixing import from_moments

        rational = self.first.exact and self.second.exact
        return MixedPoissonSpec(
            from_moments(lambda s: self.mixing_power_moment(s), name="convolved", rational=rational),
            Fraction(1) if rational else 1.0,
        )


def mp_convolve(spec1: MixedPoissonSpec, spec2: MixedPoissonSpec) -> ConvolvedMixedPoisson:
    """Convolution of independent mixed Poisson laws (Y1 + Y2)."""
    return ConvolvedMixedPoisson(spec1, spec2)


def mp_pmf_normalization(spec: MixedPoissonSpec, upto: int) -> float:
    """sum_{ell <= L} P{Y = ell}; tail diagnostic, non-decreasing in L."""
    if upto < 0:
        raise ValueError("L >= 0 required")
    return sum(mp_pmf(spec, ell) for ell in range(upto + 1))
