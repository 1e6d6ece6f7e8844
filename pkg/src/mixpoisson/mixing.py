"""Catalog of mixing distributions.

A :class:`MixingLaw` carries a power-moment sequence and, where available,
a density on [0, inf) and a moment generating function with an explicit
convergence region.  Laws whose moments are rational numbers keep them as
exact Fractions; that exactness is what lets the PMF series evaluator
resum divergent-looking tails without roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, NamedTuple, Optional, Union

from .errors import DensityUnavailableError, MgfRegionError
from .numerics import adaptive_quad, rising, stirling2
from .transforms import MomentSeq

Number = Union[int, Fraction, float]

__all__ = [
    "MixingLaw",
    "degenerate",
    "gamma",
    "rayleigh",
    "weibull",
    "poisson",
    "block_law",
    "branch_law",
    "crp_law",
    "from_moments",
    "law_moment",
    "law_density",
    "law_mgf",
    "carleman_partial_sum",
    "CarlemanDiagnostic",
]


@dataclass(frozen=True)
class MixingLaw:
    """A non-negative mixing distribution X described by its power moments."""

    name: str
    family: str
    moments: MomentSeq
    params: Dict[str, Number] = field(default_factory=dict)
    density: Optional[Callable[[float], float]] = None
    mgf: Optional[Callable[[float], float]] = None
    determinate: bool = True
    rational: bool = False  # True when every moment is an exact Fraction
    density_zero_exponent: float = 0.0  # density ~ x^e near 0 (quadrature substitution hint)

    def moment(self, s: int) -> Number:
        return self.moments(s)

    def check_invariants(self, upto: int = 10) -> None:
        """Non-negativity and log-convexity (Hölder) of the moment sequence."""
        mu = [1] + [self.moments(s) for s in range(1, upto + 1)]
        for s in range(1, upto + 1):
            if mu[s] < 0:
                raise ValueError(f"{self.name}: negative moment at s={s}")
        for s in range(1, upto):
            if mu[s] ** 2 > mu[s - 1] * mu[s + 1] * (1 + 1e-12):
                raise ValueError(f"{self.name}: log-convexity fails at s={s}")


def _moment_series_mgf(moments: MomentSeq, name: str) -> Callable[[float], float]:
    """MGF via sum mu_s z^s / s!; guards against visible divergence."""

    def mgf(z: float) -> float:
        total = 1.0
        term_prev = abs(z) if z else 0.0
        growth = 0
        for s in range(1, 400):
            term = float(moments(s)) * z**s / math.factorial(s)
            total += term
            a = abs(term)
            if a < 1e-17 * abs(total) and s > 4:
                return total
            growth = growth + 1 if a > term_prev else 0
            if growth >= 30:
                raise MgfRegionError(f"{name}: moment series for mgf diverges at z={z}")
            term_prev = a
        return total

    return mgf


def degenerate(c: Number) -> MixingLaw:
    """Point mass at c >= 0; MPo(rho * X) is then the ordinary Poisson(rho c)."""
    if c < 0:
        raise ValueError("degenerate mixing needs c >= 0")
    cf = Fraction(c) if isinstance(c, (int, Fraction)) else c
    rational = isinstance(cf, Fraction)
    mom = MomentSeq("power", lambda s: cf**s)
    return MixingLaw(
        name=f"degenerate({c})",
        family="degenerate",
        moments=mom,
        params={"c": cf},
        density=None,
        mgf=lambda z: math.exp(float(cf) * z),
        determinate=True,
        rational=rational,
    )


def gamma(r: Number, theta: Number) -> MixingLaw:
    """Gamma(shape r, scale theta): mu_s = theta^s Gamma(r+s)/Gamma(r)."""
    if r <= 0 or theta <= 0:
        raise ValueError("gamma mixing needs r > 0 and theta > 0")
    rational = isinstance(r, (int, Fraction)) and isinstance(theta, (int, Fraction))
    if rational:
        rf, tf = Fraction(r), Fraction(theta)
        mom = MomentSeq("power", lambda s: tf**s * rising(rf, s))
    else:
        mom = MomentSeq("power", lambda s: float(theta) ** s * math.exp(math.lgamma(float(r) + s) - math.lgamma(float(r))))
    rflt, tflt = float(r), float(theta)

    def dens(x: float) -> float:
        if x < 0:
            return 0.0
        if x == 0.0:
            return 0.0 if rflt > 1 else (1.0 / tflt if rflt == 1 else math.inf)
        return math.exp((rflt - 1) * math.log(x) - x / tflt - rflt * math.log(tflt) - math.lgamma(rflt))

    def mgf(z: float) -> float:
        if z >= 1.0 / tflt:
            raise MgfRegionError(f"gamma mgf needs z < 1/theta = {1.0 / tflt}")
        return (1.0 - tflt * z) ** (-rflt)

    return MixingLaw(
        name=f"gamma({r},{theta})",
        family="gamma",
        moments=mom,
        params={"r": r, "theta": theta},
        density=dens,
        mgf=mgf,
        determinate=True,
        rational=rational,
        density_zero_exponent=float(r) - 1.0,
    )


def rayleigh(sigma: Number = 1) -> MixingLaw:
    """Rayleigh(sigma): density (x/sigma^2) e^{-x^2/(2 sigma^2)}, mu_s = sigma^s 2^{s/2} Gamma(s/2+1)."""
    if sigma <= 0:
        raise ValueError("rayleigh mixing needs sigma > 0")
    sg = float(sigma)
    mom = MomentSeq("power", lambda s: sg**s * 2 ** (s / 2.0) * math.exp(math.lgamma(s / 2.0 + 1)))

    def dens(x: float) -> float:
        if x < 0:
            return 0.0
        return (x / sg**2) * math.exp(-(x * x) / (2 * sg**2))

    def mgf(z: float) -> float:
        u = sg * z
        return 1.0 + u * math.exp(u * u / 2.0) * math.sqrt(math.pi / 2.0) * (1.0 + math.erf(u / math.sqrt(2.0)))

    return MixingLaw(
        name=f"rayleigh({sigma})",
        family="rayleigh",
        moments=mom,
        params={"sigma": sigma},
        density=dens,
        mgf=mgf,
        determinate=True,
        rational=False,
        density_zero_exponent=1.0,
    )


def weibull(shape: Number) -> MixingLaw:
    """Weibull with shape w = delta/alpha and scale 1: mu_s = Gamma(1 + s/w).

    The moment sequence determines a unique law only for 1/w <= 2; the
    ``determinate`` flag records that boundary.
    """
    if shape <= 0:
        raise ValueError("weibull mixing needs shape > 0")
    w = Fraction(shape) if isinstance(shape, (int, Fraction)) else shape
    inv = 1 / w if isinstance(w, Fraction) else 1.0 / w
    rational = isinstance(w, Fraction) and (1 / w).denominator == 1
    if rational:
        m = int(1 / w)
        mom = MomentSeq("power", lambda s: Fraction(math.factorial(m * s)))
    else:
        mom = MomentSeq("power", lambda s: math.exp(math.lgamma(1.0 + s * float(inv))))
    wf = float(w)

    def dens(x: float) -> float:
        if x < 0:
            return 0.0
        if x == 0.0:
            return wf if wf == 1.0 else (0.0 if wf > 1 else math.inf)
        return wf * x ** (wf - 1) * math.exp(-(x**wf))

    def mgf(z: float) -> float:
        if z == 0.0:
            return 1.0
        if wf == 1.0:
            if z >= 1.0:
                raise MgfRegionError("exponential mgf needs z < 1")
            return 1.0 / (1.0 - z)
        if wf > 1.0:
            return _moment_series_mgf(mom, "weibull")(z)
        if z < 0.0:
            # substitute u = t^w: the integrand e^{z u^{1/w}} e^{-u} is
            # smooth at 0 (the raw density diverges there for shape < 1)
            upper = 1.0
            while upper - z * upper ** (1.0 / wf) < 60.0:
                upper *= 2.0
            return adaptive_quad(lambda u: math.exp(z * u ** (1.0 / wf) - u), 0.0, upper, 1e-13)
        raise MgfRegionError("weibull mgf with shape < 1 exists only for z <= 0")

    return MixingLaw(
        name=f"weibull({shape})",
        family="weibull",
        moments=mom,
        params={"shape": w},
        density=dens,
        mgf=mgf,
        determinate=float(inv) <= 2.0 + 1e-15,
        rational=rational,
        density_zero_exponent=wf - 1.0,
    )


def poisson(lam: Number) -> MixingLaw:
    """Poisson(lambda) mixing (Neyman type A when mixed): mu_s = Touchard polynomial T_s(lambda)."""
    if lam <= 0:
        raise ValueError("poisson mixing needs lambda > 0")
    rational = isinstance(lam, (int, Fraction))
    lf = Fraction(lam) if rational else float(lam)
    mom = MomentSeq("power", lambda s: sum(stirling2(s, k) * lf**k for k in range(1, s + 1)))
    return MixingLaw(
        name=f"poisson({lam})",
        family="poisson",
        moments=mom,
        params={"lam": lf},
        density=None,
        mgf=lambda z: math.exp(float(lf) * (math.exp(z) - 1.0)),
        determinate=True,
        rational=rational,
    )


def block_law(k: int) -> MixingLaw:
    """Limit law for counts of maximal equal-endpoint blocks: mu_s = (s+1)! Gamma(1+1/k)/Gamma(1+(s+1)/k)."""
    if k < 1:
        raise ValueError("block_law needs k >= 1")
    mom = MomentSeq(
        "power",
        lambda s: math.exp(math.lgamma(s + 2) + math.lgamma(1 + 1.0 / k) - math.lgamma(1 + (s + 1.0) / k)),
    )
    return MixingLaw(
        name=f"block_law({k})",
        family="block",
        moments=mom,
        params={"k": k},
        density=lambda x: _block_density(k, x),
        mgf=_moment_series_mgf(mom, f"block_law({k})"),
        determinate=True,
        rational=False,
        density_zero_exponent=1.0,
    )


def _block_density(k: int, x: float, rel_cutoff: float = 1e-16) -> float:
    """Density of the block law by its alternating power series.

    f(x) = (Gamma(1/k)/pi) sum_{j>=1} (-1)^{j-1} Gamma(j/k+1) sin(j pi/k) x^j / j!

    Terms are grouped by residue r = j mod k: within a class,
    Gamma(j/k+1) = Gamma(1+r/k) * (rational), and sin(j pi /k) =
    (-1)^q sin(r pi/k), so each class is an exact rational series times a
    single Gamma constant.  Summing the rational parts exactly avoids the
    catastrophic float cancellation the raw series shows for x beyond ~6.
    Each class stops once three consecutive terms fall below
    ``rel_cutoff`` times the running partial sum (empirical policy; the
    series converges for every x but no a-priori radius is asserted).
    """
    if x < 0:
        return 0.0
    if x == 0.0:
        return 0.0
    if k == 1:
        # sin(j*pi) = 0 for every term: the law is degenerate at 1.
        return 0.0
    xf = Fraction(x)
    class_sums = [Fraction(0)] * k  # index r = j mod k, r = 0 class is killed by sin
    for r in range(1, k):
        if math.sin(r * math.pi / k) == 0.0:
            continue
        total = Fraction(0)
        # rational part of Gamma(j/k+1)/Gamma(1+r/k) for j = q*k + r is
        # rising(1 + r/k, q) read off iteratively.
        rat = Fraction(1)
        power = xf**r
        fact_arg = r
        fact = Fraction(math.factorial(r))
        small = 0
        q = 0
        while True:
            j = q * k + r
            sign = (-1) ** (j - 1) * (-1) ** q
            term = sign * rat * power / fact
            total += term
            if abs(float(term)) < rel_cutoff * max(abs(float(total)), 1e-300):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            rat *= Fraction(j + k, k)  # (j/k + 1) with j advanced by k next round
            power *= xf**k
            for i in range(fact_arg + 1, fact_arg + k + 1):
                fact *= i
            fact_arg += k
            q += 1
            if q > 100000:
                raise RuntimeError("block density series failed to converge")
        class_sums[r] = total
    out = 0.0
    for r in range(1, k):
        s = math.sin(r * math.pi / k)
        if s != 0.0 and class_sums[r]:
            out += s * math.exp(math.lgamma(1 + r / k)) * float(class_sums[r])
    return math.exp(math.lgamma(1.0 / k)) / math.pi * out


def branch_law(j: int, alpha: Number) -> MixingLaw:
    """Limit law for counts of fixed-size branches at node j (plane recursive trees).

    mu_s = Gamma(s+alpha) Gamma(j - 1/(alpha+1)) / (Gamma(alpha) Gamma(j + (s-1)/(alpha+1))).
    Moment-only: no density or closed-form MGF is claimed.
    """
    if j < 1 or alpha <= 0:
        raise ValueError("branch_law needs j >= 1 and alpha > 0")
    a = float(alpha)
    mom = MomentSeq(
        "power",
        lambda s: math.exp(
            math.lgamma(s + a) + math.lgamma(j - 1 / (a + 1)) - math.lgamma(a) - math.lgamma(j + (s - 1) / (a + 1))
        ),
    )
    return MixingLaw(
        name=f"branch_law({j},{alpha})",
        family="branch",
        moments=mom,
        params={"j": j, "alpha": alpha},
        density=None,
        mgf=_moment_series_mgf(mom, f"branch_law({j},{alpha})"),
        determinate=True,
        rational=False,
    )


def crp_law(alpha: Number, beta: Number) -> MixingLaw:
    """Limit law for table-size counts in the Chinese restaurant process.

    mu_s = Gamma(s+beta) Gamma(beta/(alpha+1)) / (Gamma(beta) Gamma((beta+s)/(alpha+1))).
    Moment-only.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("crp_law needs alpha > 0 and beta > 0")
    a, b = float(alpha), float(beta)
    mom = MomentSeq(
        "power",
        lambda s: math.exp(
            math.lgamma(s + b) + math.lgamma(b / (a + 1)) - math.lgamma(b) - math.lgamma((b + s) / (a + 1))
        ),
    )
    return MixingLaw(
        name=f"crp_law({alpha},{beta})",
        family="crp",
        moments=mom,
        params={"alpha": alpha, "beta": beta},
        density=None,
        mgf=_moment_series_mgf(mom, f"crp_law({alpha},{beta})"),
        determinate=True,
        rational=False,
    )


def from_moments(eval_fn: Callable[[int], Number], name: str = "custom", rational: bool = False) -> MixingLaw:
    """Escape hatch: a law given only by its power-moment sequence."""
    mom = MomentSeq("power", eval_fn)
    return MixingLaw(
        name=name,
        family="custom",
        moments=mom,
        density=None,
        mgf=_moment_series_mgf(mom, name),
        determinate=True,
        rational=rational,
    )


def law_moment(law: MixingLaw, s: int) -> Number:
    """s-th power moment of the mixing law (exact Fraction when available)."""
    if s < 1:
        raise ValueError("law_moment needs s >= 1")
    return law.moments(s)


def law_density(law: MixingLaw, x: float) -> float:
    if law.density is None:
        raise DensityUnavailableError(f"{law.name} is moment-only (no density)")
    if x < 0:
        raise ValueError("densities live on [0, inf)")
    return law.density(x)


def law_mgf(law: MixingLaw, z: float) -> float:
    if law.mgf is None:
        raise MgfRegionError(f"{law.name} has no usable mgf")
    return law.mgf(z)


class CarlemanDiagnostic(NamedTuple):
    partial_sum: float
    last_increment: float


def carleman_partial_sum(law: MixingLaw, terms: int) -> CarlemanDiagnostic:
    """Partial sum sum_{s<=S} mu_{2s}^{-1/(2s)} plus its last increment.

    Purely diagnostic: divergence (Carleman's sufficient condition for
    moment determinacy) is never decided here, only reported.
    """
    if terms < 1:
        raise ValueError("carleman_partial_sum needs at least one term")
    total = 0.0
    inc = 0.0
    for s in range(1, terms + 1):
        mu = float(law.moments(2 * s))
        inc = mu ** (-1.0 / (2 * s))
        total += inc
    return CarlemanDiagnostic(total, inc)
