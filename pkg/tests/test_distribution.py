import cmath
import math
from fractions import Fraction as F

import pytest

from mixpoisson.distribution import (
    MixedPoissonSpec,
    mp_convolve,
    mp_factorial_moment,
    mp_mgf,
    mp_pmf,
    mp_pmf_closed,
    mp_pmf_normalization,
    mp_pmf_quadrature,
    mp_pmf_series,
    mp_power_moment,
)
from mixpoisson.errors import (
    DensityUnavailableError,
    MgfRegionError,
    NoClosedFormError,
    SeriesDivergenceError,
)
from mixpoisson.mixing import block_law, degenerate, gamma, poisson, rayleigh, weibull
from mixpoisson.numerics import falling

RAYLEIGH_RHO1_P0 = 0.34432045758120144  # int_0^inf x e^{-x-x^2/2} dx, four independent routes agree


class TestMoments:
    def test_factorial_moments_are_scaled_power_moments(self):
        sp = MixedPoissonSpec(rayleigh(1), 0.7)
        assert abs(mp_factorial_moment(sp, 2) - 2 * 0.7**2) < 1e-13
        spd = MixedPoissonSpec(degenerate(F(1)), F(3, 2))
        for s in range(1, 6):
            assert mp_factorial_moment(spd, s) == F(3, 2) ** s
        spg = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        assert mp_factorial_moment(spg, 3) == 6

    def test_scaled_moment_identity_exact(self):
        # mp_factorial_moment(spec, s)/rho^s == mu_s for every rho
        for rho in (F(1, 3), F(2), F(17, 5)):
            sp = MixedPoissonSpec(gamma(F(5, 2), F(1)), rho)
            for s in range(1, 7):
                assert mp_factorial_moment(sp, s) / rho**s == sp.mixing.moments(s)

    def test_power_moments_poisson_bell(self):
        spd = MixedPoissonSpec(degenerate(F(1)), F(1))
        assert [mp_power_moment(spd, s) for s in (1, 2, 3, 4)] == [1, 2, 5, 15]

    def test_first_power_moment(self):
        sp = MixedPoissonSpec(gamma(F(2), F(1)), F(1, 2))
        assert mp_power_moment(sp, 1) == F(1, 2) * 2

    def test_geometric_second_moment(self):
        # Geom(1/2) on {0,1,...}: E(Y^2) = sum l^2 2^{-l-1} = 3
        spg = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        brute = sum(l * l * F(1, 2) ** (l + 1) for l in range(300))
        assert mp_power_moment(spg, 2) == 3
        assert abs(float(brute) - 3) < 1e-12

    def test_rho_zero_rejected(self):
        with pytest.raises(ValueError):
            MixedPoissonSpec(rayleigh(1), 0)

    def test_factorial_moment_identity_from_pmf(self):
        sp = MixedPoissonSpec(rayleigh(1), 1.0)
        for s in range(1, 5):
            tot = sum(falling(l, s) * mp_pmf(sp, l) for l in range(80))
            assert abs(tot - mp_factorial_moment(sp, s)) < 1e-8


class TestPmfSeries:
    def test_poisson_at_zero(self):
        assert abs(mp_pmf_series(MixedPoissonSpec(degenerate(F(1)), F(1)), 0) - math.exp(-1)) < 1e-14

    def test_geometric_needs_resummation(self):
        # Gamma(1,1) mixing at rho = 1: geometric with p = 1/2
        spg = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        assert abs(mp_pmf_series(spg, 2) - 0.125) < 1e-12

    def test_matches_quadrature_rayleigh(self):
        sp = MixedPoissonSpec(rayleigh(1), 0.5)
        assert abs(mp_pmf_series(sp, 0) - mp_pmf_quadrature(sp, 0)) < 1e-10

    def test_divergence_detected_for_indeterminate_weibull(self):
        sp = MixedPoissonSpec(weibull(F(1, 2)), F(3, 2))
        with pytest.raises(SeriesDivergenceError):
            mp_pmf_series(sp, 0)

    def test_neyman_a_series(self):
        sp = MixedPoissonSpec(poisson(F(1)), F(1))
        assert abs(mp_pmf_series(sp, 3) - mp_pmf_closed(sp, 3)) < 1e-11


class TestPmfQuadrature:
    def test_poisson_rayleigh_at_zero(self):
        sp = MixedPoissonSpec(rayleigh(1), 1.0)
        assert abs(mp_pmf_quadrature(sp, 0) - RAYLEIGH_RHO1_P0) < 1e-10

    def test_weibull_shape_one_geometric(self):
        sp = MixedPoissonSpec(weibull(F(1)), F(1))
        assert abs(mp_pmf_quadrature(sp, 0) - 0.5) < 1e-11

    def test_negbin_two_half(self):
        sp = MixedPoissonSpec(gamma(2, 1), 1.0)
        assert abs(mp_pmf_quadrature(sp, 0) - 0.25) < 1e-11

    def test_density_unavailable(self):
        with pytest.raises(DensityUnavailableError):
            mp_pmf_quadrature(MixedPoissonSpec(poisson(1), 1.0), 0)


class TestPmfClosed:
    def test_neyman_a_at_zero(self):
        sp = MixedPoissonSpec(poisson(F(1)), F(1))
        assert abs(mp_pmf_closed(sp, 0) - math.exp(-1 + math.exp(-1))) < 1e-13

    def test_negbin_family(self):
        sp = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        assert abs(mp_pmf_closed(sp, 2) - 0.125) < 1e-14

    def test_rayleigh_matches_quadrature(self):
        sp = MixedPoissonSpec(rayleigh(1), 1.0)
        assert abs(mp_pmf_closed(sp, 0) - mp_pmf_quadrature(sp, 0)) < 1e-10

    def test_rayleigh_sigma_scaling(self):
        # MPo(rho * Rayleigh(sigma)) == MPo(rho*sigma * Rayleigh(1))
        a = MixedPoissonSpec(rayleigh(2.0), 0.5)
        b = MixedPoissonSpec(rayleigh(1.0), 1.0)
        for l in range(12):
            assert abs(mp_pmf_closed(a, l) - mp_pmf_closed(b, l)) < 1e-12

    def test_no_closed_form(self):
        with pytest.raises(NoClosedFormError):
            mp_pmf_closed(MixedPoissonSpec(block_law(2), 1.0), 0)

    def test_weibull_three_cases_match_quadrature(self):
        for shape, rho in ((F(2), F(1)), (F(1), F(1)), (F(1, 2), F(3, 2))):
            sp = MixedPoissonSpec(weibull(shape), rho)
            for l in (0, 1, 4):
                assert abs(mp_pmf_closed(sp, l) - mp_pmf_quadrature(sp, l)) < 1e-9


class TestThreeWayAgreement:
    @pytest.mark.parametrize("r", [F(1), F(2), F(7, 2)])
    @pytest.mark.parametrize("rho", [F(1, 2), F(1), F(2)])
    def test_gamma_grid(self, r, rho):
        sp = MixedPoissonSpec(gamma(r, F(1)), rho)
        for l in (0, 1, 5, 12, 20):
            c = mp_pmf_closed(sp, l)
            q = mp_pmf_quadrature(sp, l)
            s = mp_pmf_series(sp, l)
            assert abs(c - q) < 1e-9
            assert abs(s - c) < 1e-9

    @pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
    def test_rayleigh_grid(self, rho):
        sp = MixedPoissonSpec(rayleigh(1), rho)
        for l in (0, 1, 5, 12, 20):
            c = mp_pmf_closed(sp, l)
            q = mp_pmf_quadrature(sp, l)
            s = mp_pmf_series(sp, l)
            assert abs(c - q) < 1e-10
            assert abs(s - c) < 1e-9


class TestMgf:
    def test_poisson_mgf(self):
        sp = MixedPoissonSpec(degenerate(F(1)), F(2))
        for z in (-0.5, 0.0, 0.4):
            assert abs(mp_mgf(sp, z) - math.exp(2 * (math.exp(z) - 1))) < 1e-12

    def test_at_zero_is_one(self):
        for sp in (MixedPoissonSpec(rayleigh(1), 1.0), MixedPoissonSpec(gamma(2, 1), 0.5)):
            assert abs(mp_mgf(sp, 0.0) - 1.0) < 1e-14

    def test_geometric_mgf(self):
        sp = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        assert abs(mp_mgf(sp, 0.1) - 1 / (2 - math.exp(0.1))) < 1e-13

    def test_outside_region(self):
        sp = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        with pytest.raises(MgfRegionError):
            mp_mgf(sp, 0.8)  # rho(e^z - 1) >= 1 = 1/theta

    def test_taylor_coefficients_match_power_moments(self):
        # s! [z^s] mp_mgf == mp_power_moment via a Cauchy-circle expansion
        for law, rho in ((degenerate(F(1)), F(1)), (gamma(F(2), F(1, 2)), F(1)), (poisson(F(1)), F(1, 2))):
            sp = MixedPoissonSpec(law, rho)
            coeffs = _taylor_via_circle(lambda z: _mgf_complex(sp, z), 6, radius=0.08, points=256)
            for s in range(1, 7):
                want = float(mp_power_moment(sp, s))
                got = coeffs[s] * math.factorial(s)
                assert abs(got - want) < 1e-8 * max(1.0, abs(want))


def _mgf_complex(sp, z):
    # complex-capable mirror of mp_mgf for the closed-form families
    u = complex(sp.rho) * (cmath.exp(z) - 1)
    fam = sp.mixing.family
    if fam == "degenerate":
        return cmath.exp(complex(sp.mixing.params["c"]) * u)
    if fam == "gamma":
        r, theta = float(sp.mixing.params["r"]), float(sp.mixing.params["theta"])
        return (1 - theta * u) ** (-r)
    if fam == "poisson":
        return cmath.exp(float(sp.mixing.params["lam"]) * (cmath.exp(u) - 1))
    raise AssertionError(fam)


def _taylor_via_circle(f, order, radius, points):
    vals = [f(radius * cmath.exp(2j * cmath.pi * k / points)) for k in range(points)]
    out = []
    for s in range(order + 1):
        acc = sum(v * cmath.exp(-2j * cmath.pi * k * s / points) for k, v in enumerate(vals)) / points
        out.append((acc / radius**s).real)
    return out


class TestConvolution:
    def test_negbin_additivity(self):
        c = mp_convolve(MixedPoissonSpec(gamma(F(2), F(1)), F(1)), MixedPoissonSpec(gamma(F(3, 2), F(1)), F(1)))
        target = MixedPoissonSpec(gamma(F(7, 2), F(1)), F(1))
        for l in range(21):
            assert abs(c.pmf(l) - mp_pmf_closed(target, l)) < 1e-10

    def test_identity_with_point_mass_at_zero(self):
        spg = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        c = mp_convolve(spg, MixedPoissonSpec(degenerate(F(0)), F(1)))
        for l in range(15):
            assert abs(c.pmf(l) - mp_pmf_closed(spg, l)) < 1e-12

    def test_poisson_additivity(self):
        c = mp_convolve(MixedPoissonSpec(degenerate(F(2)), F(1)), MixedPoissonSpec(degenerate(F(3)), F(1)))
        target = MixedPoissonSpec(degenerate(F(5)), F(1))
        for l in range(16):
            assert abs(c.pmf(l) - mp_pmf_closed(target, l)) < 1e-12

    def test_moments_binomial_convolution(self):
        a = MixedPoissonSpec(gamma(F(2), F(1)), F(1, 2))
        b = MixedPoissonSpec(degenerate(F(1)), F(3))
        c = mp_convolve(a, b)
        # factorial moments of the sum: E(fall(Y,s)) = E((rho1 X1 + rho2 X2)^s)
        for s in range(1, 5):
            direct = sum(
                falling(l, s) * c.pmf(l) for l in range(120)
            )
            assert abs(direct - float(c.factorial_moment(s))) < 1e-7

    def test_convolution_commutes(self):
        a = MixedPoissonSpec(gamma(F(2), F(1)), F(1, 2))
        b = MixedPoissonSpec(rayleigh(1), 1.0)
        assert abs(mp_convolve(a, b).pmf(4) - mp_convolve(b, a).pmf(4)) < 1e-12


class TestNormalization:
    def test_poisson_tail(self):
        assert abs(mp_pmf_normalization(MixedPoissonSpec(degenerate(F(1)), F(1)), 40) - 1.0) < 1e-12

    def test_geometric_tail_exact_deficit(self):
        spg = MixedPoissonSpec(gamma(F(1), F(1)), F(1))
        assert abs(mp_pmf_normalization(spg, 50) - (1 - 2.0**-51)) < 1e-12

    def test_monotone_in_cutoff(self):
        sp = MixedPoissonSpec(rayleigh(1), 1.0)
        vals = [mp_pmf_normalization(sp, L) for L in (2, 5, 10, 30)]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
