import math
from fractions import Fraction as F

import pytest

from mixpoisson.errors import SeriesOrderExceededError, UnknownModelError
from mixpoisson.mixing import law_moment
from mixpoisson.models import (
    AsymptoticValue,
    ModelSpec,
    blocks_fm,
    branches_fm,
    bridge_fm,
    crp_fm,
    crp_params,
    descendants_fm,
    dimurn_fm,
    edgecut_fm,
    edgecut_fm_numeric,
    family_ratio,
    inversions_fm,
    mapping_fm,
    nodedeg_fm,
    parking_fm,
    records_fm,
    records_fm_series,
    scale_lambda,
    triangular_mean,
    triangular_rising_fm,
    triangular_rising_fm_gamma_form,
)
from mixpoisson.oracles import dist_moment, enumerate_all, marginal_fall_moment
from mixpoisson.numerics import falling, rising


class TestDeskValues:
    def test_blocks(self):
        assert blocks_fm(2, 2, 1, 1) == F(4, 3)
        assert blocks_fm(2, 2, 2, 1) == F(1, 3)
        assert blocks_fm(5, 2, 1, 0) == 1
        assert blocks_fm(3, 2, 2, 2) == 0  # n - ell*s < 0

    def test_blocks_k1_degenerate(self):
        # k = 1: every element is its own block, X_{n,1} = n deterministically
        for n in (1, 3, 6):
            for s in range(4):
                assert blocks_fm(n, 1, 1, s) == falling(n, s)

    def test_dimurn(self):
        assert dimurn_fm(1, 1, 1, 1, 1) == F(1, 2)
        assert dimurn_fm(2, 1, 1, 1, 1) == 1
        assert dimurn_fm(4, 3, 2, 1, 0) == 1
        assert dimurn_fm(2, 2, 1, 1, 3) == 0  # s > n

    def test_descendants(self):
        assert descendants_fm(3, 2, 1, 0) == F(1, 2)
        assert descendants_fm(5, 5, 2, F(1, 2)) == 0  # j = n
        assert descendants_fm(4, 2, 0, 0) == 1

    def test_nodedeg(self):
        assert nodedeg_fm(3, 2, 1, 1) == F(1, 3)
        assert nodedeg_fm(6, 3, 0, 1) == 1
        for s in (1, 2, 3):
            assert nodedeg_fm(5, 5, s, 1) == 0  # telescoping collapse at j = n

    def test_branches(self):
        assert branches_fm(2, 1, 1, 1, 1) == 1
        assert branches_fm(4, 1, 1, 0, 1) == 1
        assert branches_fm(4, 2, 3, 1, 1) == 0  # n - j - k*s < 0

    def test_crp(self):
        assert crp_params(F(1, 2), F(1, 2)) == (1, 1)
        assert crp_fm(1, 1, 1, 1, 1) == 1
        assert crp_fm(2, 1, 1, 1, 1) == F(4, 3)
        with pytest.raises(ValueError):
            crp_fm(3, 1, 1, 1, 0)  # beta <= 0 out of scope

    def test_triangular(self):
        assert triangular_rising_fm(1, 1, 1, 1, 1, 1) == F(3, 2)
        assert triangular_rising_fm(7, 2, 3, 1, 1, 0) == 1
        assert triangular_rising_fm(0, 2, 1, 2, 1, 3) == rising(F(2, 2), 3)

    def test_inversions_asymptotic_flag(self):
        out = inversions_fm(10, 3, 2, 2.0)
        assert isinstance(out, AsymptoticValue) and not out.exact
        assert inversions_fm(10, 3, 0, 2.0).value == 1.0
        assert inversions_fm(10, 10, 1, 2.0).value == 0.0
        # s = 2 algebraic reduction: (2/kappa)(n-j)(n-j-1)/n
        n, j, kappa = 40, 7, 1.7
        want = (2 / kappa) * (n - j) * (n - j - 1) / n
        assert abs(inversions_fm(n, j, 2, kappa).value - want) < 1e-12

    def test_records_and_mapping(self):
        assert records_fm(2, 1, 1) == 1
        assert records_fm(2, 2, 1) == F(1, 2)
        assert mapping_fm(2, 1, 1) == 1
        assert mapping_fm(2, 2, 1) == F(1, 2)
        assert records_fm(9, 2, 5) == 0  # n - js < 0

    def test_edgecut_and_parking(self):
        assert edgecut_fm(2, 1, 1) == 1
        assert edgecut_fm(3, 1, 1) == F(4, 3)
        assert edgecut_fm(3, 2, 1) == F(1, 3)
        assert parking_fm(2, 1, 1) == F(4, 3)
        assert parking_fm(2, 2, 1) == F(1, 3)
        assert parking_fm(5, 1, 0) == 1

    def test_bridge(self):
        assert bridge_fm(2, 1, 1) == F(4, 3)
        assert bridge_fm(2, 2, 1) == F(1, 3)
        assert bridge_fm(3, 2, 2) == 0  # n - js < 0


class TestOracleEquality:
    """Exact-moment operations equal exhaustive-oracle expectations, zero tolerance."""

    def test_blocks_k2(self):
        for n in range(1, 5):
            dist = enumerate_all("blocks", n, {"k": 2})
            for ell in range(1, n + 1):
                for s in range(4):
                    assert blocks_fm(n, 2, ell, s) == marginal_fall_moment(dist, ell, s)

    @pytest.mark.parametrize("alpha,delta", [(1, 1), (2, 1), (1, 2)])
    def test_dimurn(self, alpha, delta):
        for n in range(5):
            for m in range(5):
                dist = enumerate_all("dimurn", n, {"m": m, "alpha": alpha, "delta": delta})
                for s in range(4):
                    want = dist_moment(dist, lambda v: F(falling(v[0], s)))
                    assert dimurn_fm(n, m, alpha, delta, s) == want

    @pytest.mark.parametrize("family,kw", [("rect", {}), ("gport", {"alpha": 1}), ("dary", {"d": 2})])
    def test_descendants(self, family, kw):
        r = family_ratio(family, kw.get("alpha", 1), kw.get("d", 2))
        for n in range(1, 6):
            for j in range(1, n + 1):
                dist = enumerate_all("descendants", n, dict(family=family, j=j, **kw))
                for s in range(4):
                    want = dist_moment(dist, lambda v: F(falling(v[0], s)))
                    assert descendants_fm(n, j, s, r) == want

    def test_nodedeg(self):
        for n in range(2, 6):
            for j in range(2, n + 1):
                dist = enumerate_all("nodedeg", n, {"family": "gport", "alpha": 1, "j": j})
                for s in range(4):
                    want = dist_moment(dist, lambda v: F(falling(v[0], s)))
                    assert nodedeg_fm(n, j, s, 1) == want

    def test_branches(self):
        for n in range(1, 6):
            for j in range(1, n + 1):
                dist = enumerate_all("branches", n, {"family": "gport", "alpha": 1, "j": j})
                for k in range(1, max(n - j, 1) + 1):
                    for s in range(4):
                        assert branches_fm(n, j, k, s, 1) == marginal_fall_moment(dist, k, s)

    def test_branches_at_root_is_crp(self):
        # root of a plain preferential tree == CRP with beta = alpha
        for n in range(2, 7):
            for k in range(1, n):
                for s in range(3):
                    assert branches_fm(n, 1, k, s, 1) == crp_fm(n - 1, k, s, 1, 1)

    def test_crp(self):
        for n in range(1, 5):
            dist = enumerate_all("crp", n, {"a": F(1, 2), "theta": F(1, 2)})
            for j in range(1, n + 1):
                for s in range(4):
                    assert crp_fm(n, j, s, 1, 1) == marginal_fall_moment(dist, j, s)

    def test_crp_other_parameters(self):
        alpha, beta = crp_params(F(1, 3), F(2, 3))
        assert (alpha, beta) == (2, 2)
        for n in range(1, 5):
            dist = enumerate_all("crp", n, {"a": F(1, 3), "theta": F(2, 3)})
            for j in range(1, n + 1):
                for s in range(3):
                    assert crp_fm(n, j, s, alpha, beta) == marginal_fall_moment(dist, j, s)

    @pytest.mark.parametrize("alpha,beta,w0,b0", [(1, 1, 1, 1), (2, 1, 1, 1), (1, 2, 2, 1), (1, 1, 1, 3), (2, 2, 3, 2)])
    def test_triangular(self, alpha, beta, w0, b0):
        for n in range(6):
            dist = enumerate_all("triangular", n, {"w0": w0, "b0": b0, "alpha": alpha, "beta": beta})
            for s in range(4):
                want = dist_moment(dist, lambda v: F(rising(F(v[0], alpha), s)))
                assert triangular_rising_fm(n, w0, b0, alpha, beta, s) == want
                assert triangular_rising_fm_gamma_form(n, w0, b0, alpha, beta, s) == want

    def test_records(self):
        for n in range(1, 6):
            dist = enumerate_all("records", n, {})
            for j in range(1, n + 1):
                for s in range(4):
                    assert records_fm(n, j, s) == marginal_fall_moment(dist, j, s)

    def test_edgecut(self):
        for n in range(2, 6):
            dist = enumerate_all("edgecut", n, {})
            for j in range(1, n):
                for s in range(4):
                    assert edgecut_fm(n, j, s) == marginal_fall_moment(dist, j, s)

    def test_parking(self):
        for n in range(1, 6):
            dist = enumerate_all("parking", n, {})
            for j in range(1, n + 1):
                for s in range(4):
                    assert parking_fm(n, j, s) == marginal_fall_moment(dist, j, s)

    def test_bridge(self):
        for n in range(1, 7):
            dist = enumerate_all("bridge", n, {})
            for j in range(1, n + 1):
                for s in range(4):
                    assert bridge_fm(n, j, s) == marginal_fall_moment(dist, j, s)

    def test_mapping(self):
        for n in range(1, 6):
            dist = enumerate_all("mapping", n, {})
            for j in range(1, n + 1):
                for s in range(4):
                    assert mapping_fm(n, j, s) == marginal_fall_moment(dist, j, s)


class TestKernelConsistency:
    def test_records_equals_mapping(self):
        # the two coefficient pipelines differ by a factor that cancels exactly
        for n in (3, 7, 20, 50):
            for j in (1, 2, 5):
                if j > n:
                    continue
                for s in (1, 2, 3):
                    assert records_fm(n, j, s) == mapping_fm(n, j, s)

    def test_lagrange_equals_series_pipeline(self):
        for n in (4, 11, 30):
            for j in (1, 2, 3):
                for s in (1, 2):
                    assert records_fm(n, j, s) == records_fm_series(n, j, s)

    def test_series_order_guard(self):
        with pytest.raises(SeriesOrderExceededError):
            records_fm_series(30, 1, 1, order=10)
        with pytest.raises(SeriesOrderExceededError):
            edgecut_fm(30, 1, 1, order=10)

    def test_edgecut_numeric_vs_exact(self):
        for n, j in ((40, 1), (60, 2), (80, 3)):
            exact = float(edgecut_fm(n, j, 1))
            numeric = edgecut_fm_numeric(n, j, 1)
            assert abs(exact - numeric) <= 1e-10 * exact

    def test_monotone_vanish(self):
        assert blocks_fm(4, 2, 3, 2) == 0
        assert records_fm(5, 3, 2) == 0
        assert bridge_fm(5, 3, 2) == 0
        assert mapping_fm(5, 3, 2) == 0


class TestTriangularMean:
    def test_martingale_mean_matches_rising_s1(self):
        for alpha, beta, w0, b0 in [(1, 1, 1, 1), (2, 1, 1, 1), (1, 2, 2, 1), (3, 1, 2, 2), (2, 2, 1, 5)]:
            for n in (1, 17, 64, 100):
                assert triangular_mean(n, w0, b0, alpha, beta) == triangular_rising_fm(n, w0, b0, alpha, beta, 1)


class TestScaleLambda:
    def test_records_large_n(self):
        info = scale_lambda(ModelSpec("records", {"n": 10**6, "j": 1}))
        assert abs(info.lam - math.sqrt(10**6) / math.e) < 1e-9
        assert info.regime == "to-infinity"
        assert info.mixing.family == "rayleigh"

    def test_dimurn_balanced(self):
        info = scale_lambda(ModelSpec("dimurn", {"n": 700, "m": 700, "alpha": 1, "delta": 1}))
        assert info.lam == 1.0
        assert info.regime == "finite-rho"
        assert info.mixing.family == "weibull"

    def test_descendants_degenerate(self):
        info = scale_lambda(ModelSpec("descendants", {"n": 50, "j": 50, "family": "rect"}))
        assert info.lam == 0.0
        assert info.regime == "degenerate"

    def test_mixing_families(self):
        assert scale_lambda(ModelSpec("blocks", {"n": 100, "k": 2, "ell": 1})).mixing.family == "block"
        assert scale_lambda(ModelSpec("bridge", {"n": 100, "j": 1})).mixing.family == "rayleigh"
        assert scale_lambda(ModelSpec("crp", {"n": 100, "j": 1, "a": F(1, 2), "theta": F(1, 2)})).mixing.family == "crp"
        assert scale_lambda(ModelSpec("branches", {"n": 100, "j": 1, "k": 1, "alpha": 1})).mixing.family == "branch"
        assert scale_lambda(ModelSpec("triangular", {"n": 100, "w0": 1, "b0": 1, "alpha": 1, "beta": 1})).mixing.family == "gamma"
        assert scale_lambda(ModelSpec("inversions", {"n": 100, "j": 10, "kappa": 2.0})).mixing.family == "rayleigh"

    def test_unknown_tag_rejected(self):
        with pytest.raises(UnknownModelError):
            ModelSpec("mystery", {})


class TestAsymptoticConsistency:
    """fm(1)/(lambda * mu_1) -> 1; spot checks at n = 2000 here (the full
    n = 1e4 sweep lives in the acceptance suite)."""

    def test_ratios_close(self):
        n = 2000
        checks = [
            ("records", ModelSpec("records", {"n": n, "j": 1}), float(records_fm(n, 1, 1))),
            ("bridge", ModelSpec("bridge", {"n": n, "j": 1}), float(bridge_fm(n, 1, 1))),
            ("blocks", ModelSpec("blocks", {"n": n, "k": 2, "ell": 2}), float(blocks_fm(n, 2, 2, 1))),
            ("descendants", ModelSpec("descendants", {"n": n, "j": 40, "family": "rect"}), float(descendants_fm(n, 40, 1, 0))),
            ("nodedeg", ModelSpec("nodedeg", {"n": n, "j": 40, "alpha": 1}), float(nodedeg_fm(n, 40, 1, 1))),
            ("branches", ModelSpec("branches", {"n": n, "j": 1, "k": 2, "alpha": 1}), float(branches_fm(n, 1, 2, 1, 1))),
            ("dimurn", ModelSpec("dimurn", {"n": n, "m": n // 2, "alpha": 1, "delta": 1}), float(dimurn_fm(n, n // 2, 1, 1, 1))),
        ]
        for name, model, fm1 in checks:
            info = scale_lambda(model)
            ratio = fm1 / (info.lam * float(law_moment(info.mixing, 1)))
            assert abs(ratio - 1) < 0.05, (name, ratio)

    def test_edgecut_numeric_ratio(self):
        n = 2000
        info = scale_lambda(ModelSpec("edgecut", {"n": n, "j": 1}))
        ratio = edgecut_fm_numeric(n, 1, 1) / (info.lam * float(law_moment(info.mixing, 1)))
        assert abs(ratio - 1) < 0.15
