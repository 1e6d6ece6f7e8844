import json
import os
import subprocess
import sys
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixpoisson.errors import EnumerationCapError, TenabilityError
from mixpoisson.numerics import chi2_sf
from mixpoisson.oracles import enumerate_all, enumerate_parking_functions
from mixpoisson.simulate import (
    Rng,
    bridge_visits,
    count_record_subtrees,
    kernels_path,
    mapping_tree_sizes,
    max_record_subtree_sizes,
    mc_counts,
    mc_values,
    parking_increments,
    parking_to_forest,
    sample_bridge,
    sample_cayley,
    sample_mapping,
    sample_parking,
    sim_crp,
    sim_edgecut,
    sim_increasing_tree,
    sim_kstirling,
    sim_urn,
    tree_stats,
)

SEED = 20260808


def chi2_pvalue(observed, expected_probs, reps):
    """Chi-squared GOF p-value, pooling cells with expectation below 5."""
    cells = []
    other_obs = 0
    other_exp = 0.0
    for key, prob in expected_probs.items():
        exp = float(prob) * reps
        obs = observed.get(key, 0)
        if exp < 5.0:
            other_obs += obs
            other_exp += exp
        else:
            cells.append((obs, exp))
    if other_exp > 0:
        cells.append((other_obs, other_exp))
    stat = sum((o - e) ** 2 / e for o, e in cells if e > 0)
    dof = max(len(cells) - 1, 1)
    return chi2_sf(stat, dof)


def empirical_vectors(tag, params, n, reps, seed):
    mat = mc_counts(tag, params, n, reps, seed)
    observed = Counter(tuple(int(x) for x in row) for row in mat)
    return observed


class TestDeterminism:
    def test_frozen_words(self):
        # pinned splitmix64 stream values: cross-platform determinism contract
        assert Rng(42, 0).words(4) == [
            14585004453952745724,
            963425209539481646,
            5031754615345081387,
            6003384052849686581,
        ]

    def test_same_seed_same_realization(self):
        a = mc_counts("records", {"n": 40}, 6, 64, 7)
        b = mc_counts("records", {"n": 40}, 6, 64, 7)
        assert (a == b).all()

    def test_streams_differ(self):
        a = mc_counts("bridge", {"n": 30}, 6, 64, 7, stream0=0)
        b = mc_counts("bridge", {"n": 30}, 6, 64, 7, stream0=64)
        assert not (a == b).all()

    def test_replicate_partitioning_invisible(self):
        # replicate r uses stream0 + r, so two half-batches merge to the full batch
        full = mc_counts("mapping", {"n": 25}, 5, 50, 9, stream0=0)
        first = mc_counts("mapping", {"n": 25}, 5, 25, 9, stream0=0)
        second = mc_counts("mapping", {"n": 25}, 5, 25, 9, stream0=25)
        assert (np.vstack([first, second]) == full).all()

    def test_pure_fallback_bit_identical(self):
        code = (
            "import json\n"
            "from mixpoisson.simulate import Rng, mc_counts, kernels_path\n"
            "a = mc_counts('records', {'n': 30}, 6, 40, 7)\n"
            "b = mc_counts('crp', {'n': 12, 'a': '1/2', 'theta': '1/2'}, 6, 30, 11)\n"
            "print(json.dumps({'path': kernels_path(), 'a': a.tolist(), 'b': b.tolist(),"
            " 'w': Rng(42, 0).words(3)}))\n"
        )
        env = dict(os.environ, MIXPOISSON_DISABLE_NJIT="1")
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        pure = json.loads(out.stdout)
        assert pure["path"] == "pure"
        assert (np.asarray(pure["a"]) == mc_counts("records", {"n": 30}, 6, 40, 7)).all()
        assert (np.asarray(pure["b"]) == mc_counts("crp", {"n": 12, "a": "1/2", "theta": "1/2"}, 6, 30, 11)).all()
        assert pure["w"] == Rng(42, 0).words(3)


class TestConservation:
    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_kstirling_blocks_tile(self, seed):
        counts = sim_kstirling(5, 3, Rng(seed))
        assert sum(ell * c for ell, c in counts.items()) == 5

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_record_subtrees_tile(self, seed):
        tree = sample_cayley(17, Rng(seed))
        counts = count_record_subtrees(tree)
        assert sum(j * c for j, c in counts.items()) == 17

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_edgecut_discards_all_but_root(self, seed):
        tree = sample_cayley(13, Rng(seed))
        counts = sim_edgecut(tree, Rng(seed, 1))
        assert sum(j * c for j, c in counts.items()) == 12

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_parking_increments_tile(self, seed):
        pf = sample_parking(11, Rng(seed))
        counts = parking_increments(pf)
        assert sum(j * c for j, c in counts.items()) == 11

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_bridge_excursions_tile(self, seed):
        path = sample_bridge(9, Rng(seed))
        counts = bridge_visits(path)
        assert sum(j * c for j, c in counts.items()) == 9

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_mapping_trees_partition(self, seed):
        f = sample_mapping(12, Rng(seed))
        counts = mapping_tree_sizes(f)
        assert sum(j * c for j, c in counts.items()) == 12

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_crp_tables_partition(self, seed):
        counts = sim_crp(14, F(1, 2), F(1, 2), Rng(seed))
        assert sum(j * c for j, c in counts.items()) == 14


class TestHandExamples:
    def test_kstirling_order_one(self):
        assert sim_kstirling(1, 4, Rng(3)) == Counter({1: 1})

    def test_kstirling_k1_all_singletons(self):
        # distinct values: the maximal-substring scan yields n size-1 blocks
        for seed in (0, 5, 9):
            assert sim_kstirling(6, 1, Rng(seed)) == Counter({1: 6})

    def test_parking_hand_traces(self):
        assert parking_increments((2, 1)) == Counter({2: 1})
        assert parking_increments((1, 2)) == Counter({1: 2})
        with pytest.raises(ValueError):
            parking_increments((2, 2))

    def test_bridge_hand_traces(self):
        assert bridge_visits((1, -1, -1, 1)) == Counter({1: 2})
        assert bridge_visits((1, 1, -1, -1)) == Counter({2: 1})
        with pytest.raises(ValueError):
            bridge_visits((1, 1, -1))

    def test_mapping_hand_traces(self):
        assert mapping_tree_sizes(tuple(range(1, 8))) == Counter({1: 7})
        assert mapping_tree_sizes((1, 1)) == Counter({2: 1})

    def test_cayley_single_node(self):
        tree = sample_cayley(1, Rng(5))
        assert count_record_subtrees(tree) == Counter({1: 1})

    def test_rect_size_two(self):
        assert sim_increasing_tree("rect", 2, Rng(1)).parent == (0, 1)

    def test_descendants_of_root_is_n(self):
        tree = sim_increasing_tree("gport", 9, Rng(2), alpha=1)
        assert tree_stats(tree, 1).descendants == 9

    def test_crp_single_customer(self):
        assert sim_crp(1, F(1, 2), F(1, 2), Rng(0)) == Counter({1: 1})

    def test_urn_zero_draws(self):
        assert sim_urn([[1, 1], [0, 2]], (3, 4), Rng(0), draws=0) == (3, 4)

    def test_urn_tenability_violation(self):
        with pytest.raises(TenabilityError):
            sim_urn([[-5, 0], [0, -1]], (1, 3), Rng(0), stop="black-exhausted")

    def test_banded_block_growth_urn(self):
        # 3-colour urn for size-2k blocks (k = 2, parts tracked up to 1):
        # colour 0 = slots between blocks, colour 1 = slots inside size-k
        # blocks, colour 2 = slots inside larger blocks; U_{n,1} = X_{n,1}.
        matrix = [[1, 1, 0], [0, -1, 3], [0, 0, 2]]
        init = (2, 1, 0)
        dist = enumerate_all("blocks", 3, {"k": 2})
        want = {vec[0]: p for vec, p in dist.items()}
        reps = 20000
        seen = Counter()
        for r in range(reps):
            counts = sim_urn(matrix, init, Rng(SEED, r), draws=2)
            assert sum(counts) == 7  # balanced: kn + 1 slots at n = 3
            seen[counts[1]] += 1  # U_{n,1} = (k*1 - 1) X_{n,1} = X_{n,1}
        for x, prob in want.items():
            assert abs(seen.get(x, 0) / reps - float(prob)) < 0.02

    def test_multicolour_shape_validated(self):
        with pytest.raises(ValueError):
            sim_urn([[1, 0], [0, 1, 2]], (1, 1), Rng(0), draws=1)
        with pytest.raises(ValueError):
            sim_urn([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (1, 1, 1), Rng(0), stop="black-exhausted")

    def test_dimurn_two_balls(self):
        # (1,1) start: terminal white in {0,1}
        vals = mc_values("dimurn", {"n": 1, "m": 1, "alpha": 1, "delta": 1}, 4000, SEED)
        freq = np.bincount(vals, minlength=2) / 4000
        assert set(np.unique(vals)) <= {0, 1}
        assert abs(freq[0] - 0.5) < 0.03

    def test_triangular_one_draw(self):
        vals = mc_values("triangular", {"n": 1, "w0": 1, "b0": 1, "alpha": 1, "beta": 1}, 4000, SEED)
        assert set(np.unique(vals)) == {1, 2}

    def test_gport_outdegree_step(self):
        # P{outdeg of root = 2 at n = 3} = 2/3
        hits = 0
        reps = 4000
        for r in range(reps):
            tree = sim_increasing_tree("gport", 3, Rng(SEED, r), alpha=1)
            if tree_stats(tree, 1).outdegree == 2:
                hits += 1
        assert abs(hits / reps - 2 / 3) < 0.03


class TestChiSquaredGof:
    """Empirical frequencies match the exhaustive distributions (significance 1e-3)."""

    REPS = 100000

    def _run(self, tag, n, params):
        dist = enumerate_all(tag, n, params)
        observed = empirical_vectors(tag, dict(params, n=n), n, self.REPS, SEED)
        p = chi2_pvalue(observed, dist, self.REPS)
        assert p > 1e-3, (tag, p)

    def test_kstirling_blocks(self):
        self._run("blocks", 3, {"k": 2})

    def test_records(self):
        self._run("records", 4, {})

    def test_edgecut(self):
        self._run("edgecut", 4, {})

    def test_parking(self):
        self._run("parking", 4, {})

    def test_bridge(self):
        self._run("bridge", 4, {})

    def test_mapping(self):
        self._run("mapping", 4, {})

    def test_crp(self):
        self._run("crp", 4, {"a": F(1, 2), "theta": F(1, 2)})

    def test_branches(self):
        self._run("branches", 5, {"family": "gport", "alpha": 1, "j": 1})

    def test_descendants_scalar(self):
        dist = enumerate_all("descendants", 5, {"family": "dary", "d": 2, "j": 2})
        vals = mc_values("descendants", {"n": 5, "j": 2, "family": "dary", "d": 2}, self.REPS, SEED)
        observed = Counter((int(v),) for v in vals)
        assert chi2_pvalue(observed, dist, self.REPS) > 1e-3

    def test_nodedeg_scalar(self):
        dist = enumerate_all("nodedeg", 5, {"family": "gport", "alpha": 1, "j": 2})
        vals = mc_values("nodedeg", {"n": 5, "j": 2, "alpha": 1}, self.REPS, SEED)
        observed = Counter((int(v),) for v in vals)
        assert chi2_pvalue(observed, dist, self.REPS) > 1e-3

    def test_triangular_scalar(self):
        dist = enumerate_all("triangular", 4, {"w0": 1, "b0": 1, "alpha": 1, "beta": 1})
        vals = mc_values("triangular", {"n": 4, "w0": 1, "b0": 1, "alpha": 1, "beta": 1}, self.REPS, SEED)
        observed = Counter((int(v),) for v in vals)
        assert chi2_pvalue(observed, dist, self.REPS) > 1e-3

    def test_dimurn_scalar(self):
        dist = enumerate_all("dimurn", 3, {"m": 3, "alpha": 2, "delta": 1})
        vals = mc_values("dimurn", {"n": 3, "m": 3, "alpha": 2, "delta": 1}, self.REPS, SEED)
        observed = Counter((int(v),) for v in vals)
        assert chi2_pvalue(observed, dist, self.REPS) > 1e-3


class TestCouplings:
    def test_parking_equals_edgecut_shifted(self):
        # increments of size-n parking functions == edge-cut sizes on (n+1)-trees
        for n in range(1, 5):
            pk = enumerate_all("parking", n, {})
            ec = enumerate_all("edgecut", n + 1, {})
            trimmed = {}
            for vec, prob in ec.items():
                assert vec[n] == 0  # a cut never discards n+1 nodes
                trimmed[vec[:n]] = trimmed.get(vec[:n], F(0)) + prob
            assert pk == trimmed

    def test_records_equal_node_removal(self):
        for n in range(1, 5):
            assert enumerate_all("records", n, {}) == enumerate_all("noderemoval", n, {})

    def test_parking_forest_bijection(self):
        for n in range(1, 5):
            pfs = enumerate_parking_functions(n)
            forests = set()
            for pf in pfs:
                forest = parking_to_forest(pf)
                assert set(forest) == set(range(1, n + 1))
                key = tuple(sorted(forest.items()))
                forests.add(key)
                assert max_record_subtree_sizes(forest) == parking_increments(pf)
            assert len(forests) == len(pfs) == (n + 1) ** (n - 1)


class TestEnumerationCaps:
    def test_cap_errors(self):
        with pytest.raises(EnumerationCapError):
            enumerate_all("mapping", 8, {})
        with pytest.raises(EnumerationCapError):
            enumerate_all("bridge", 9, {})
        with pytest.raises(EnumerationCapError):
            enumerate_all("records", 8, {})
        with pytest.raises(EnumerationCapError):
            enumerate_all("blocks", 9, {"k": 2})


class TestKernelPath:
    def test_path_reports(self):
        assert kernels_path() in ("numba", "pure")
