"""Seeded simulators and statistic extractors for every model.

Thin wrappers over the kernels in :mod:`mixpoisson._kernels`; all
randomness flows through a counter-based generator keyed by
``Rng(seed, stream)``, so identical inputs give identical realizations on
every platform and on both the numba and fallback paths.  Size statistics
come back as ``collections.Counter`` multisets {size: count}.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import TenabilityError

__all__ = [
    "Rng",
    "LabeledTree",
    "sim_kstirling",
    "sim_urn",
    "sim_increasing_tree",
    "TreeStats",
    "tree_stats",
    "sim_crp",
    "sample_cayley",
    "count_record_subtrees",
    "sim_edgecut",
    "sample_parking",
    "parking_increments",
    "parking_to_forest",
    "max_record_subtree_sizes",
    "sample_bridge",
    "bridge_visits",
    "sample_mapping",
    "mapping_tree_sizes",
    "mc_counts",
    "mc_values",
    "kernels_path",
]


def kernels_path() -> str:
    """'numba' or 'pure', whichever backend the kernels are running on."""
    return K.active_path()


@dataclass(frozen=True)
class Rng:
    """Descriptor of one deterministic draw stream (64-bit counter-based)."""

    seed: int
    stream: int = 0

    def state(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return K.rng_new(np.uint64(self.seed & (2**64 - 1)), np.uint64(self.stream & (2**64 - 1)))

    def words(self, count: int) -> List[int]:
        with np.errstate(over="ignore"):
            return [int(w) for w in K.rng_words(np.uint64(self.seed), np.uint64(self.stream), count)]


@dataclass(frozen=True)
class LabeledTree:
    """Rooted labelled tree with labels 1..n; parent[label] = 0 for the root."""

    parent: Tuple[int, ...]  # entry i-1 is the parent label of node i, root -> 0

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return self.parent.index(0) + 1

    @staticmethod
    def from_zero_based(parent0: Sequence[int]) -> "LabeledTree":
        return LabeledTree(tuple(int(p) + 1 for p in parent0))

    def to_zero_based(self) -> np.ndarray:
        return np.asarray([p - 1 for p in self.parent], dtype=np.int64)

    def children(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {v: [] for v in range(1, self.size + 1)}
        for v, p in enumerate(self.parent, start=1):
            if p:
                out[p].append(v)
        return out


def _counter_from_row(row: np.ndarray) -> Counter:
    return Counter({j + 1: int(c) for j, c in enumerate(row) if c})


def sim_kstirling(n: int, k: int, rng: Rng) -> Counter:
    """Block-size multiset (in units of k) of a uniform k-Stirling permutation."""
    if n < 1 or k < 1:
        raise ValueError("sim_kstirling needs n, k >= 1")
    with np.errstate(over="ignore"):
        perm = K.sample_kstirling(n, k, rng.state())
        row = np.zeros(n, np.int64)
        K.block_size_counts(perm, k, n, row)
    return _counter_from_row(row)


def sim_urn(
    matrix: Sequence[Sequence[int]],
    init: Sequence[int],
    rng: Rng,
    draws: Optional[int] = None,
    stop: str = "draws",
) -> Tuple[int, ...]:
    """Urn composition after ``draws`` steps (any number of colours, e.g.
    the banded block-growth matrices), or at black exhaustion for the
    two-colour diminishing case with stop='black-exhausted'; raises on
    tenability violations."""
    rows = [tuple(int(x) for x in row) for row in matrix]
    counts = [int(x) for x in init]
    r = len(counts)
    if len(rows) != r or any(len(row) != r for row in rows):
        raise ValueError("replacement matrix must be square and match the initial vector")
    if stop not in ("draws", "black-exhausted"):
        raise ValueError("stop must be 'draws' or 'black-exhausted'")
    if stop == "black-exhausted" and r != 2:
        raise ValueError("the black-exhausted stop rule applies to two-colour urns")
    if stop == "draws" and (draws is None or draws < 0):
        raise ValueError("draws >= 0 required")
    if r == 2:
        (a11, a12), (a21, a22) = rows
        with np.errstate(over="ignore"):
            w, b, status = K.sim_urn2(
                a11, a12, a21, a22, counts[0], counts[1], int(draws or 0), 1 if stop == "black-exhausted" else 0, rng.state()
            )
        if status != 0:
            raise TenabilityError(f"urn history removed absent balls (reached w={w}, b={b})")
        return int(w), int(b)
    with np.errstate(over="ignore"):
        st = rng.state()
        for _ in range(int(draws or 0)):
            total = sum(counts)
            if total <= 0:
                raise TenabilityError("urn is empty")
            t = int(K.rng_pick(st, total))
            colour = 0
            while t >= counts[colour]:
                t -= counts[colour]
                colour += 1
            for i in range(r):
                counts[i] += rows[colour][i]
            if any(c < 0 for c in counts):
                raise TenabilityError(f"urn history removed absent balls (reached {tuple(counts)})")
    return tuple(counts)


_FAMILY_CODE = {"rect": 0, "gport": 1, "dary": 2}


def _family_args(family: str, alpha=1, d: int = 2) -> Tuple[int, int, int, int]:
    from fractions import Fraction

    if family not in _FAMILY_CODE:
        raise ValueError(f"unknown increasing-tree family {family!r}")
    a = Fraction(alpha)
    return _FAMILY_CODE[family], a.numerator, a.denominator, int(d)


def sim_increasing_tree(family: str, n: int, rng: Rng, alpha=1, d: int = 2) -> LabeledTree:
    """Evolution-process increasing tree: uniform ('rect'), preferential
    with weight alpha ('gport'), or d-ary ('dary')."""
    if n < 1:
        raise ValueError("n >= 1 required")
    code, wn, wd, dd = _family_args(family, alpha, d)
    with np.errstate(over="ignore"):
        parent0 = K.sample_increasing_tree(code, n, wn, wd, dd, rng.state())
    return LabeledTree.from_zero_based(parent0)


@dataclass(frozen=True)
class TreeStats:
    descendants: int
    outdegree: int
    branch_sizes: Counter


def tree_stats(tree: LabeledTree, j: int, kmax: Optional[int] = None) -> TreeStats:
    """Subtree size, outdegree, and branch-size multiset at node j."""
    n = tree.size
    if not (1 <= j <= n):
        raise ValueError("need 1 <= j <= n")
    kids = tree.children()
    size = {v: 1 for v in range(1, n + 1)}
    order: List[int] = [tree.root]
    for v in order:
        order.extend(kids[v])
    for v in reversed(order):
        for c in kids[v]:
            size[v] += size[c]
    cap = kmax if kmax is not None else n
    branches = Counter(size[c] for c in kids[j] if size[c] <= cap)
    return TreeStats(descendants=size[j], outdegree=len(kids[j]), branch_sizes=branches)


def sim_crp(n: int, a, theta, rng: Rng) -> Counter:
    """Table-size multiset after n customers of the CRP(a, theta)."""
    from fractions import Fraction

    if n < 1:
        raise ValueError("n >= 1 required")
    af, tf = Fraction(a), Fraction(theta)
    if not (0 < af < 1) or tf <= -af:
        raise ValueError("CRP needs 0 < a < 1 and theta > -a")
    denom = int(np.lcm(af.denominator, tf.denominator))
    a_d = af.numerator * (denom // af.denominator)
    th_d = tf.numerator * (denom // tf.denominator)
    sizes = np.empty(n, np.int64)
    with np.errstate(over="ignore"):
        k = K.crp_table_sizes(n, a_d, th_d, denom, rng.state(), sizes)
    return Counter(int(s) for s in sizes[:k])


def sample_cayley(n: int, rng: Rng) -> LabeledTree:
    """Uniform rooted labelled tree on n nodes (n^{n-1} outcomes)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    with np.errstate(over="ignore"):
        parent0 = K.sample_cayley_parents(n, rng.state())
    return LabeledTree.from_zero_based(parent0)


def count_record_subtrees(tree: LabeledTree) -> Counter:
    """Multiset of min-record subtree sizes (root-path label minima)."""
    n = tree.size
    row = np.zeros(n, np.int64)
    with np.errstate(over="ignore"):
        K.record_subtree_counts(tree.to_zero_based(), n, row)
    return _counter_from_row(row)


def sim_edgecut(tree: LabeledTree, rng: Rng) -> Counter:
    """Sizes of subtrees discarded by uniform random edge cuts until the
    root of ``tree`` is isolated."""
    n = tree.size
    row = np.zeros(n, np.int64)
    with np.errstate(over="ignore"):
        K.edgecut_size_counts(tree.to_zero_based(), n, row, rng.state())
    return _counter_from_row(row)


def sample_parking(n: int, rng: Rng) -> Tuple[int, ...]:
    """Uniform parking function of size n ((n+1)^{n-1} outcomes)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    with np.errstate(over="ignore"):
        pf = K.sample_parking_function(n, rng.state())
    return tuple(int(x) for x in pf)


def parking_increments(pf: Sequence[int]) -> Counter:
    """Multiset of initial-cluster increment amounts of a parking function."""
    arr = np.asarray(pf, dtype=np.int64)
    n = arr.shape[0]
    if n == 0 or arr.min() < 1 or arr.max() > n:
        raise ValueError("not a preference sequence on {1..n}")
    row = np.zeros(n, np.int64)
    with np.errstate(over="ignore"):
        status = K.parking_increment_counts(arr, n, row)
    if status != 0:
        raise ValueError(f"{tuple(pf)} is not a parking function")
    return _counter_from_row(row)


def parking_to_forest(pf: Sequence[int]) -> Dict[int, int]:
    """The parking-procedure bijection onto rooted labelled forests.

    Returns a parent map {node: parent} with parent 0 for roots.  Driver k
    becomes node k; the trees of the occupied cluster right of k's parking
    space become k's children, and when k's preferred space was already
    occupied by driver l, node k is additionally attached below l.
    Increment amounts of the initial cluster correspond to max-record
    subtree sizes of the forest.
    """
    pf = tuple(int(x) for x in pf)
    n = len(pf)
    parking_increments(pf)  # validates
    parent = {k: 0 for k in range(1, n + 1)}
    occupant: Dict[int, int] = {}  # space -> driver
    cluster_of: Dict[int, List[int]] = {}  # leftmost space of a cluster -> tree roots on it

    for k, pref in enumerate(pf, start=1):
        s = pref
        while s in occupant:
            s += 1
        # trees of the cluster starting right of the parking space -> children of k
        for r in cluster_of.pop(s + 1, []):
            parent[r] = k
        occupied_pref = pref != s
        if occupied_pref:
            parent[k] = occupant[pref]
        occupant[s] = k
        if (s - 1) in occupant:
            left = s - 1
            while (left - 1) in occupant:
                left -= 1
            roots = cluster_of.pop(left)
            # in the occupied-preference case k joined a tree already on
            # this cluster; otherwise its new tree sits here as well
            if not occupied_pref:
                roots.append(k)
            cluster_of[left] = roots
        else:
            cluster_of[s] = [] if occupied_pref else [k]
    return parent


def max_record_subtree_sizes(forest: Dict[int, int]) -> Counter:
    """Multiset of max-record subtree sizes of a labelled forest
    (a node is a max-record when its label is largest on the path from its
    tree root)."""
    n = len(forest)
    kids: Dict[int, List[int]] = {v: [] for v in range(0, n + 1)}
    for v, p in forest.items():
        kids[p].append(v)
    sizes: Counter = Counter()
    nearest: Dict[int, int] = {}
    pathmax: Dict[int, int] = {}
    counts: Dict[int, int] = {}
    stack = [(r, 0) for r in kids[0]]
    order: List[int] = []
    while stack:
        v, p = stack.pop()
        if p == 0:
            pathmax[v] = v
            nearest[v] = v
        else:
            pathmax[v] = max(v, pathmax[p])
            nearest[v] = v if v > pathmax[p] else nearest[p]
        order.append(v)
        for c in kids[v]:
            stack.append((c, v))
    for v in order:
        counts[nearest[v]] = counts.get(nearest[v], 0) + 1
    for r, c in counts.items():
        sizes[c] += 1
    return sizes


def sample_bridge(n: int, rng: Rng) -> Tuple[int, ...]:
    """Uniform +-1 bridge of length 2n (C(2n, n) outcomes)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    with np.errstate(over="ignore"):
        steps = K.sample_bridge_steps(n, rng.state())
    return tuple(int(s) for s in steps)


def bridge_visits(path: Sequence[int]) -> Counter:
    """Multiset of half-lengths j of the excursions between zero contacts."""
    arr = np.asarray(path, dtype=np.int8)
    if arr.sum() != 0 or set(np.unique(arr)) - {-1, 1}:
        raise ValueError("path must be a balanced +-1 sequence")
    n = arr.shape[0] // 2
    row = np.zeros(max(n, 1), np.int64)
    with np.errstate(over="ignore"):
        K.bridge_visit_counts(arr, max(n, 1), row)
    return _counter_from_row(row)


def sample_mapping(n: int, rng: Rng) -> Tuple[int, ...]:
    """Uniform mapping f: [n] -> [n] as a 1-based image tuple."""
    if n < 1:
        raise ValueError("n >= 1 required")
    with np.errstate(over="ignore"):
        f = K.sample_mapping_func(n, rng.state())
    return tuple(int(x) + 1 for x in f)


def mapping_tree_sizes(f: Sequence[int]) -> Counter:
    """Multiset of sizes of the trees rooted at the cyclic points of f."""
    arr = np.asarray([x - 1 for x in f], dtype=np.int64)
    n = arr.shape[0]
    if n == 0 or arr.min() < 0 or arr.max() >= n:
        raise ValueError("f must map {1..n} into itself")
    row = np.zeros(n, np.int64)
    with np.errstate(over="ignore"):
        K.mapping_tree_size_counts(arr, n, row)
    return _counter_from_row(row)


def mc_counts(tag: str, params: Dict, jcap: int, reps: int, seed: int, stream0: int = 0) -> np.ndarray:
    """Per-replicate size-count matrix (reps x jcap) for multiset-valued models."""
    from fractions import Fraction

    s0 = np.uint64(stream0)
    sd = np.uint64(seed)
    n = int(params["n"])
    with np.errstate(over="ignore"):
        if tag == "records":
            return K.mc_records(n, jcap, reps, sd, s0)
        if tag == "edgecut":
            return K.mc_edgecut(n, jcap, reps, sd, s0)
        if tag == "parking":
            return K.mc_parking(n, jcap, reps, sd, s0)
        if tag == "bridge":
            return K.mc_bridges(n, jcap, reps, sd, s0)
        if tag == "mapping":
            return K.mc_mappings(n, jcap, reps, sd, s0)
        if tag == "blocks":
            return K.mc_kstirling(n, int(params["k"]), jcap, reps, sd, s0)
        if tag == "crp":
            af, tf = Fraction(params["a"]), Fraction(params["theta"])
            denom = int(np.lcm(af.denominator, tf.denominator))
            return K.mc_crp(n, af.numerator * (denom // af.denominator), tf.numerator * (denom // tf.denominator), denom, jcap, reps, sd, s0)
        if tag == "branches":
            code, wn, wd, d = _family_args(str(params.get("family", "gport")), params.get("alpha", 1), int(params.get("d", 2)))
            return K.mc_branches(code, n, int(params["j"]), wn, wd, d, jcap, reps, sd, s0)
    raise ValueError(f"model {tag!r} has no size-count simulator")


def mc_values(tag: str, params: Dict, reps: int, seed: int, stream0: int = 0) -> np.ndarray:
    """Per-replicate scalar statistic for integer-valued models."""
    s0 = np.uint64(stream0)
    sd = np.uint64(seed)
    n = int(params["n"])
    with np.errstate(over="ignore"):
        if tag == "descendants":
            code, wn, wd, d = _family_args(str(params.get("family", "rect")), params.get("alpha", 1), int(params.get("d", 2)))
            return K.mc_descendants(code, n, int(params["j"]), wn, wd, d, reps, sd, s0)
        if tag == "nodedeg":
            code, wn, wd, d = _family_args("gport", params.get("alpha", 1), 2)
            return K.mc_nodedeg(code, n, int(params["j"]), wn, wd, d, reps, sd, s0)
        if tag == "triangular":
            alpha = int(params["alpha"])
            out = K.mc_triangular(n, int(params["w0"]), int(params["b0"]), alpha, int(params["beta"]), reps, sd, s0)
            if np.any(out < 0):
                raise TenabilityError("triangular urn history went negative")
            return out  # raw white-ball counts W_n; callers scale by alpha
        if tag == "dimurn":
            out = K.mc_dimurn(n, int(params["m"]), int(params.get("alpha", 1)), int(params.get("delta", 1)), reps, sd, s0)
            if np.any(out < 0):
                raise TenabilityError("diminishing urn history went negative")
            return out
    raise ValueError(f"model {tag!r} has no scalar simulator")
