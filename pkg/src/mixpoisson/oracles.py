"""Exhaustive small-case enumerators with exact rational probabilities.

Every model's statistic distribution is computed by brute force over the
complete outcome space (weighted by exact process probabilities where the
process is non-uniform), so the closed-form moment operations can be
checked with zero tolerance.  Hard caps guard against runaway inputs.

Distributions are maps {statistic vector: Fraction probability}; for
multiset statistics the vector is the tuple of counts for sizes 1..n, for
scalar statistics a 1-tuple.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import EnumerationCapError, UnknownModelError
from .numerics import falling

Dist = Dict[Tuple[int, ...], Fraction]

__all__ = [
    "enumerate_all",
    "dist_moment",
    "marginal_fall_moment",
    "enumerate_kstirling_perms",
    "enumerate_rooted_trees",
    "enumerate_parking_functions",
]


def _add(dist: Dist, key: Tuple[int, ...], p: Fraction) -> None:
    dist[key] = dist.get(key, Fraction(0)) + p


def _counts_vector(sizes: Iterable[int], n: int) -> Tuple[int, ...]:
    vec = [0] * n
    for s in sizes:
        vec[s - 1] += 1
    return tuple(vec)


def dist_moment(dist: Dist, f: Callable[[Tuple[int, ...]], Fraction]) -> Fraction:
    return sum((p * f(v) for v, p in dist.items()), Fraction(0))


def marginal_fall_moment(dist: Dist, j: int, s: int) -> Fraction:
    """E(falling(count of part size j, s)) under an exact distribution."""
    return dist_moment(dist, lambda v: Fraction(falling(v[j - 1], s)))


# ---------------------------------------------------------------------------
# outcome-space generators


def enumerate_kstirling_perms(n: int, k: int) -> List[Tuple[int, ...]]:
    """All k-Stirling permutations of order n, by exhaustive growth
    (inserting the block m^k at every slot); each is equally likely."""
    perms: List[Tuple[int, ...]] = [tuple([1] * k)]
    for m in range(2, n + 1):
        nxt = []
        for p in perms:
            for pos in range(len(p) + 1):
                nxt.append(p[:pos] + tuple([m] * k) + p[pos:])
        perms = nxt
    return perms


def _kstirling_blocks(perm: Sequence[int], k: int) -> Counter:
    last = {}
    for i, v in enumerate(perm):
        last[v] = i
    out: Counter = Counter()
    i = 0
    while i < len(perm):
        e = last[perm[i]]
        out[(e - i + 1) // k] += 1
        i = e + 1
    return out


def enumerate_rooted_trees(n: int) -> Iterator[Dict[int, int]]:
    """All n^{n-1} rooted labelled trees on {1..n} as parent maps
    (root's parent is 0), via sequence codes plus a root choice."""
    if n == 1:
        yield {1: 0}
        return
    for code in itertools.product(range(1, n + 1), repeat=n - 2):
        edges = _prufer_edges(code, n)
        for root in range(1, n + 1):
            yield _orient(edges, root, n)


def _prufer_edges(code: Sequence[int], n: int) -> List[Tuple[int, int]]:
    deg = [1] * (n + 1)
    for v in code:
        deg[v] += 1
    edges = []
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for v in code:
        edges.append((leaf, v))
        deg[v] -= 1
        if deg[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return edges


def _orient(edges: Sequence[Tuple[int, int]], root: int, n: int) -> Dict[int, int]:
    adj: Dict[int, List[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = {root: 0}
    stack = [root]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                stack.append(u)
    return parent


def _record_sizes(parent: Dict[int, int]) -> Counter:
    """Min-record subtree sizes of a rooted labelled tree (parent map)."""
    n = len(parent)
    kids: Dict[int, List[int]] = {v: [] for v in range(0, n + 1)}
    for v, p in parent.items():
        kids[p].append(v)
    nearest: Dict[int, int] = {}
    pathmin: Dict[int, int] = {}
    counts: Dict[int, int] = {}
    stack = list(kids[0])
    while stack:
        v = stack.pop()
        p = parent[v]
        if p == 0:
            pathmin[v] = v
            nearest[v] = v
        else:
            pathmin[v] = min(v, pathmin[p])
            nearest[v] = v if v < pathmin[p] else nearest[p]
        stack.extend(kids[v])
    for v in parent:
        counts[nearest[v]] = counts.get(nearest[v], 0) + 1
    return Counter(counts.values())


def _subtree_nodes(parent: Dict[int, int], y: int) -> List[int]:
    kids: Dict[int, List[int]] = {}
    for v, p in parent.items():
        kids.setdefault(p, []).append(v)
    out = []
    stack = [y]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(kids.get(v, []))
    return out


def _edgecut_dist(parent: Dict[int, int]) -> Dist:
    """Distribution of discarded-subtree size multisets for the random
    edge-cutting of one fixed tree (recursion over uniform edge choices)."""
    n0 = len(parent)

    def rec(tree: Dict[int, int]) -> Dict[Tuple[int, ...], Fraction]:
        edges = [v for v, p in tree.items() if p != 0]
        if not edges:
            return {tuple([0] * n0): Fraction(1)}
        out: Dict[Tuple[int, ...], Fraction] = {}
        p_each = Fraction(1, len(edges))
        for y in edges:
            dropped = _subtree_nodes(tree, y)
            rest = {v: p for v, p in tree.items() if v not in dropped}
            for vec, q in rec(rest).items():
                lst = list(vec)
                lst[len(dropped) - 1] += 1
                out[tuple(lst)] = out.get(tuple(lst), Fraction(0)) + p_each * q
        return out

    return rec(parent)


def _node_removal_dist(parent: Dict[int, int]) -> Dist:
    """Same for the node-removal procedure (uniform node, cut its subtree,
    iterate until the tree is gone)."""
    n0 = len(parent)

    def rec(tree: Dict[int, int]) -> Dict[Tuple[int, ...], Fraction]:
        if not tree:
            return {tuple([0] * n0): Fraction(1)}
        out: Dict[Tuple[int, ...], Fraction] = {}
        p_each = Fraction(1, len(tree))
        for y in tree:
            dropped = _subtree_nodes(tree, y)
            rest = {v: p for v, p in tree.items() if v not in dropped}
            for vec, q in rec(rest).items():
                lst = list(vec)
                lst[len(dropped) - 1] += 1
                out[tuple(lst)] = out.get(tuple(lst), Fraction(0)) + p_each * q
        return out

    return rec(parent)


def enumerate_parking_functions(n: int) -> List[Tuple[int, ...]]:
    out = []
    for seq in itertools.product(range(1, n + 1), repeat=n):
        if _is_parking(seq):
            out.append(seq)
    return out


def _is_parking(seq: Sequence[int]) -> bool:
    n = len(seq)
    return all(sum(1 for x in seq if x <= k) >= k for k in range(1, n + 1))


def _parking_increments(pf: Sequence[int]) -> Counter:
    n = len(pf)
    occ = [False] * (n + 2)
    inc: Counter = Counter()
    c = 0
    for pref in pf:
        p = pref
        while p <= n and occ[p]:
            p += 1
        if p > n:
            raise ValueError("not a parking function")
        occ[p] = True
        if p == c + 1:
            old = c
            c = p
            while c + 1 <= n and occ[c + 1]:
                c += 1
            inc[c - old] += 1
    return inc


# ---------------------------------------------------------------------------
# weighted-process enumerators


def _increasing_tree_histories(family: str, n: int, alpha: Fraction, d: int) -> Iterator[Tuple[Dict[int, int], Fraction]]:
    """All attachment histories of the evolution process with their exact
    probabilities; yields (parent map over 1..n, probability)."""

    def weight(outdeg: int) -> Fraction:
        if family == "rect":
            return Fraction(1)
        if family == "gport":
            return outdeg + alpha
        if family == "dary":
            return Fraction(d - outdeg)
        raise UnknownModelError(family)

    def rec(parent: Dict[int, int], outdeg: Dict[int, int], prob: Fraction) -> Iterator[Tuple[Dict[int, int], Fraction]]:
        i = len(parent)
        if i == n:
            yield dict(parent), prob
            return
        total = sum(weight(outdeg[v]) for v in parent)
        for v in list(parent):
            w = weight(outdeg[v])
            if w == 0:
                continue
            parent[i + 1] = v
            outdeg[v] += 1
            outdeg[i + 1] = 0
            yield from rec(parent, outdeg, prob * w / total)
            del parent[i + 1]
            del outdeg[i + 1]
            outdeg[v] -= 1

    yield from rec({1: 0}, {1: 0}, Fraction(1))


def _crp_histories(n: int, a: Fraction, theta: Fraction) -> Dist:
    """Exact distribution of table-size count vectors after n customers."""
    # state: sorted tuple of table sizes
    states: Dict[Tuple[int, ...], Fraction] = {(1,): Fraction(1)}
    for t in range(1, n):
        nxt: Dict[Tuple[int, ...], Fraction] = {}
        for sizes, p in states.items():
            k = len(sizes)
            denom = t + theta
            newp = p * (theta + k * a) / denom
            key = tuple(sorted(sizes + (1,)))
            nxt[key] = nxt.get(key, Fraction(0)) + newp
            for i, sz in enumerate(sizes):
                q = p * (sz - a) / denom
                key2 = tuple(sorted(sizes[:i] + (sz + 1,) + sizes[i + 1 :]))
                nxt[key2] = nxt.get(key2, Fraction(0)) + q
        states = nxt
    out: Dist = {}
    for sizes, p in states.items():
        _add(out, _counts_vector(sizes, n), p)
    return out


def _dimurn_dist(n: int, m: int, alpha: int, delta: int) -> Dist:
    """Exact law of X_hat = remaining white units when black runs out."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def rec(w: int, b: int) -> Tuple[Tuple[int, Fraction], ...]:
        if b == 0:
            return ((w // alpha, Fraction(1)),)
        out: Dict[int, Fraction] = {}
        total = w + b
        if w > 0:
            for val, p in rec(w - alpha, b):
                out[val] = out.get(val, Fraction(0)) + Fraction(w, total) * p
        for val, p in rec(w, b - delta):
            out[val] = out.get(val, Fraction(0)) + Fraction(b, total) * p
        return tuple(out.items())

    dist: Dist = {}
    for val, p in rec(alpha * n, delta * m):
        _add(dist, (val,), p)
    return dist


def _triangular_dist(n: int, w0: int, b0: int, alpha: int, beta: int) -> Dist:
    """Exact law of the white count W_n of the balanced triangular urn."""
    g = alpha + beta
    states: Dict[int, Fraction] = {w0: Fraction(1)}
    total = w0 + b0
    for step in range(n):
        nxt: Dict[int, Fraction] = {}
        for w, p in states.items():
            b = total - w
            nxt[w + alpha] = nxt.get(w + alpha, Fraction(0)) + p * Fraction(w, total)
            nxt[w] = nxt.get(w, Fraction(0)) + p * Fraction(b, total)
        states = nxt
        total += g
    out: Dist = {}
    for w, p in states.items():
        _add(out, (w,), p)
    return out


# ---------------------------------------------------------------------------
# dispatch


def enumerate_all(tag: str, n: int, params: Dict) -> Dist:
    """Exact distribution of a model's statistic vector by exhaustive
    enumeration; raises :class:`EnumerationCapError` beyond the hard caps
    (multiset permutations of 15 symbols, trees of 6 nodes, 1e5 urn paths,
    1e5 preference sequences, 1e4 bridges, 1e5 mappings)."""
    if tag == "blocks":
        k = int(params["k"])
        if k * n > 15:
            raise EnumerationCapError("k-Stirling enumeration capped at kn <= 15")
        dist: Dist = {}
        perms = enumerate_kstirling_perms(n, k)
        p = Fraction(1, len(perms))
        for perm in perms:
            _add(dist, _counts_vector(_kstirling_blocks(perm, k).elements(), n), p)
        return dist
    if tag == "dimurn":
        m = int(params["m"])
        alpha, delta = int(params.get("alpha", 1)), int(params.get("delta", 1))
        if math.comb(n + m, m) > 100000:
            raise EnumerationCapError("urn path enumeration capped at 1e5 paths")
        return _dimurn_dist(n, m, alpha, delta)
    if tag == "triangular":
        if 2**n > 100000:
            raise EnumerationCapError("urn path enumeration capped at 1e5 paths")
        return _triangular_dist(n, int(params["w0"]), int(params["b0"]), int(params["alpha"]), int(params["beta"]))
    if tag in ("descendants", "nodedeg", "branches"):
        if n > 6:
            raise EnumerationCapError("evolution-tree enumeration capped at n <= 6")
        family = str(params.get("family", "gport" if tag != "descendants" else "rect"))
        alpha = Fraction(params.get("alpha", 1))
        d = int(params.get("d", 2))
        j = int(params["j"])
        dist = {}
        for parent, p in _increasing_tree_histories(family, n, alpha, d):
            kids: Dict[int, List[int]] = {}
            size = {v: 1 for v in parent}
            for v in sorted(parent, reverse=True):
                if parent[v]:
                    size[parent[v]] += size[v]
                kids.setdefault(parent[v], []).append(v)
            if tag == "descendants":
                _add(dist, (size[j] - 1,), p)
            elif tag == "nodedeg":
                _add(dist, (len(kids.get(j, [])),), p)
            else:
                _add(dist, _counts_vector((size[c] for c in kids.get(j, [])), n), p)
        return dist
    if tag == "crp":
        if n > 9:
            raise EnumerationCapError("CRP enumeration capped at n <= 9")
        a, theta = Fraction(params["a"]), Fraction(params["theta"])
        return _crp_histories(n, a, theta)
    if tag == "records":
        if n > 6:
            raise EnumerationCapError("tree enumeration capped at n <= 6")
        dist = {}
        p = Fraction(1, n ** (n - 1))
        for parent in enumerate_rooted_trees(n):
            _add(dist, _counts_vector(_record_sizes(parent).elements(), n), p)
        return dist
    if tag == "noderemoval":
        if n > 6:
            raise EnumerationCapError("tree enumeration capped at n <= 6")
        dist = {}
        p = Fraction(1, n ** (n - 1))
        for parent in enumerate_rooted_trees(n):
            for vec, q in _node_removal_dist(parent).items():
                _add(dist, vec, p * q)
        return dist
    if tag == "edgecut":
        if n > 6:
            raise EnumerationCapError("tree enumeration capped at n <= 6")
        dist = {}
        p = Fraction(1, n ** (n - 1))
        for parent in enumerate_rooted_trees(n):
            for vec, q in _edgecut_dist(parent).items():
                _add(dist, vec, p * q)
        return dist
    if tag == "parking":
        if (n + 1) ** n > 100000:
            raise EnumerationCapError("parking enumeration capped at (n+1)^n <= 1e5")
        dist = {}
        pfs = enumerate_parking_functions(n)
        p = Fraction(1, len(pfs))
        for pf in pfs:
            _add(dist, _counts_vector(_parking_increments(pf).elements(), n), p)
        return dist
    if tag == "bridge":
        if math.comb(2 * n, n) > 10000:
            raise EnumerationCapError("bridge enumeration capped at C(2n,n) <= 1e4")
        dist = {}
        p = Fraction(1, math.comb(2 * n, n))
        for ups in itertools.combinations(range(2 * n), n):
            steps = [-1] * (2 * n)
            for i in ups:
                steps[i] = 1
            h = 0
            last = 0
            sizes = []
            for i, sgn in enumerate(steps):
                h += sgn
                if h == 0:
                    sizes.append((i + 1 - last) // 2)
                    last = i + 1
            _add(dist, _counts_vector(sizes, n), p)
        return dist
    if tag == "mapping":
        if n**n > 100000:
            raise EnumerationCapError("mapping enumeration capped at n^n <= 1e5")
        dist = {}
        p = Fraction(1, n**n)
        for f in itertools.product(range(1, n + 1), repeat=n):
            _add(dist, _counts_vector(_mapping_tree_sizes(f).elements(), n), p)
        return dist
    raise UnknownModelError(f"no enumerator for model {tag!r}")


def _mapping_tree_sizes(f: Sequence[int]) -> Counter:
    n = len(f)
    on_cycle = set()
    for x in range(1, n + 1):
        seen = {}
        v = x
        while v not in seen:
            seen[v] = True
            v = f[v - 1]
        # v is on a cycle reachable from x; walk the cycle
        start = v
        while True:
            on_cycle.add(v)
            v = f[v - 1]
            if v == start:
                break
    root_of = {}

    def find_root(x: int) -> int:
        path = []
        while x not in root_of:
            if x in on_cycle:
                root_of[x] = x
                break
            path.append(x)
            x = f[x - 1]
        r = root_of[x]
        for y in path:
            root_of[y] = r
        return r

    counts: Dict[int, int] = {}
    for x in range(1, n + 1):
        r = find_root(x)
        counts[r] = counts.get(r, 0) + 1
    return Counter(counts.values())
