"""Hot simulation kernels: numba-jitted, with a pure NumPy/Python fallback.

Set ``MIXPOISSON_DISABLE_NJIT=1`` (or uninstall numba) to run the fallback
path; results are bit-identical either way because every kernel draws from
the same inline splitmix64 counter generator (IEEE float operations and
masked 64-bit integer mixing behave identically under numba and NumPy).
Replicate r of a Monte Carlo run uses stream ``stream0 + r``, so splitting
replicates across workers cannot change results.

The only exception to bit-identity is :func:`poisson_partial_em_array`,
which has a vectorized fallback with a different summation order (values
agree to ~1e-14 relative).
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["NUMBA_ENABLED", "active_path", "rng_new", "rng_words"]


def _disabled_by_env() -> bool:
    return os.environ.get("MIXPOISSON_DISABLE_NJIT", "").strip().lower() not in ("", "0", "false")


NUMBA_ENABLED = False
if not _disabled_by_env():
    try:
        from numba import njit as _numba_njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def _kernel(f):
        return _numba_njit(cache=True)(f)
else:
    def _kernel(f):
        return f


def active_path() -> str:
    return "numba" if NUMBA_ENABLED else "pure"


U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@_kernel
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@_kernel
def rng_new(seed, stream):
    """Counter-based generator state: uint64[2] = (per-stream key, counter)."""
    st = np.zeros(2, dtype=np.uint64)
    st[0] = _mix64(seed ^ _mix64((stream + U64(1)) * _GOLDEN))
    st[1] = U64(0)
    return st


@_kernel
def _next_u64(st):
    st[1] = st[1] + U64(1)
    return _mix64(st[0] + st[1] * _GOLDEN)


@_kernel
def _u01(st):
    return (_next_u64(st) >> U64(11)) * _INV53


@_kernel
def _below(st, n):
    # uniform int in [0, n); n <= 2^53 so the float route is exact enough
    return np.int64(_u01(st) * n)


@_kernel
def rng_words(seed, stream, count):
    """First ``count`` raw words of a stream (used to pin determinism)."""
    st = rng_new(seed, stream)
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = _next_u64(st)
    return out


@_kernel
def rng_pick(st, n):
    """Advance the state and return a uniform int in [0, n)."""
    return _below(st, n)


# ---------------------------------------------------------------------------
# trees: uniform rooted labelled (Cayley) trees and record subtrees


@_kernel
def sample_cayley_parents(n, st):
    """Uniform rooted labelled tree on n nodes (labels = indices 0..n-1).

    Uniform code in [n]^(n-2) decoded into an unrooted tree, plus a uniform
    root: n^(n-2) * n = n^(n-1) equally likely outcomes.  parent[root] = -1.
    """
    parent = np.full(n, -1, np.int64)
    if n == 1:
        return parent
    code = np.empty(max(n - 2, 1), np.int64)
    for i in range(n - 2):
        code[i] = _below(st, n)
    deg = np.ones(n, np.int64)
    for i in range(n - 2):
        deg[code[i]] += 1
    eu = np.empty(n - 1, np.int64)
    ev = np.empty(n - 1, np.int64)
    ptr = 0
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for i in range(n - 2):
        v = code[i]
        eu[i] = leaf
        ev[i] = v
        deg[v] -= 1
        if deg[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    eu[n - 2] = leaf
    ev[n - 2] = n - 1
    root = _below(st, n)
    # orient away from the root over a CSR adjacency
    cnt = np.zeros(n + 1, np.int64)
    for i in range(n - 1):
        cnt[eu[i] + 1] += 1
        cnt[ev[i] + 1] += 1
    off = np.cumsum(cnt)
    adj = np.empty(2 * (n - 1), np.int64)
    fill = off[:n].copy()
    for i in range(n - 1):
        adj[fill[eu[i]]] = ev[i]
        fill[eu[i]] += 1
        adj[fill[ev[i]]] = eu[i]
        fill[ev[i]] += 1
    order = np.empty(n, np.int64)
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        v = order[head]
        head += 1
        for t in range(off[v], off[v + 1]):
            u = adj[t]
            if u != root and parent[u] == -1 and u != parent[v]:
                parent[u] = v
                order[tail] = u
                tail += 1
    return parent


@_kernel
def _children_csr(parent):
    n = parent.shape[0]
    cnt = np.zeros(n + 1, np.int64)
    root = 0
    for v in range(n):
        if parent[v] < 0:
            root = v
        else:
            cnt[parent[v] + 1] += 1
    off = np.cumsum(cnt)
    child = np.empty(n - 1 if n > 1 else 1, np.int64)
    fill = off[:n].copy()
    for v in range(n):
        p = parent[v]
        if p >= 0:
            child[fill[p]] = v
            fill[p] += 1
    return root, off, child


@_kernel
def _bfs_order(parent):
    n = parent.shape[0]
    root, off, child = _children_csr(parent)
    order = np.empty(n, np.int64)
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        v = order[head]
        head += 1
        for t in range(off[v], off[v + 1]):
            order[tail] = child[t]
            tail += 1
    return order


@_kernel
def record_subtree_counts(parent, jcap, row):
    """Histogram (sizes 1..jcap) of min-record subtree sizes of one tree.

    A node is a record when its label is smallest on the path from the
    root; every node belongs to the subtree of its nearest record ancestor.
    """
    n = parent.shape[0]
    order = _bfs_order(parent)
    pathmin = np.empty(n, np.int64)
    nearest = np.empty(n, np.int64)
    size = np.zeros(n, np.int64)
    for i in range(n):
        v = order[i]
        p = parent[v]
        if p < 0:
            pathmin[v] = v
            nearest[v] = v
        else:
            pathmin[v] = v if v < pathmin[p] else pathmin[p]
            nearest[v] = v if v < pathmin[p] else nearest[p]
    for v in range(n):
        size[nearest[v]] += 1
    total = 0
    for v in range(n):
        if nearest[v] == v:
            total += 1
            if size[v] <= jcap:
                row[size[v] - 1] += 1
    return total


@_kernel
def mc_records(n, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        parent = sample_cayley_parents(n, st)
        record_subtree_counts(parent, jcap, counts[rep])
    return counts


@_kernel
def edgecut_size_counts(parent, jcap, row, st):
    """Histogram of subtree sizes discarded by uniform random edge cuts
    until the root is isolated; returns the number of cuts."""
    n = parent.shape[0]
    root, off, child = _children_csr(parent)
    alive = np.ones(n, np.bool_)
    cand = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    m = 0
    for v in range(n):
        if v != root:
            cand[m] = v
            pos[v] = m
            m += 1
    stack = np.empty(n, np.int64)
    cuts = 0
    while m > 0:
        y = cand[_below(st, m)]
        cnt = 0
        sp = 1
        stack[0] = y
        while sp > 0:
            sp -= 1
            u = stack[sp]
            if not alive[u]:
                continue
            alive[u] = False
            cnt += 1
            pu = pos[u]
            last = cand[m - 1]
            cand[pu] = last
            pos[last] = pu
            m -= 1
            for t in range(off[u], off[u + 1]):
                c = child[t]
                if alive[c]:
                    stack[sp] = c
                    sp += 1
        cuts += 1
        if cnt <= jcap:
            row[cnt - 1] += 1
    return cuts


@_kernel
def mc_edgecut(n, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        parent = sample_cayley_parents(n, st)
        edgecut_size_counts(parent, jcap, counts[rep], st)
    return counts


# ---------------------------------------------------------------------------
# bridges


@_kernel
def sample_bridge_steps(n, st):
    steps = np.empty(2 * n, np.int8)
    for i in range(n):
        steps[i] = 1
    for i in range(n, 2 * n):
        steps[i] = -1
    for i in range(2 * n - 1, 0, -1):
        k = _below(st, i + 1)
        tmp = steps[i]
        steps[i] = steps[k]
        steps[k] = tmp
    return steps


@_kernel
def bridge_visit_counts(steps, jcap, row):
    """Histogram of half-lengths of excursions between returns to height 0."""
    h = 0
    last = 0
    visits = 0
    for i in range(steps.shape[0]):
        h += steps[i]
        if h == 0:
            j = (i + 1 - last) // 2
            visits += 1
            if j <= jcap:
                row[j - 1] += 1
            last = i + 1
    return visits


@_kernel
def mc_bridges(n, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        steps = sample_bridge_steps(n, st)
        bridge_visit_counts(steps, jcap, counts[rep])
    return counts


# ---------------------------------------------------------------------------
# random mappings


@_kernel
def sample_mapping_func(n, st):
    f = np.empty(n, np.int64)
    for i in range(n):
        f[i] = _below(st, n)
    return f


@_kernel
def mapping_tree_size_counts(f, jcap, row):
    """Sizes of the trees rooted at cyclic points of the functional graph."""
    n = f.shape[0]
    indeg = np.zeros(n, np.int64)
    for x in range(n):
        indeg[f[x]] += 1
    stack = np.empty(n, np.int64)
    sp = 0
    removed = np.zeros(n, np.bool_)
    for x in range(n):
        if indeg[x] == 0:
            stack[sp] = x
            sp += 1
    while sp > 0:
        sp -= 1
        x = stack[sp]
        removed[x] = True
        y = f[x]
        indeg[y] -= 1
        if indeg[y] == 0:
            stack[sp] = y
            sp += 1
    # removed == non-cyclic; walk each non-cyclic node to its cyclic root
    root_of = np.full(n, -1, np.int64)
    size = np.zeros(n, np.int64)
    for x in range(n):
        if not removed[x]:
            root_of[x] = x
    for x in range(n):
        v = x
        sp = 0
        while root_of[v] < 0:
            stack[sp] = v
            sp += 1
            v = f[v]
        r = root_of[v]
        for t in range(sp):
            root_of[stack[t]] = r
    for x in range(n):
        size[root_of[x]] += 1
    cyclic = 0
    for x in range(n):
        if not removed[x]:
            cyclic += 1
            if size[x] <= jcap:
                row[size[x] - 1] += 1
    return cyclic


@_kernel
def mc_mappings(n, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        f = sample_mapping_func(n, st)
        mapping_tree_size_counts(f, jcap, counts[rep])
    return counts


# ---------------------------------------------------------------------------
# urns


@_kernel
def sim_urn2(a11, a12, a21, a22, w0, b0, draws, stop_black_zero, st):
    """Two-colour urn; returns (w, b, status), status -1 = tenability violated."""
    w = w0
    b = b0
    step = 0
    while True:
        if stop_black_zero != 0:
            if b == 0:
                break
        elif step >= draws:
            break
        if w + b <= 0:
            return w, b, -1
        t = _below(st, w + b)
        if t < w:
            w += a11
            b += a12
        else:
            w += a21
            b += a22
        if w < 0 or b < 0:
            return w, b, -1
        step += 1
    return w, b, 0


@_kernel
def mc_triangular(n, w0, b0, alpha, beta, reps, seed, stream0):
    """White-ball counts W_n of the balanced triangular urn, one per replicate."""
    out = np.empty(reps, np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        w, b, status = sim_urn2(alpha, beta, 0, alpha + beta, w0, b0, n, 0, st)
        out[rep] = w if status == 0 else -1
    return out


@_kernel
def mc_dimurn(n, m, alpha, delta, reps, seed, stream0):
    """Remaining white units X_hat = W/alpha when black runs out, per replicate."""
    out = np.empty(reps, np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        w, b, status = sim_urn2(-alpha, 0, 0, -delta, alpha * n, delta * m, 0, 1, st)
        out[rep] = w // alpha if status == 0 else -1
    return out


# ---------------------------------------------------------------------------
# Chinese restaurant process


@_kernel
def crp_table_sizes(n, a_d, th_d, denom, st, sizes):
    """One CRP run with scaled-integer probabilities; returns table count.

    Joining an existing table of size s has weight s*denom - a_d, a new
    table has weight th_d + k*a_d, over total t*denom + th_d at time t.
    """
    k = 0
    for t in range(n):
        if t == 0:
            sizes[0] = 1
            k = 1
            continue
        r = _below(st, t * denom + th_d)
        if r < th_d + k * a_d:
            sizes[k] = 1
            k += 1
        else:
            r -= th_d + k * a_d
            for i in range(k):
                r -= sizes[i] * denom - a_d
                if r < 0:
                    sizes[i] += 1
                    break
    return k


@_kernel
def mc_crp(n, a_d, th_d, denom, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    sizes = np.empty(n, np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        k = crp_table_sizes(n, a_d, th_d, denom, st, sizes)
        for i in range(k):
            if sizes[i] <= jcap:
                counts[rep, sizes[i] - 1] += 1
    return counts


# ---------------------------------------------------------------------------
# k-Stirling permutations and block decomposition


@_kernel
def sample_kstirling(n, k, st):
    """Uniform k-Stirling permutation of order n by random growth: the
    string (m+1)^k is inserted at one of km+1 slots, each extension being a
    distinct permutation."""
    perm = np.zeros(n * k, np.int64)
    for i in range(k):
        perm[i] = 1
    length = k
    for m in range(1, n):
        pos = _below(st, k * m + 1)
        for i in range(length - 1, pos - 1, -1):
            perm[i + k] = perm[i]
        for i in range(pos, pos + k):
            perm[i] = m + 1
        length += k
    return perm


@_kernel
def block_size_counts(perm, k, jcap, row):
    """Histogram of block sizes in units of k (a block spans from a value's
    first occurrence to its last, scanned left to right maximally)."""
    kn = perm.shape[0]
    n = kn // k
    last = np.zeros(n + 1, np.int64)
    for i in range(kn):
        last[perm[i]] = i
    i = 0
    blocks = 0
    while i < kn:
        e = last[perm[i]]
        ell = (e - i + 1) // k
        blocks += 1
        if ell <= jcap:
            row[ell - 1] += 1
        i = e + 1
    return blocks


@_kernel
def mc_kstirling(n, k, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        perm = sample_kstirling(n, k, st)
        block_size_counts(perm, k, jcap, counts[rep])
    return counts


# ---------------------------------------------------------------------------
# increasing trees (uniform / preferential / d-ary attachment)


@_kernel
def _fen_add(tree, size, i, delta):
    i += 1
    while i <= size:
        tree[i] += delta
        i += i & (-i)


@_kernel
def _fen_pick(tree, size, hibit, target):
    """Smallest index with prefix sum > target (weights non-negative)."""
    pos = 0
    rem = target
    bit = hibit
    while bit > 0:
        nxt = pos + bit
        if nxt <= size and tree[nxt] <= rem:
            pos = nxt
            rem -= tree[nxt]
        bit >>= 1
    return pos


@_kernel
def sample_increasing_tree(family, n, wnum, wden, d, st):
    """Evolution process for increasing trees; parent[v] < v always.

    family 0: uniform attachment (weight 1 per node)
    family 1: preferential with weight outdeg(v) + alpha, alpha = wnum/wden
              (scaled to integers: wden*outdeg + wnum)
    family 2: d-ary, weight d - outdeg(v)
    Node selection is a Fenwick-tree descend, O(log n) per attachment.
    """
    parent = np.full(n, -1, np.int64)
    if n == 1:
        return parent
    if family == 0:
        for v in range(1, n):
            parent[v] = _below(st, v)
        return parent
    tree = np.zeros(n + 1, np.int64)
    hibit = 1
    while hibit * 2 <= n:
        hibit *= 2
    if family == 1:
        w_new = wnum
        w_inc = wden
    else:
        w_new = d
        w_inc = -1
    _fen_add(tree, n, 0, w_new)
    total = w_new
    for v in range(1, n):
        p = _fen_pick(tree, n, hibit, _below(st, total))
        parent[v] = p
        _fen_add(tree, n, p, w_inc)
        _fen_add(tree, n, v, w_new)
        total += w_inc + w_new
    return parent


@_kernel
def subtree_sizes_increasing(parent):
    """Subtree sizes for trees with parent[v] < v (single reverse sweep)."""
    n = parent.shape[0]
    size = np.ones(n, np.int64)
    for v in range(n - 1, 0, -1):
        size[parent[v]] += size[v]
    return size


@_kernel
def mc_descendants(family, n, j, wnum, wden, d, reps, seed, stream0):
    """D_hat = (size of subtree at node j) - 1 per replicate (node j is 1-based)."""
    out = np.empty(reps, np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        parent = sample_increasing_tree(family, n, wnum, wden, d, st)
        size = subtree_sizes_increasing(parent)
        out[rep] = size[j - 1] - 1
    return out


@_kernel
def mc_nodedeg(family, n, j, wnum, wden, d, reps, seed, stream0):
    out = np.empty(reps, np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        parent = sample_increasing_tree(family, n, wnum, wden, d, st)
        deg = 0
        for v in range(n):
            if parent[v] == j - 1:
                deg += 1
        out[rep] = deg
    return out


@_kernel
def mc_branches(family, n, j, wnum, wden, d, jcap, reps, seed, stream0):
    """Histogram of branch (child-subtree) sizes at node j per replicate."""
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        parent = sample_increasing_tree(family, n, wnum, wden, d, st)
        size = subtree_sizes_increasing(parent)
        for v in range(n):
            if parent[v] == j - 1 and size[v] <= jcap:
                counts[rep, size[v] - 1] += 1
    return counts


# ---------------------------------------------------------------------------
# parking functions


@_kernel
def _pf_find(link, x):
    root = x
    while link[root] != root:
        root = link[root]
    while link[x] != root:
        nxt = link[x]
        link[x] = root
        x = nxt
    return root


@_kernel
def sample_parking_function(n, st):
    """Uniform parking function of size n via the circular construction:
    park n cars on a cycle of n+1 slots with uniform preferences, then
    rotate so the single empty slot becomes slot n+1 (which no car used)."""
    s = np.empty(n, np.int64)
    for i in range(n):
        s[i] = _below(st, n + 1)
    link = np.arange(n + 1, dtype=np.int64)
    for i in range(n):
        p = _pf_find(link, s[i])
        link[p] = (p + 1) % (n + 1)
        # path roots stay valid: find() follows to the next free slot
    empty = _pf_find(link, 0)
    pf = np.empty(n, np.int64)
    for i in range(n):
        pf[i] = (s[i] - empty - 1) % (n + 1) + 1
    return pf


@_kernel
def parking_increment_counts(pf, jcap, row):
    """Histogram of initial-cluster increment amounts during the parking
    procedure; returns -1 if the input is not a parking function."""
    n = pf.shape[0]
    link = np.arange(n + 2, dtype=np.int64)
    occ = np.zeros(n + 2, np.bool_)
    c = 0
    for i in range(n):
        p = _pf_find(link, pf[i])
        if p > n:
            return -1
        occ[p] = True
        link[p] = p + 1
        if p == c + 1:
            old = c
            c = p
            while c + 1 <= n and occ[c + 1]:
                c += 1
            if c - old <= jcap:
                row[c - old - 1] += 1
    return 0


@_kernel
def mc_parking(n, jcap, reps, seed, stream0):
    counts = np.zeros((reps, jcap), np.int64)
    for rep in range(reps):
        st = rng_new(seed, stream0 + U64(rep))
        pf = sample_parking_function(n, st)
        parking_increment_counts(pf, jcap, counts[rep])
    return counts


# ---------------------------------------------------------------------------
# scaled coefficients of (1-T)^{-2} for the large-n numeric edge-cut route


@_kernel
def _ppe_loop(nmax):
    out = np.empty(nmax + 1, np.float64)
    out[0] = 1.0
    for m in range(1, nmax + 1):
        # descending stable evaluation of e^-m sum_{r<=m} m^r/r!
        u = math.exp(m * math.log(m) - m - math.lgamma(m + 1.0))
        total = u
        for r in range(m, 0, -1):
            u = u * r / m
            total += u
        out[m] = total
    return out


def _ppe_numpy(nmax: int) -> np.ndarray:
    out = np.empty(nmax + 1, np.float64)
    out[0] = 1.0
    lgf = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, nmax + 1, dtype=np.float64)))))
    for m in range(1, nmax + 1):
        r = np.arange(m + 1)
        out[m] = float(np.exp(r * math.log(m) - m - lgf[: m + 1]).sum())
    return out


def poisson_partial_em_array(nmax: int) -> np.ndarray:
    """dhat[m] = e^{-m} sum_{r=0}^{m} m^r / r!, m = 0..nmax.

    By Lagrange inversion this equals e^{-m} [z^m](1 - T(z))^{-2}; tends to
    1/2.  Kernel is O(nmax^2); the fallback vectorizes per m.
    """
    if nmax < 0:
        raise ValueError("nmax >= 0 required")
    if NUMBA_ENABLED:
        return _ppe_loop(nmax)
    return _ppe_numpy(nmax)
