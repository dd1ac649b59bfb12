"""Streaming counting kernels and coupling-enumeration kernels.

Numba-compiled loops with pure-python/numpy fallbacks behind the same call
signatures.  The fallbacks are correctness-first; the compiled paths carry
the genome-scale throughput requirement.  Selection happens at call time via
HAVE_NUMBA so tests can force the fallback path.

Accumulator widths: chunk-local tallies are int64.  A single chunk of length
L can add at most L*n to one global-pair cell, so callers must keep
L * n < 2**63 (the builders spill chunk totals into Python ints, which makes
the public results arbitrary precision).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba present in normal installs
    njit = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pair-table pass
#
# Contract: pair_chunk(chunk, cnt, adj, prev) -> (gt, new_prev)
#   chunk: 1-d integer array of alphabet indices
#   cnt:   int64[h], running symbol counts over everything already fed;
#          updated in place
#   adj:   int64[h, h], running adjacent-pair counts; updated in place
#   prev:  previous symbol (int) or -1 at a stream start / after a break
#   gt:    int64[h, h] with gt[y, x] = number of ordered pairs (x before y)
#          contributed by this chunk, cross-chunk pairs included
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _pair_chunk_jit(chunk, cnt, adj, prev):
        h = cnt.shape[0]
        gt = np.zeros((h, h), dtype=np.int64)
        p = prev
        for k in range(chunk.shape[0]):
            c = chunk[k]
            row = gt[c]
            for x in range(h):
                row[x] += cnt[x]
            cnt[c] += 1
            if p >= 0:
                adj[p, c] += 1
            p = c
        return gt, p

    @njit(cache=True)
    def _inv_chunk_jit(ranks, cnt):
        h = cnt.shape[0]
        total = np.int64(0)
        for k in range(ranks.shape[0]):
            r = ranks[k]
            for s in range(r + 1, h):
                total += cnt[s]
            cnt[r] += 1
        return total


def _pair_chunk_np(chunk, cnt, adj, prev):
    h = cnt.shape[0]
    gt = np.zeros((h, h), dtype=np.int64)
    if chunk.shape[0] == 0:
        return gt, prev
    masks = [chunk == x for x in range(h)]
    local = np.array([int(m.sum()) for m in masks], dtype=np.int64)
    for x in range(h):
        cum = np.cumsum(masks[x], dtype=np.int64)
        for y in range(h):
            within = int(cum[masks[y]].sum())
            if x == y:
                # inclusive cumsum counts each position against itself
                within -= int(local[x])
            gt[y, x] = within + int(cnt[x]) * int(local[y])
    # adjacent pairs, cross-chunk boundary first
    if prev >= 0:
        adj[prev, chunk[0]] += 1
    if chunk.shape[0] >= 2:
        idx = chunk[:-1].astype(np.int64) * h + chunk[1:]
        adj += np.bincount(idx, minlength=h * h).reshape(h, h)
    cnt += local
    return gt, int(chunk[-1])


def _inv_chunk_np(ranks, cnt):
    h = cnt.shape[0]
    total = 0
    masks = [ranks == r for r in range(h)]
    local = [int(m.sum()) for m in masks]
    for hi in range(h):
        if local[hi] == 0 and cnt[hi] == 0:
            continue
        cum = np.cumsum(masks[hi], dtype=np.int64)
        for lo in range(hi):
            if local[lo] == 0:
                continue
            total += int(cum[masks[lo]].sum()) + int(cnt[hi]) * local[lo]
    for r in range(h):
        cnt[r] += local[r]
    return total


def pair_chunk(chunk, cnt, adj, prev):
    if HAVE_NUMBA:
        return _pair_chunk_jit(chunk, cnt, adj, prev)
    return _pair_chunk_np(chunk, cnt, adj, prev)


def inv_chunk(ranks, cnt):
    """Inversions added by one rank-translated chunk, given running rank counts."""
    if HAVE_NUMBA:
        return int(_inv_chunk_jit(ranks, cnt))
    return _inv_chunk_np(ranks, cnt)


def des_chunk(ranks, prev_rank):
    """Descents added by one rank-translated chunk; prev_rank -1 at stream start."""
    if ranks.shape[0] == 0:
        return 0, prev_rank
    total = int(np.count_nonzero(ranks[:-1] > ranks[1:]))
    if prev_rank >= 0 and prev_rank > ranks[0]:
        total += 1
    return total, int(ranks[-1])


# ---------------------------------------------------------------------------
# conditional mean shift enumeration
#
# The size-bias construction picks an index pair I, a value pair J = (a, b)
# with a > b, and uniform positions i* among the a's and j* among the b's.
# Summing the statistic change over every non-inverted I and every ordered
# position pair (s, t) with value[s] > value[t] gives an integer; dividing by
# (#I choices) * sum_{a>b} n_a n_b yields E(W* - W | pi) exactly.
#
# The descent variant additionally has a decomposed path for large n: for
# triples (i, s, t) whose windows do not touch, the statistic change splits
# into three independent local terms that can be bulk-summed by value; only
# the O(n^2) colliding triples are enumerated branch by branch.
# ---------------------------------------------------------------------------


def _exchange_targets_py(a, i, j, s, t, pos, val):
    # fills (pos, val) with the changed coordinates of the exchange; returns
    # how many entries were written (0..4).
    if i == t and j == s:
        pos[0] = i
        val[0] = a[j]
        pos[1] = j
        val[1] = a[i]
        return 2
    if i == t:
        pos[0] = i
        val[0] = a[s]
        pos[1] = j
        val[1] = a[i]
        pos[2] = s
        val[2] = a[j]
        return 3
    if j == s:
        pos[0] = i
        val[0] = a[j]
        pos[1] = j
        val[1] = a[t]
        pos[2] = t
        val[2] = a[i]
        return 3
    m = 0
    if i != s:
        pos[m] = i
        val[m] = a[s]
        m += 1
        pos[m] = s
        val[m] = a[i]
        m += 1
    if j != t:
        pos[m] = j
        val[m] = a[t]
        m += 1
        pos[m] = t
        val[m] = a[j]
        m += 1
    return m


def _inv_delta_py(a, pos, val, m, n):
    d = 0
    for u in range(m):
        p = pos[u]
        nv = val[u]
        ov = a[p]
        if nv == ov:
            continue
        for q in range(n):
            changed = False
            for v2 in range(m):
                if pos[v2] == q:
                    changed = True
                    break
            if changed:
                continue
            b = a[q]
            if q < p:
                d += (1 if b > nv else 0) - (1 if b > ov else 0)
            else:
                d += (1 if nv > b else 0) - (1 if ov > b else 0)
    for u in range(m):
        for v2 in range(u + 1, m):
            pu = pos[u]
            pv = pos[v2]
            if pu < pv:
                d += (1 if val[u] > val[v2] else 0) - (1 if a[pu] > a[pv] else 0)
            else:
                d += (1 if val[v2] > val[u] else 0) - (1 if a[pv] > a[pu] else 0)
    return d


def _new_val_py(a, pos, val, m, q):
    for u in range(m):
        if pos[u] == q:
            return val[u]
    return a[q]


def _make_des_delta(new_val):
    # factory so the compiled variant binds the compiled value lookup
    def _des_delta(a, pos, val, m, n):
        # sum of descent-indicator changes over adjacent pairs touching a
        # changed coordinate; dedup over pair-left indices is done in
        # registers because this sits inside a four-deep loop
        d = 0
        for u in range(m):
            p = pos[u]
            for o in range(2):
                left = p - 1 + o
                if left < 0 or left > n - 2:
                    continue
                dup = False
                for u2 in range(u + 1):
                    lim = 2 if u2 < u else o
                    for o2 in range(lim):
                        if pos[u2] - 1 + o2 == left:
                            dup = True
                            break
                    if dup:
                        break
                if dup:
                    continue
                lv = new_val(a, pos, val, m, left)
                rv = new_val(a, pos, val, m, left + 1)
                d += (1 if lv > rv else 0) - (1 if a[left] > a[left + 1] else 0)
        return d

    return _des_delta


_des_delta_py = _make_des_delta(_new_val_py)


def _positions_by_value(a, h):
    counts = np.zeros(h, dtype=np.int64)
    for k in range(a.shape[0]):
        counts[a[k]] += 1
    offs = np.zeros(h + 1, dtype=np.int64)
    for v in range(h):
        offs[v + 1] = offs[v] + counts[v]
    plist = np.empty(a.shape[0], dtype=np.int64)
    fill = offs[:h].copy()
    for k in range(a.shape[0]):
        v = a[k]
        plist[fill[v]] = k
        fill[v] += 1
    return counts, offs, plist


def _shift_sum_inv_py(a):
    n = a.shape[0]
    pos = np.empty(4, dtype=np.int64)
    val = np.empty(4, dtype=np.int64)
    total = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if a[i] > a[j]:
                continue
            for s in range(n):
                for t in range(n):
                    if a[s] <= a[t]:
                        continue
                    m = _exchange_targets_py(a, i, j, s, t, pos, val)
                    total += _inv_delta_py(a, pos, val, m, n)
    return total


def _shift_sum_des_py(a):
    n = a.shape[0]
    pos = np.empty(4, dtype=np.int64)
    val = np.empty(4, dtype=np.int64)
    total = 0
    for i in range(n - 1):
        j = i + 1
        if a[i] > a[j]:
            continue
        for s in range(n):
            for t in range(n):
                if a[s] <= a[t]:
                    continue
                m = _exchange_targets_py(a, i, j, s, t, pos, val)
                total += _des_delta_py(a, pos, val, m, n)
    return total


if HAVE_NUMBA:
    _exchange_targets_jit = njit(cache=True, inline="always")(_exchange_targets_py)
    _inv_delta_jit = njit(cache=True)(_inv_delta_py)
    _new_val_jit = njit(cache=True, inline="always")(_new_val_py)
    _des_delta_jit = njit(cache=True)(_make_des_delta(_new_val_jit))
    _positions_by_value_jit = njit(cache=True)(_positions_by_value)

    @njit(cache=True)
    def _shift_sum_inv_jit(a):
        n = a.shape[0]
        h = 0
        for k in range(n):
            if a[k] + 1 > h:
                h = a[k] + 1
        counts, offs, plist = _positions_by_value_jit(a, h)
        pos = np.empty(4, dtype=np.int64)
        val = np.empty(4, dtype=np.int64)
        total = np.int64(0)
        for i in range(n - 1):
            for j in range(i + 1, n):
                if a[i] > a[j]:
                    continue
                for s in range(n):
                    lo_end = offs[a[s]]
                    for idx in range(lo_end):
                        t = plist[idx]
                        m = _exchange_targets_jit(a, i, j, s, t, pos, val)
                        total += _inv_delta_jit(a, pos, val, m, n)
        return total

    @njit(cache=True)
    def _shift_sum_des_brute_jit(a):
        n = a.shape[0]
        h = 0
        for k in range(n):
            if a[k] + 1 > h:
                h = a[k] + 1
        counts, offs, plist = _positions_by_value_jit(a, h)
        pos = np.empty(4, dtype=np.int64)
        val = np.empty(4, dtype=np.int64)
        total = np.int64(0)
        for i in range(n - 1):
            j = i + 1
            if a[i] > a[j]:
                continue
            for s in range(n):
                lo_end = offs[a[s]]
                for idx in range(lo_end):
                    t = plist[idx]
                    m = _exchange_targets_jit(a, i, j, s, t, pos, val)
                    total += _des_delta_jit(a, pos, val, m, n)
        return total

    @njit(cache=True, inline="always")
    def _delta_one_jit(a, n, p, w):
        # descent-indicator change at the two pairs touching position p when
        # only position p changes to value w
        d = 0
        if p >= 1:
            d += (1 if a[p - 1] > w else 0) - (1 if a[p - 1] > a[p] else 0)
        if p <= n - 2:
            d += (1 if w > a[p + 1] else 0) - (1 if a[p] > a[p + 1] else 0)
        return d

    @njit(cache=True, inline="always")
    def _delta_ij_jit(a, n, i, va, vb):
        # descent-indicator change at pairs (i-1,i), (i,i+1), (i+1,i+2) when
        # positions i and i+1 change to values va and vb
        j = i + 1
        d = (1 if va > vb else 0) - (1 if a[i] > a[j] else 0)
        if i >= 1:
            d += (1 if a[i - 1] > va else 0) - (1 if a[i - 1] > a[i] else 0)
        if j <= n - 2:
            d += (1 if vb > a[j + 1] else 0) - (1 if a[j] > a[j + 1] else 0)
        return d

    @njit(cache=True)
    def _shift_sum_des_fast_jit(a, h):
        # decomposition: bulk-sum the factorized clean-triple formula over all
        # triples, then correct every possibly-colliding triple exactly
        n = a.shape[0]
        counts, offs, plist = _positions_by_value_jit(a, h)
        lowcnt = offs[:h]  # lowcnt[v] = positions with value < v
        pos = np.empty(4, dtype=np.int64)
        val = np.empty(4, dtype=np.int64)

        s_lo = np.zeros(h, dtype=np.int64)
        s_hi = np.zeros(h, dtype=np.int64)
        for p in range(n):
            lc = lowcnt[a[p]]
            hc = n - offs[a[p] + 1]
            if lc == 0 and hc == 0:
                continue
            for w in range(h):
                d1 = _delta_one_jit(a, n, p, w)
                if d1 != 0:
                    s_lo[w] += lc * d1
                    s_hi[w] += hc * d1

        # ordered adjacent inverted position pairs (q, r), |q - r| = 1
        n_adj = 0
        for q in range(n - 1):
            if a[q] != a[q + 1]:
                n_adj += 1
        adj_q = np.empty(n_adj, dtype=np.int64)
        adj_r = np.empty(n_adj, dtype=np.int64)
        k = 0
        for q in range(n - 1):
            if a[q] > a[q + 1]:
                adj_q[k] = q
                adj_r[k] = q + 1
                k += 1
            elif a[q + 1] > a[q]:
                adj_q[k] = q + 1
                adj_r[k] = q
                k += 1

        total = np.int64(0)
        for i in range(n - 1):
            j = i + 1
            if a[i] > a[j]:
                continue
            # bulk terms
            for va in range(1, h):
                if counts[va] == 0:
                    continue
                for vb in range(va):
                    if counts[vb] == 0:
                        continue
                    dij = _delta_ij_jit(a, n, i, va, vb)
                    if dij != 0:
                        total += counts[va] * counts[vb] * dij
            total += s_lo[a[i]] + s_hi[a[j]]

            # corrections: replace the bulk value by the exact value on every
            # triple whose windows can interact
            nlo = i - 2
            if nlo < 0:
                nlo = 0
            nhi = i + 3
            if nhi > n - 1:
                nhi = n - 1
            for s in range(nlo, nhi + 1):
                lo_end = offs[a[s]]
                for idx in range(lo_end):
                    t = plist[idx]
                    m = _exchange_targets_jit(a, i, j, s, t, pos, val)
                    exact = _des_delta_jit(a, pos, val, m, n)
                    bulk = (
                        _delta_ij_jit(a, n, i, a[s], a[t])
                        + _delta_one_jit(a, n, s, a[i])
                        + _delta_one_jit(a, n, t, a[j])
                    )
                    total += exact - bulk
            for t in range(nlo, nhi + 1):
                hi_start = offs[a[t] + 1]
                for idx in range(hi_start, n):
                    s = plist[idx]
                    if nlo <= s <= nhi:
                        continue
                    m = _exchange_targets_jit(a, i, j, s, t, pos, val)
                    exact = _des_delta_jit(a, pos, val, m, n)
                    bulk = (
                        _delta_ij_jit(a, n, i, a[s], a[t])
                        + _delta_one_jit(a, n, s, a[i])
                        + _delta_one_jit(a, n, t, a[j])
                    )
                    total += exact - bulk
            for k2 in range(n_adj):
                s = adj_q[k2]
                t = adj_r[k2]
                if nlo <= s <= nhi or nlo <= t <= nhi:
                    continue
                m = _exchange_targets_jit(a, i, j, s, t, pos, val)
                exact = _des_delta_jit(a, pos, val, m, n)
                bulk = (
                    _delta_ij_jit(a, n, i, a[s], a[t])
                    + _delta_one_jit(a, n, s, a[i])
                    + _delta_one_jit(a, n, t, a[j])
                )
                total += exact - bulk
        return total


_DES_FAST_MIN_N = 64


def shift_sum(a, statistic):
    """Integer sum of statistic deltas over all coupling branches for one sequence.

    a must be an int64 array of symbol values; statistic is "inversions" or
    "descents".  Divide by (#I choices) * sum_{a>b} n_a n_b to get the
    conditional mean shift.
    """
    if HAVE_NUMBA:
        if statistic == "inversions":
            return int(_shift_sum_inv_jit(a))
        n = a.shape[0]
        if n > _DES_FAST_MIN_N:
            h = int(a.max()) + 1
            return int(_shift_sum_des_fast_jit(a, h))
        return int(_shift_sum_des_brute_jit(a))
    if statistic == "inversions":
        return _shift_sum_inv_py(a)
    return _shift_sum_des_py(a)
