"""Left-right planarity test on arrays.

Boolean-only implementation of the LR criterion (DFS orientation with
lowpoints, nesting-depth-ordered testing DFS with a conflict-pair stack).
Everything lives in flat int64 arrays so the kernel can be jit-compiled; a
pure-Python fallback runs the identical code when numba is unavailable.

The PMFG construction retests planarity once per candidate edge, so this is
the hot path of the whole pipeline.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


__all__ = ["is_planar", "HAVE_NUMBA"]


@njit(cache=True)
def _lr_test(n, eu, ev):  # pragma: no cover - covered via is_planar
    """LR planarity core. Vertices 0..n-1, undirected edges (eu[k], ev[k])."""
    m = eu.shape[0]

    # Half-edge CSR adjacency: half-edge 2k runs eu->ev, 2k+1 runs ev->eu.
    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    adj_start = np.cumsum(deg)
    fill = adj_start[:-1].copy()
    adj_half = np.empty(2 * m, dtype=np.int64)
    for k in range(m):
        adj_half[fill[eu[k]]] = 2 * k
        fill[eu[k]] += 1
        adj_half[fill[ev[k]]] = 2 * k + 1
        fill[ev[k]] += 1

    # Phase 1: DFS orientation with lowpoints and nesting depth.
    height = np.full(n, -1, dtype=np.int64)
    parent_edge = np.full(n, -1, dtype=np.int64)
    oriented = np.zeros(m, dtype=np.uint8)
    is_tree = np.zeros(m, dtype=np.uint8)
    src = np.full(m, -1, dtype=np.int64)
    dst = np.full(m, -1, dtype=np.int64)
    lowpt = np.zeros(m, dtype=np.int64)
    lowpt2 = np.zeros(m, dtype=np.int64)
    nesting = np.zeros(m, dtype=np.int64)

    stack_v = np.empty(n + 1, dtype=np.int64)
    stack_ptr = np.empty(n + 1, dtype=np.int64)

    for root in range(n):
        if height[root] != -1:
            continue
        height[root] = 0
        depth = 0
        stack_v[0] = root
        stack_ptr[0] = adj_start[root]
        while depth >= 0:
            v = stack_v[depth]
            ptr = stack_ptr[depth]
            if ptr < adj_start[v + 1]:
                stack_ptr[depth] = ptr + 1
                h = adj_half[ptr]
                k = h >> 1
                if oriented[k]:
                    continue
                w = ev[k] if (h & 1) == 0 else eu[k]
                oriented[k] = 1
                src[k] = v
                dst[k] = w
                lowpt[k] = height[v]
                lowpt2[k] = height[v]
                if height[w] == -1:  # tree edge: descend, finish on pop
                    is_tree[k] = 1
                    parent_edge[w] = k
                    height[w] = height[v] + 1
                    depth += 1
                    stack_v[depth] = w
                    stack_ptr[depth] = adj_start[w]
                    continue
                lowpt[k] = height[w]  # back edge
            else:
                depth -= 1
                k = parent_edge[v]
                if k == -1:
                    continue
                v = src[k]
            # finish edge k at source v: nesting depth + parent lowpoints
            nesting[k] = 2 * lowpt[k]
            if lowpt2[k] < height[v]:  # chordal
                nesting[k] += 1
            pe = parent_edge[v]
            if pe != -1:
                if lowpt[k] < lowpt[pe]:
                    lowpt2[pe] = min(lowpt[pe], lowpt2[k])
                    lowpt[pe] = lowpt[k]
                elif lowpt[k] > lowpt[pe]:
                    lowpt2[pe] = min(lowpt2[pe], lowpt[k])
                else:
                    lowpt2[pe] = min(lowpt2[pe], lowpt2[k])

    # Phase 2: adjacency of oriented edges grouped by source, by nesting depth.
    keys = src * (2 * n + 2) + nesting
    order = np.argsort(keys)
    ocount = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        ocount[src[k] + 1] += 1
    oadj_start = np.cumsum(ocount)

    # Phase 3: testing DFS with a conflict-pair stack.
    # A pair is four edge ids (L.low, L.high, R.low, R.high); -1 means unset.
    cap = m + 2
    sll = np.empty(cap, dtype=np.int64)
    slh = np.empty(cap, dtype=np.int64)
    srl = np.empty(cap, dtype=np.int64)
    srh = np.empty(cap, dtype=np.int64)
    top_s = 0

    ref = np.full(m, -1, dtype=np.int64)
    lowpt_edge = np.full(m, -1, dtype=np.int64)
    stack_bottom = np.zeros(m, dtype=np.int64)

    for root in range(n):
        if parent_edge[root] != -1 or height[root] != 0:
            continue
        depth = 0
        stack_v[0] = root
        stack_ptr[0] = oadj_start[root]
        while depth >= 0:
            v = stack_v[depth]
            ptr = stack_ptr[depth]
            ei = -1
            if ptr < oadj_start[v + 1]:
                stack_ptr[depth] = ptr + 1
                ei = order[ptr]
                stack_bottom[ei] = top_s
                if is_tree[ei]:
                    w = dst[ei]
                    depth += 1
                    stack_v[depth] = w
                    stack_ptr[depth] = oadj_start[w]
                    continue
                lowpt_edge[ei] = ei
                sll[top_s] = -1
                slh[top_s] = -1
                srl[top_s] = ei
                srh[top_s] = ei
                top_s += 1
            else:
                depth -= 1
                ei = parent_edge[v]
                if ei == -1:
                    continue
                u = src[ei]
                # remove back edges returning to parent u
                while top_s > 0:
                    # lowest return point of the top pair
                    if sll[top_s - 1] == -1:
                        lowest = lowpt[srl[top_s - 1]]
                    elif srl[top_s - 1] == -1:
                        lowest = lowpt[sll[top_s - 1]]
                    else:
                        lowest = min(lowpt[sll[top_s - 1]], lowpt[srl[top_s - 1]])
                    if lowest != height[u]:
                        break
                    top_s -= 1
                if top_s > 0:  # trim the next pair
                    top_s -= 1
                    pll = sll[top_s]
                    plh = slh[top_s]
                    prl = srl[top_s]
                    prh = srh[top_s]
                    while plh != -1 and dst[plh] == u:
                        plh = ref[plh]
                    if plh == -1 and pll != -1:  # just emptied
                        ref[pll] = prl
                        pll = -1
                    while prh != -1 and dst[prh] == u:
                        prh = ref[prh]
                    if prh == -1 and prl != -1:
                        ref[prl] = pll
                        prl = -1
                    sll[top_s] = pll
                    slh[top_s] = plh
                    srl[top_s] = prl
                    srh[top_s] = prh
                    top_s += 1
                if lowpt[ei] < height[u] and top_s > 0:
                    # side of ei is the side of its highest return edge
                    hl = slh[top_s - 1]
                    hr = srh[top_s - 1]
                    if hl != -1 and (hr == -1 or lowpt[hl] > lowpt[hr]):
                        ref[ei] = hl
                    else:
                        ref[ei] = hr
                v = u
            # integrate the return edges of ei at its source v
            if lowpt[ei] >= height[v]:
                continue
            e = parent_edge[v]
            if ei == order[oadj_start[v]]:
                lowpt_edge[e] = lowpt_edge[ei]
                continue
            # add constraints of ei against e
            pll = plh = prl = prh = -1
            while True:  # merge return edges of ei into P.right
                top_s -= 1
                qll = sll[top_s]
                qlh = slh[top_s]
                qrl = srl[top_s]
                qrh = srh[top_s]
                if qll != -1 or qlh != -1:
                    qll, qrl = qrl, qll
                    qlh, qrh = qrh, qlh
                if qll != -1 or qlh != -1:
                    return False  # not planar
                if lowpt[qrl] > lowpt[e]:
                    if prl == -1 and prh == -1:  # topmost interval
                        prh = qrh
                    elif prl != -1:
                        ref[prl] = qrh
                    prl = qrl
                else:  # align
                    ref[qrl] = lowpt_edge[e]
                if top_s == stack_bottom[ei]:
                    break
            # merge conflicting return edges of earlier siblings into P.left
            while top_s > 0:
                tll = sll[top_s - 1]
                tlh = slh[top_s - 1]
                trl = srl[top_s - 1]
                trh = srh[top_s - 1]
                conf_l = (tll != -1 or tlh != -1) and tlh != -1 and lowpt[tlh] > lowpt[ei]
                conf_r = (trl != -1 or trh != -1) and trh != -1 and lowpt[trh] > lowpt[ei]
                if not (conf_l or conf_r):
                    break
                top_s -= 1
                if conf_r:
                    tll, trl = trl, tll
                    tlh, trh = trh, tlh
                    conf_r = (trl != -1 or trh != -1) and trh != -1 and lowpt[trh] > lowpt[ei]
                if conf_r:
                    return False  # not planar
                if prl != -1:  # merge interval below lowpt(ei) into P.right
                    ref[prl] = trh
                if trl != -1:
                    prl = trl
                if pll == -1 and plh == -1:  # topmost interval
                    plh = tlh
                elif pll != -1:
                    ref[pll] = tlh
                pll = tll
            if pll != -1 or plh != -1 or prl != -1 or prh != -1:
                sll[top_s] = pll
                slh[top_s] = plh
                srl[top_s] = prl
                srh[top_s] = prh
                top_s += 1
    return True


def is_planar(n: int, edges: np.ndarray) -> bool:
    """True iff the simple undirected graph is planar.

    edges is an (m, 2) integer array over vertices 0..n-1.  Euler's bound
    rejects dense graphs outright, and any graph with at most 8 edges is
    planar (the smallest non-planar graphs, K5 and K3,3 subdivisions, need
    at least 9).
    """
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = arr.shape[0]
    if m and (arr.min() < 0 or arr.max() >= n):
        raise DataError("edge endpoint out of range")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise DataError("self-loops are not allowed")
    if m <= 8:
        return True
    if n > 2 and m > 3 * n - 6:
        return False
    return bool(_lr_test(n, np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])))
