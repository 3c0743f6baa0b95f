"""Pure-Python marching-squares kernels (reference implementation and fallback).

Edge numbering on an ``nu × nv`` node grid, with ``cu``/``cv`` cells per
direction (one extra cell when that direction wraps):

* u-edge ``(i, j)`` joins nodes ``(i, j)`` and ``(i+1, j)``: id ``i*nv + j``
* v-edge ``(i, j)`` joins nodes ``(i, j)`` and ``(i, j+1)``: id ``cu*nv + i*cv + j``
"""

import numpy as np


def grid_counts(nu, nv, wrap_u, wrap_v):
    cu = nu - 1 + int(bool(wrap_u))
    cv = nv - 1 + int(bool(wrap_v))
    return cu, cv, cu * nv + nu * cv


def case_codes(G, wrap_u, wrap_v):
    """4-bit corner codes per cell (bit set where the corner is >= 0)."""
    above = (np.asarray(G) >= 0).astype(np.int8)
    if wrap_u:
        above = np.concatenate([above, above[:1]], axis=0)
    if wrap_v:
        above = np.concatenate([above, above[:, :1]], axis=1)
    a = above[:-1, :-1]
    b = above[1:, :-1]
    c = above[1:, 1:]
    d = above[:-1, 1:]
    return (a | (b << 1) | (c << 2) | (d << 3)).astype(np.int8)


def march_cells(G, wrap_u, wrap_v, center_sign):
    """Segments (pairs of edge ids) of the zero level of ``G``.

    ``center_sign[i, j]`` (+1/-1) resolves saddle cells: a cell whose centre
    has the sign of corner ``(i, j)`` joins that diagonal.
    """
    G = np.asarray(G, dtype=float)
    nu, nv = G.shape
    cu, cv, _ = grid_counts(nu, nv, wrap_u, wrap_v)
    codes = case_codes(G, wrap_u, wrap_v)
    nu_edges = cu * nv
    segs = []
    active = np.argwhere((codes != 0) & (codes != 15))
    for i, j in active:
        i = int(i)
        j = int(j)
        code = int(codes[i, j])
        ip = (i + 1) % nu
        jp = (j + 1) % nv
        bottom = i * nv + j
        top = i * nv + jp
        left = nu_edges + i * cv + j
        right = nu_edges + ip * cv + j
        if code == 5 or code == 10:
            a_up = code & 1
            c_sign = 1 if center_sign[i, j] > 0 else 0
            if c_sign == a_up:
                # a-c diagonal connected: cut off b and d
                segs.append((bottom, right))
                segs.append((left, top))
            else:
                segs.append((bottom, left))
                segs.append((right, top))
            continue
        sa = code & 1
        sb = (code >> 1) & 1
        sc = (code >> 2) & 1
        sd = (code >> 3) & 1
        cross = []
        if sa != sb:
            cross.append(bottom)
        if sb != sc:
            cross.append(right)
        if sd != sc:
            cross.append(top)
        if sa != sd:
            cross.append(left)
        segs.append((cross[0], cross[1]))
    return np.array(segs, dtype=np.int64).reshape(-1, 2)


def chain_segments(segs, n_edges):
    """Join segments sharing edge ids into maximal chains.

    Returns ``(chains, closed)``: lists of edge-id lists and closure flags.
    Open chains are emitted first, each starting at its lower-numbered free
    end; cycles follow, each starting at its smallest edge id.
    """
    segs = np.asarray(segs, dtype=np.int64)
    nb = np.full((n_edges, 2), -1, dtype=np.int64)
    deg = np.zeros(n_edges, dtype=np.int64)
    for a, b in segs:
        nb[a, deg[a]] = b
        deg[a] += 1
        nb[b, deg[b]] = a
        deg[b] += 1
    used = np.zeros(n_edges, dtype=bool)
    chains = []
    closed = []

    def walk(start):
        chain = [start]
        used[start] = True
        prev, cur = -1, start
        while True:
            nxt = -1
            for k in range(deg[cur]):
                cand = nb[cur, k]
                if cand != prev and not used[cand]:
                    nxt = cand
                    break
            if nxt < 0:
                return chain
            chain.append(int(nxt))
            used[nxt] = True
            prev, cur = cur, nxt

    for e in np.flatnonzero(deg == 1):
        if not used[e]:
            chains.append(walk(int(e)))
            closed.append(False)
    for e in np.flatnonzero(deg == 2):
        if not used[e]:
            chains.append(walk(int(e)))
            closed.append(True)
    return chains, closed
