# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled marching-squares kernels; same contract as ``_purekernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def march_cells(double[:, ::1] G, bint wrap_u, bint wrap_v, signed char[:, ::1] center_sign):
    cdef Py_ssize_t nu = G.shape[0], nv = G.shape[1]
    cdef Py_ssize_t cu = nu - 1 + (1 if wrap_u else 0)
    cdef Py_ssize_t cv = nv - 1 + (1 if wrap_v else 0)
    cdef Py_ssize_t nu_edges = cu * nv
    cdef Py_ssize_t i, j, ip, jp, m = 0
    cdef int sa, sb, sc, sd, code, c_sign
    cdef long long bottom, top, left, right
    cdef long long cross[4]
    cdef int nc
    out_arr = np.empty((2 * cu * cv, 2), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    for i in range(cu):
        ip = i + 1
        if ip == nu:
            ip = 0
        for j in range(cv):
            jp = j + 1
            if jp == nv:
                jp = 0
            sa = G[i, j] >= 0
            sb = G[ip, j] >= 0
            sc = G[ip, jp] >= 0
            sd = G[i, jp] >= 0
            code = sa | (sb << 1) | (sc << 2) | (sd << 3)
            if code == 0 or code == 15:
                continue
            bottom = i * nv + j
            top = i * nv + jp
            left = nu_edges + i * cv + j
            right = nu_edges + ip * cv + j
            if code == 5 or code == 10:
                c_sign = 1 if center_sign[i, j] > 0 else 0
                if c_sign == sa:
                    out[m, 0] = bottom; out[m, 1] = right; m += 1
                    out[m, 0] = left; out[m, 1] = top; m += 1
                else:
                    out[m, 0] = bottom; out[m, 1] = left; m += 1
                    out[m, 0] = right; out[m, 1] = top; m += 1
                continue
            nc = 0
            if sa != sb:
                cross[nc] = bottom; nc += 1
            if sb != sc:
                cross[nc] = right; nc += 1
            if sd != sc:
                cross[nc] = top; nc += 1
            if sa != sd:
                cross[nc] = left; nc += 1
            out[m, 0] = cross[0]; out[m, 1] = cross[1]; m += 1
    return out_arr[:m].copy()


def chain_segments(segs_in, Py_ssize_t n_edges):
    cdef long long[:, ::1] segs = np.ascontiguousarray(segs_in, dtype=np.int64).reshape(-1, 2)
    nb_arr = np.full((n_edges, 2), -1, dtype=np.int64)
    deg_arr = np.zeros(n_edges, dtype=np.int64)
    used_arr = np.zeros(n_edges, dtype=np.uint8)
    cdef long long[:, ::1] nb = nb_arr
    cdef long long[::1] deg = deg_arr
    cdef unsigned char[::1] used = used_arr
    cdef Py_ssize_t k, e, pass_deg
    cdef long long a, b, prev, cur, nxt, cand
    for k in range(segs.shape[0]):
        a = segs[k, 0]
        b = segs[k, 1]
        nb[a, deg[a]] = b
        deg[a] += 1
        nb[b, deg[b]] = a
        deg[b] += 1
    chains = []
    closed = []
    for pass_deg in (1, 2):
        for e in range(n_edges):
            if deg[e] != pass_deg or used[e]:
                continue
            chain = [e]
            used[e] = 1
            prev = -1
            cur = e
            while True:
                nxt = -1
                for k in range(deg[cur]):
                    cand = nb[cur, k]
                    if cand != prev and not used[cand]:
                        nxt = cand
                        break
                if nxt < 0:
                    break
                chain.append(nxt)
                used[nxt] = 1
                prev = cur
                cur = nxt
            chains.append(chain)
            closed.append(pass_deg == 2)
    return chains, closed
