"""Numba-jitted implementations of the hot kernels.

Signature-compatible with :mod:`wayfarer.kernels._numpy`; the arithmetic is
kept expression-for-expression identical so both backends agree bitwise.
"""

import numpy as np
from numba import njit

BACKEND = "numba"

_U53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def cast_rays(ox, oy, dirs, segs, ranks, max_range):
    n_rays = dirs.shape[0]
    n_segs = segs.shape[0]
    out_t = np.full(n_rays, np.inf)
    out_idx = np.full(n_rays, -1, dtype=np.int64)
    for r in range(n_rays):
        dx = dirs[r, 0]
        dy = dirs[r, 1]
        best_t = np.inf
        best_rank = np.int64(0)
        best_i = np.int64(-1)
        for i in range(n_segs):
            ex = segs[i, 2] - segs[i, 0]
            ey = segs[i, 3] - segs[i, 1]
            denom = dx * ey - dy * ex
            if denom == 0.0:
                continue
            wx = segs[i, 0] - ox
            wy = segs[i, 1] - oy
            t = (wx * ey - wy * ex) / denom
            if t <= 0.0 or t > max_range:
                continue
            u = (wx * dy - wy * dx) / denom
            if u < 0.0 or u > 1.0:
                continue
            if t < best_t or (t == best_t and ranks[i] < best_rank):
                best_t = t
                best_rank = ranks[i]
                best_i = i
        out_t[r] = best_t
        out_idx[r] = best_i
    return out_t, out_idx


@njit(cache=True)
def points_in_polygon(px, py, poly):
    n = px.shape[0]
    nv = poly.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        x = px[j]
        y = py[j]
        inside = False
        on_edge = False
        for i in range(nv):
            x1 = poly[i, 0]
            y1 = poly[i, 1]
            i2 = i + 1
            if i2 == nv:
                i2 = 0
            x2 = poly[i2, 0]
            y2 = poly[i2, 1]
            cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
            if cross == 0.0:
                lox = x1 if x1 <= x2 else x2
                hix = x2 if x1 <= x2 else x1
                loy = y1 if y1 <= y2 else y2
                hiy = y2 if y1 <= y2 else y1
                if lox <= x <= hix and loy <= y <= hiy:
                    on_edge = True
            if (y1 > y) != (y2 > y):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xint:
                    inside = not inside
        out[j] = inside or on_edge
    return out


@njit(cache=True)
def gibbs_sweeps(w, d, z, n_kv, n_k, n_dk, alpha, beta, iterations, state):
    n_tokens = w.shape[0]
    n_topics = n_kv.shape[0]
    vocab = n_kv.shape[1]
    beta_sum = vocab * beta
    p = np.empty(n_topics)
    s = state[0]
    mul = np.uint64(6364136223846793005)
    inc = np.uint64(1442695040888963407)
    for _ in range(iterations):
        for i in range(n_tokens):
            wi = w[i]
            di = d[i]
            zi = z[i]
            n_kv[zi, wi] -= 1
            n_k[zi] -= 1
            n_dk[di, zi] -= 1
            total = 0.0
            for k in range(n_topics):
                pk = (n_kv[k, wi] + beta) / (n_k[k] + beta_sum) * (n_dk[di, k] + alpha)
                total += pk
                p[k] = total
            s = s * mul + inc
            u = np.float64(s >> np.uint64(11)) * _U53 * total
            new_z = 0
            while new_z < n_topics - 1 and p[new_z] < u:
                new_z += 1
            z[i] = new_z
            n_kv[new_z, wi] += 1
            n_k[new_z] += 1
            n_dk[di, new_z] += 1
    state[0] = s
