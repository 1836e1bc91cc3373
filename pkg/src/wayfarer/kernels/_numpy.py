"""Pure-numpy implementations of the hot kernels.

These are the fallback path used when numba is unavailable or disabled via
``WAYFARER_DISABLE_NUMBA=1``.  Arithmetic is kept expression-for-expression
identical to the jitted kernels so both paths produce the same bits.
"""

import numpy as np

BACKEND = "numpy"

# Uniform doubles are drawn from the 64-bit MMIX linear congruential
# generator (x <- x*6364136223846793005 + 1442695040888963407 mod 2^64),
# top 53 bits scaled into [0, 1).  Documented in wayfarer.rng.
_LCG_MUL = np.uint64(6364136223846793005)
_LCG_INC = np.uint64(1442695040888963407)
_U53 = 1.0 / 9007199254740992.0  # 2**-53


def cast_rays(ox, oy, dirs, segs, ranks, max_range):
    """Nearest-hit index per ray direction against a segment soup.

    ``dirs`` is (R, 2) unit vectors, ``segs`` is (N, 4) rows (x1, y1, x2, y2),
    ``ranks`` is (N,) int64 used to break exact distance ties (lower wins).
    Returns (t, idx) arrays of shape (R,); idx -1 where nothing is hit
    within ``max_range``.  Hits require t > 0 and intersection parameter
    u in [0, 1]; rays parallel to a segment never hit it.
    """
    n_rays = dirs.shape[0]
    out_t = np.full(n_rays, np.inf)
    out_idx = np.full(n_rays, -1, dtype=np.int64)
    if segs.shape[0] == 0:
        return out_t, out_idx
    ex = segs[:, 2] - segs[:, 0]
    ey = segs[:, 3] - segs[:, 1]
    wx = segs[:, 0] - ox
    wy = segs[:, 1] - oy
    for r in range(n_rays):
        dx = dirs[r, 0]
        dy = dirs[r, 1]
        denom = dx * ey - dy * ex
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
        valid = (denom != 0.0) & (t > 0.0) & (t <= max_range) & (u >= 0.0) & (u <= 1.0)
        if not valid.any():
            continue
        cand = np.nonzero(valid)[0]
        tc = t[cand]
        best_t = tc.min()
        at_best = cand[tc == best_t]
        best = at_best[np.argmin(ranks[at_best])]
        out_t[r] = best_t
        out_idx[r] = best
    return out_t, out_idx


def points_in_polygon(px, py, poly):
    """Even-odd containment test, boundary inclusive, for a point batch.

    ``poly`` is (V, 2); returns a bool array.  A point exactly on an edge
    (zero cross product and inside the edge's bounding box) counts as inside.
    """
    n = px.shape[0]
    inside = np.zeros(n, dtype=np.bool_)
    on_edge = np.zeros(n, dtype=np.bool_)
    nv = poly.shape[0]
    for i in range(nv):
        x1 = poly[i, 0]
        y1 = poly[i, 1]
        x2 = poly[(i + 1) % nv, 0]
        y2 = poly[(i + 1) % nv, 1]
        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        lox, hix = (x1, x2) if x1 <= x2 else (x2, x1)
        loy, hiy = (y1, y2) if y1 <= y2 else (y2, y1)
        on_edge |= (cross == 0.0) & (px >= lox) & (px <= hix) & (py >= loy) & (py <= hiy)
        crosses = (y1 > py) != (y2 > py)
        if crosses.any():
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (px < xint)
    return inside | on_edge


def gibbs_sweeps(w, d, z, n_kv, n_k, n_dk, alpha, beta, iterations, state):
    """Collapsed Gibbs sweeps for LDA topic assignment.

    Mutates z and the count arrays in place; ``state`` is a one-element
    uint64 array holding the LCG state.  One uniform draw per token per
    sweep, consumed in corpus order, so the chain is reproducible from the
    seed alone.
    """
    n_tokens = w.shape[0]
    n_topics = n_kv.shape[0]
    vocab = n_kv.shape[1]
    beta_sum = vocab * beta
    p = np.empty(n_topics)
    s = int(state[0])
    mul = 6364136223846793005
    inc = 1442695040888963407
    mask = (1 << 64) - 1
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
            s = (s * mul + inc) & mask
            u = float(s >> 11) * _U53 * total
            new_z = 0
            while new_z < n_topics - 1 and p[new_z] < u:
                new_z += 1
            z[i] = new_z
            n_kv[new_z, wi] += 1
            n_k[new_z] += 1
            n_dk[di, new_z] += 1
    state[0] = np.uint64(s)
