"""Pure-numpy kernel backend. Semantics documented in the package __init__."""

from __future__ import annotations

import numpy as np


def pes_fixed_point(rows, b, pidx, tol, max_iters):
    """Monotone fixed-point sweep x <- b_g + P_g x starting from 0.

    rows: (P, n) one-step law on non-failed states per (state, action) pair,
    b: (P,) one-step failure probability per pair, pidx: (n,) selected pair
    per non-failed state. Returns the last iterate, the sweep count, and the
    final sup-norm step gap (caller decides whether gap <= tol is met).
    """
    mat = rows[pidx]
    vec = b[pidx]
    x = np.zeros(pidx.shape[0], dtype=np.float64)
    it = 0
    gap = np.inf
    for it in range(1, int(max_iters) + 1):
        xn = vec + mat @ x
        gap = float(np.max(np.abs(xn - x))) if x.shape[0] else 0.0
        x = xn
        if gap <= tol:
            break
    return x, it, gap


def vi_fixed_point(rows, b, starts, tol, max_iters):
    """Value-iteration sweep x_k <- min over the state's pairs of b + row.x.

    starts: (n+1,) pair-range offsets per non-failed state (contiguous,
    covering all pairs). Start point 0, same return convention as
    pes_fixed_point.
    """
    n = starts.shape[0] - 1
    seg = np.asarray(starts[:-1], dtype=np.intp)
    x = np.zeros(n, dtype=np.float64)
    it = 0
    gap = np.inf
    for it in range(1, int(max_iters) + 1):
        w = b + rows @ x
        xn = np.minimum.reduceat(w, seg) if n else w[:0]
        gap = float(np.max(np.abs(xn - x))) if n else 0.0
        x = xn
        if gap <= tol:
            break
    return x, it, gap


def simulate_step(cum, failed, cur, alive, u):
    """Advance every live trajectory by one transition; mutates cur and alive.

    cum: (S, S) cumulative transition rows under the fixed policy, failed:
    (S,) uint8 mask, cur: (trials,) int64 current states, alive: (trials,)
    uint8, u: (trials,) uniforms, one slot per trajectory. Returns how many
    trajectories entered the failed set on this step.
    """
    idx = np.nonzero(alive)[0]
    if idx.shape[0] == 0:
        return 0
    picked = cum[cur[idx]]
    nxt = (u[idx, None] >= picked).sum(axis=1)
    np.minimum(nxt, cum.shape[1] - 1, out=nxt)
    cur[idx] = nxt
    dead = failed[nxt].astype(bool)
    alive[idx[dead]] = 0
    return int(dead.sum())
