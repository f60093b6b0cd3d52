"""Pure numpy implementations of the hot loops.

These mirror ``_ckernels.pyx`` one for one and are used when the compiled
extension is missing or ``WILDARC_PURE=1`` is set.
"""
from __future__ import annotations

import math

import numpy as np

HALF_PI = 0.5 * math.pi


def cherry_rhs_batch(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    s = np.einsum("ij,ij->i", z, z)
    out = np.empty_like(z)
    inner = s <= 2.0
    mid = (s > 2.0) & (s <= 4.0)
    outer = s > 4.0
    ball = ~outer
    out[ball, 0] = 1.0 - (s[ball] - 4.0) ** 2 / 9.0
    out[outer, 0] = 1.0
    out[inner, 1:] = -z[inner, 1:]
    w = 0.5 * (np.sin(HALF_PI * (s[mid] - 3.0)) - 1.0)
    out[mid, 1:] = w[:, None] * z[mid, 1:]
    out[outer, 1:] = 0.0
    return out


def _misses_ball(z: np.ndarray, sign: float) -> np.ndarray:
    """True where the unit translation segment z + sign*[0,1]*(1,0,0) avoids |x|^2 <= 4."""
    x = z[:, 0]
    perp = z[:, 1] * z[:, 1] + z[:, 2] * z[:, 2]
    lo = np.minimum(x, x + sign)
    hi = np.maximum(x, x + sign)
    closest = np.clip(0.0, lo, hi)
    return perp + closest * closest > 4.0


def flow_batch(z: np.ndarray, sign: float, nsteps: int) -> np.ndarray:
    """Time-one map of ``sign * rhs`` by classical RK4 with ``nsteps`` steps."""
    z = np.array(z, dtype=float, copy=True)
    if z.size == 0:
        return z.reshape(0, 3)
    out = z.copy()
    free = _misses_ball(z, sign)
    out[free, 0] += sign
    idx = np.flatnonzero(~free)
    if idx.size:
        x = z[idx]
        h = sign / nsteps
        for _ in range(nsteps):
            k1 = cherry_rhs_batch(x)
            k2 = cherry_rhs_batch(x + (0.5 * h) * k1)
            k3 = cherry_rhs_batch(x + (0.5 * h) * k2)
            k4 = cherry_rhs_batch(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[idx] = x
    return out


def strong_components(n: int, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Iterative Tarjan; returns a component label per vertex.

    Labels are assigned in the order components are completed, which is a
    reverse topological order of the condensation.
    """
    indptr = np.asarray(indptr, dtype=np.int64).tolist()
    indices = np.asarray(indices, dtype=np.int64).tolist()
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    label = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, indptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        while work:
            v, pos = work[-1]
            end = indptr[v + 1]
            pushed = False
            while pos < end:
                w = indices[pos]
                pos += 1
                if index[w] == -1:
                    work[-1] = (v, pos)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append((w, indptr[w]))
                    pushed = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    label[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return np.asarray(label, dtype=np.int64)


def expand_ranges(src: np.ndarray, lo: np.ndarray, hi: np.ndarray, side: int) -> tuple[np.ndarray, np.ndarray]:
    """All (src, box) pairs with box index in the integer ranges [lo, hi] per axis.

    ``lo``/``hi`` are ``(N, 3)`` inclusive bounds already clipped to the grid.
    Box linear index is (i * side + j) * side + k.
    """
    src = np.asarray(src, dtype=np.int64)
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    span = hi - lo + 1
    out_s, out_d = [], []
    for di in range(int(span[:, 0].max(initial=0))):
        mi = span[:, 0] > di
        for dj in range(int(span[:, 1].max(initial=0))):
            mj = mi & (span[:, 1] > dj)
            for dk in range(int(span[:, 2].max(initial=0))):
                m = mj & (span[:, 2] > dk)
                if not m.any():
                    continue
                b = ((lo[m, 0] + di) * side + (lo[m, 1] + dj)) * side + (lo[m, 2] + dk)
                out_s.append(src[m])
                out_d.append(b)
    if not out_s:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(out_s), np.concatenate(out_d)
