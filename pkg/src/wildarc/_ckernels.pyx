# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``.

The flow kernel releases the GIL so callers can split a batch across a
thread pool.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, M_PI

cnp.import_array()


cdef inline void _rhs(double x0, double x1, double x2, double* out) noexcept nogil:
    cdef double s = x0 * x0 + x1 * x1 + x2 * x2
    cdef double w
    if s > 4.0:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = 0.0
        return
    out[0] = 1.0 - (s - 4.0) * (s - 4.0) / 9.0
    if s <= 2.0:
        out[1] = -x1
        out[2] = -x2
    else:
        w = 0.5 * (sin(0.5 * M_PI * (s - 3.0)) - 1.0)
        out[1] = w * x1
        out[2] = w * x2


def cherry_rhs_batch(z):
    cdef double[:, ::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0], i
    out = np.empty((n, 3))
    cdef double[:, ::1] ov = out
    with nogil:
        for i in range(n):
            _rhs(zv[i, 0], zv[i, 1], zv[i, 2], &ov[i, 0])
    return out


cdef inline bint _misses(double x0, double perp, double sign) noexcept nogil:
    cdef double lo = x0 if sign > 0 else x0 + sign
    cdef double hi = x0 + sign if sign > 0 else x0
    cdef double c = 0.0
    if c < lo:
        c = lo
    elif c > hi:
        c = hi
    return perp + c * c > 4.0


def flow_batch(z, double sign, int nsteps):
    cdef double[:, ::1] zv = np.array(z, dtype=np.float64, order="C", copy=True).reshape(-1, 3)
    cdef Py_ssize_t n = zv.shape[0], i
    cdef int it
    cdef double h = sign / nsteps
    cdef double x0, x1, x2
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    with nogil:
        for i in range(n):
            x0 = zv[i, 0]
            x1 = zv[i, 1]
            x2 = zv[i, 2]
            if _misses(x0, x1 * x1 + x2 * x2, sign):
                zv[i, 0] = x0 + sign
                continue
            for it in range(nsteps):
                _rhs(x0, x1, x2, k1)
                _rhs(x0 + 0.5 * h * k1[0], x1 + 0.5 * h * k1[1], x2 + 0.5 * h * k1[2], k2)
                _rhs(x0 + 0.5 * h * k2[0], x1 + 0.5 * h * k2[1], x2 + 0.5 * h * k2[2], k3)
                _rhs(x0 + h * k3[0], x1 + h * k3[1], x2 + h * k3[2], k4)
                x0 = x0 + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
                x1 = x1 + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
                x2 = x2 + (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
            zv[i, 0] = x0
            zv[i, 1] = x1
            zv[i, 2] = x2
    return np.asarray(zv)


def strong_components(Py_ssize_t n, indptr, indices):
    cdef cnp.int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    index_a = np.full(n, -1, dtype=np.int64)
    low_a = np.zeros(n, dtype=np.int64)
    label_a = np.full(n, -1, dtype=np.int64)
    onstack_a = np.zeros(n, dtype=np.uint8)
    stack_a = np.empty(n, dtype=np.int64)
    wv_a = np.empty(n, dtype=np.int64)
    wp_a = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] index = index_a
    cdef cnp.int64_t[::1] low = low_a
    cdef cnp.int64_t[::1] label = label_a
    cdef cnp.uint8_t[::1] onstack = onstack_a
    cdef cnp.int64_t[::1] stack = stack_a
    cdef cnp.int64_t[::1] wv = wv_a
    cdef cnp.int64_t[::1] wp = wp_a
    cdef Py_ssize_t sp = 0, top = 0, root, v, w, u, pos, end
    cdef cnp.int64_t counter = 0, ncomp = 0
    cdef bint pushed
    with nogil:
        for root in range(n):
            if index[root] != -1:
                continue
            index[root] = counter
            low[root] = counter
            counter += 1
            stack[sp] = root
            sp += 1
            onstack[root] = 1
            wv[0] = root
            wp[0] = ptr[root]
            top = 1
            while top > 0:
                v = wv[top - 1]
                pos = wp[top - 1]
                end = ptr[v + 1]
                pushed = False
                while pos < end:
                    w = idx[pos]
                    pos += 1
                    if index[w] == -1:
                        wp[top - 1] = pos
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        onstack[w] = 1
                        wv[top] = w
                        wp[top] = ptr[w]
                        top += 1
                        pushed = True
                        break
                    if onstack[w] and index[w] < low[v]:
                        low[v] = index[w]
                if pushed:
                    continue
                top -= 1
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        onstack[w] = 0
                        label[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
                if top > 0:
                    u = wv[top - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
    return label_a


def expand_ranges(src, lo, hi, cnp.int64_t side):
    cdef cnp.int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] a = np.ascontiguousarray(lo, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] b = np.ascontiguousarray(hi, dtype=np.int64)
    cdef Py_ssize_t n = s.shape[0], m, total = 0
    cdef cnp.int64_t i, j, k
    for m in range(n):
        total += (b[m, 0] - a[m, 0] + 1) * (b[m, 1] - a[m, 1] + 1) * (b[m, 2] - a[m, 2] + 1)
    out_s_a = np.empty(total, dtype=np.int64)
    out_d_a = np.empty(total, dtype=np.int64)
    cdef cnp.int64_t[::1] os_ = out_s_a
    cdef cnp.int64_t[::1] od = out_d_a
    cdef Py_ssize_t c = 0
    with nogil:
        for m in range(n):
            for i in range(a[m, 0], b[m, 0] + 1):
                for j in range(a[m, 1], b[m, 1] + 1):
                    for k in range(a[m, 2], b[m, 2] + 1):
                        os_[c] = s[m]
                        od[c] = (i * side + j) * side + k
                        c += 1
    return out_s_a, out_d_a
