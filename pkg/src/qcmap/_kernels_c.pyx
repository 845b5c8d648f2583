# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: cyclic Jacobi sweeps and fixed-step linear integrators.

Mirrors ``_kernels_py`` call for call; the selector in ``kernels`` picks one.
All arrays are C-contiguous float64 (steps: int64).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def jacobi_eigh(const double[:, ::1] a_in, int max_sweeps=50):
    """Return ``(w, v, sweeps)``; columns of ``v`` are eigenvectors, unsorted.

    ``sweeps == -1`` signals non-convergence.
    """
    cdef Py_ssize_t n = a_in.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(a_in, dtype=np.float64, order="C")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double sm, thresh, g, h, t, theta, c, s, tau, arp, arq
    for sweep in range(1, max_sweeps + 1):
        sm = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                sm += fabs(a[p, q])
        if sm == 0.0:
            return np.diagonal(a_arr).copy(), v_arr, sweep - 1
        if sweep < 4:
            thresh = 0.2 * sm / (n * n)
        else:
            thresh = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = 100.0 * fabs(a[p, q])
                if sweep > 4 and fabs(a[p, p]) + g == fabs(a[p, p]) and fabs(a[q, q]) + g == fabs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                elif fabs(a[p, q]) > thresh:
                    h = a[q, q] - a[p, p]
                    if fabs(h) + g == fabs(h):
                        t = a[p, q] / h
                    else:
                        theta = 0.5 * h / a[p, q]
                        t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    tau = s / (1.0 + c)
                    h = t * a[p, q]
                    a[p, p] -= h
                    a[q, q] += h
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        if r == p or r == q:
                            continue
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = arp - s * (arq + arp * tau)
                        a[r, q] = arq + s * (arp - arq * tau)
                        a[p, r] = a[r, p]
                        a[q, r] = a[r, q]
                    for r in range(n):
                        arp = v[r, p]
                        arq = v[r, q]
                        v[r, p] = arp - s * (arq + arp * tau)
                        v[r, q] = arq + s * (arp - arq * tau)
    return np.diagonal(a_arr).copy(), v_arr, -1


cdef inline void _matvec(const double[:, ::1] m, const double[::1] x, double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc = acc + m[i, j] * x[j]
        out[i] = acc


def rk4_hamilton(const double[:, ::1] h, const double[::1] g, const double[::1] x0, const double[::1] y0,
                 double dt, const cnp.int64_t[::1] steps):
    """Classical RK4 on ``x' = H y - g x``, ``y' = -H x - g y``.

    Returns ``(xs, ys)`` of shape ``(len(steps), n)``, one row per sampled step.
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t m = steps.shape[0]
    xs_arr = np.empty((m, n), dtype=np.float64)
    ys_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] xs = xs_arr
    cdef double[:, ::1] ys = ys_arr
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] y = np.array(y0, dtype=np.float64)
    cdef double[::1] tx = np.empty(n)
    cdef double[::1] ty = np.empty(n)
    cdef double[::1] hx = np.empty(n)
    cdef double[::1] hy = np.empty(n)
    cdef double[::1] kx = np.empty(n)
    cdef double[::1] ky = np.empty(n)
    cdef double[::1] ax = np.empty(n)
    cdef double[::1] ay = np.empty(n)
    cdef Py_ssize_t i, idx = 0
    cdef cnp.int64_t step = 0
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    if m == 0:
        return xs_arr, ys_arr
    with nogil:
        while True:
            while idx < m and steps[idx] == step:
                for i in range(n):
                    xs[idx, i] = x[i]
                    ys[idx, i] = y[i]
                idx += 1
            if idx >= m:
                break
            # k1
            _matvec(h, y, hy, n)
            _matvec(h, x, hx, n)
            for i in range(n):
                kx[i] = hy[i] - g[i] * x[i]
                ky[i] = -hx[i] - g[i] * y[i]
                ax[i] = kx[i]
                ay[i] = ky[i]
                tx[i] = x[i] + half * kx[i]
                ty[i] = y[i] + half * ky[i]
            # k2
            _matvec(h, ty, hy, n)
            _matvec(h, tx, hx, n)
            for i in range(n):
                kx[i] = hy[i] - g[i] * tx[i]
                ky[i] = -hx[i] - g[i] * ty[i]
                ax[i] += 2.0 * kx[i]
                ay[i] += 2.0 * ky[i]
                tx[i] = x[i] + half * kx[i]
                ty[i] = y[i] + half * ky[i]
            # k3
            _matvec(h, ty, hy, n)
            _matvec(h, tx, hx, n)
            for i in range(n):
                kx[i] = hy[i] - g[i] * tx[i]
                ky[i] = -hx[i] - g[i] * ty[i]
                ax[i] += 2.0 * kx[i]
                ay[i] += 2.0 * ky[i]
                tx[i] = x[i] + dt * kx[i]
                ty[i] = y[i] + dt * ky[i]
            # k4
            _matvec(h, ty, hy, n)
            _matvec(h, tx, hx, n)
            for i in range(n):
                kx[i] = hy[i] - g[i] * tx[i]
                ky[i] = -hx[i] - g[i] * ty[i]
                x[i] = x[i] + sixth * (ax[i] + kx[i])
                y[i] = y[i] + sixth * (ay[i] + ky[i])
            step += 1
    return xs_arr, ys_arr


def verlet(const double[:, ::1] s, const double[::1] q0, const double[::1] v0, double dt, const cnp.int64_t[::1] steps):
    """Velocity Verlet (kick-drift-kick) on ``q'' = -S q``."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t m = steps.shape[0]
    qs_arr = np.empty((m, n), dtype=np.float64)
    vs_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] qs = qs_arr
    cdef double[:, ::1] vs = vs_arr
    cdef double[::1] q = np.array(q0, dtype=np.float64)
    cdef double[::1] v = np.array(v0, dtype=np.float64)
    cdef double[::1] f = np.empty(n)
    cdef Py_ssize_t i, idx = 0
    cdef cnp.int64_t step = 0
    cdef double half = 0.5 * dt
    if m == 0:
        return qs_arr, vs_arr
    with nogil:
        _matvec(s, q, f, n)
        while True:
            while idx < m and steps[idx] == step:
                for i in range(n):
                    qs[idx, i] = q[i]
                    vs[idx, i] = v[i]
                idx += 1
            if idx >= m:
                break
            for i in range(n):
                v[i] = v[i] - half * f[i]
                q[i] = q[i] + dt * v[i]
            _matvec(s, q, f, n)
            for i in range(n):
                v[i] = v[i] - half * f[i]
            step += 1
    return qs_arr, vs_arr


def rk4_second_order(const double[:, ::1] s, const double[::1] d, const double[::1] q0, const double[::1] v0,
                     double dt, const cnp.int64_t[::1] steps):
    """Classical RK4 on ``q' = v``, ``v' = -S q - d v``."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t m = steps.shape[0]
    qs_arr = np.empty((m, n), dtype=np.float64)
    vs_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] qs = qs_arr
    cdef double[:, ::1] vs = vs_arr
    cdef double[::1] q = np.array(q0, dtype=np.float64)
    cdef double[::1] v = np.array(v0, dtype=np.float64)
    cdef double[::1] tq = np.empty(n)
    cdef double[::1] tv = np.empty(n)
    cdef double[::1] sq = np.empty(n)
    cdef double[::1] kq = np.empty(n)
    cdef double[::1] kv = np.empty(n)
    cdef double[::1] aq = np.empty(n)
    cdef double[::1] av = np.empty(n)
    cdef Py_ssize_t i, idx = 0
    cdef cnp.int64_t step = 0
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    if m == 0:
        return qs_arr, vs_arr
    with nogil:
        while True:
            while idx < m and steps[idx] == step:
                for i in range(n):
                    qs[idx, i] = q[i]
                    vs[idx, i] = v[i]
                idx += 1
            if idx >= m:
                break
            _matvec(s, q, sq, n)
            for i in range(n):
                kq[i] = v[i]
                kv[i] = -sq[i] - d[i] * v[i]
                aq[i] = kq[i]
                av[i] = kv[i]
                tq[i] = q[i] + half * kq[i]
                tv[i] = v[i] + half * kv[i]
            _matvec(s, tq, sq, n)
            for i in range(n):
                kq[i] = tv[i]
                kv[i] = -sq[i] - d[i] * tv[i]
                aq[i] += 2.0 * kq[i]
                av[i] += 2.0 * kv[i]
                tq[i] = q[i] + half * kq[i]
                tv[i] = v[i] + half * kv[i]
            _matvec(s, tq, sq, n)
            for i in range(n):
                kq[i] = tv[i]
                kv[i] = -sq[i] - d[i] * tv[i]
                aq[i] += 2.0 * kq[i]
                av[i] += 2.0 * kv[i]
                tq[i] = q[i] + dt * kq[i]
                tv[i] = v[i] + dt * kv[i]
            _matvec(s, tq, sq, n)
            for i in range(n):
                kq[i] = tv[i]
                kv[i] = -sq[i] - d[i] * tv[i]
                q[i] = q[i] + sixth * (aq[i] + kq[i])
                v[i] = v[i] + sixth * (av[i] + kv[i])
            step += 1
    return qs_arr, vs_arr
