"""Pure numpy implementations of the hot loops.

Same signatures and return conventions as the compiled ``_kernels_c``.
"""

import numpy as np


def jacobi_eigh(a_in, max_sweeps=50):
    a = np.array(a_in, dtype=np.float64, order="C")
    n = a.shape[0]
    v = np.eye(n)
    iu = np.triu_indices(n, 1)
    for sweep in range(1, max_sweeps + 1):
        sm = np.abs(a[iu]).sum()
        if sm == 0.0:
            return np.diagonal(a).copy(), v, sweep - 1
        thresh = 0.2 * sm / (n * n) if sweep < 4 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * abs(apq)
                app, aqq = abs(a[p, p]), abs(a[q, q])
                if sweep > 4 and app + g == app and aqq + g == aqq:
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(apq) <= thresh:
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)
                h = t * apq
                dpp = a[p, p] - h
                dqq = a[q, q] + h
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp - s * (colq + colp * tau)
                a[:, q] = colq + s * (colp - colq * tau)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = dpp
                a[q, q] = dqq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp - s * (vq + vp * tau)
                v[:, q] = vq + s * (vp - vq * tau)
    return np.diagonal(a).copy(), v, -1


def _sampler(steps, n):
    return np.empty((len(steps), n)), np.empty((len(steps), n))


def rk4_hamilton(h, g, x0, y0, dt, steps):
    n = h.shape[0]
    xs, ys = _sampler(steps, n)
    if len(steps) == 0:
        return xs, ys
    x = np.array(x0, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)

    def f(x, y):
        return h @ y - g * x, -(h @ x) - g * y

    idx, step, last = 0, 0, int(steps[-1])
    while True:
        while idx < len(steps) and steps[idx] == step:
            xs[idx], ys[idx] = x, y
            idx += 1
        if step >= last:
            break
        k1x, k1y = f(x, y)
        k2x, k2y = f(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y)
        k3x, k3y = f(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y)
        k4x, k4y = f(x + dt * k3x, y + dt * k3y)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        step += 1
    return xs, ys


def verlet(s, q0, v0, dt, steps):
    n = s.shape[0]
    qs, vs = _sampler(steps, n)
    if len(steps) == 0:
        return qs, vs
    q = np.array(q0, dtype=np.float64)
    v = np.array(v0, dtype=np.float64)
    force = s @ q
    idx, step, last = 0, 0, int(steps[-1])
    while True:
        while idx < len(steps) and steps[idx] == step:
            qs[idx], vs[idx] = q, v
            idx += 1
        if step >= last:
            break
        v = v - 0.5 * dt * force
        q = q + dt * v
        force = s @ q
        v = v - 0.5 * dt * force
        step += 1
    return qs, vs


def rk4_second_order(s, d, q0, v0, dt, steps):
    n = s.shape[0]
    qs, vs = _sampler(steps, n)
    if len(steps) == 0:
        return qs, vs
    q = np.array(q0, dtype=np.float64)
    v = np.array(v0, dtype=np.float64)

    def f(q, v):
        return v, -(s @ q) - d * v

    idx, step, last = 0, 0, int(steps[-1])
    while True:
        while idx < len(steps) and steps[idx] == step:
            qs[idx], vs[idx] = q, v
            idx += 1
        if step >= last:
            break
        k1q, k1v = f(q, v)
        k2q, k2v = f(q + 0.5 * dt * k1q, v + 0.5 * dt * k1v)
        k3q, k3v = f(q + 0.5 * dt * k2q, v + 0.5 * dt * k2v)
        k4q, k4v = f(q + dt * k3q, v + dt * k3v)
        q = q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        step += 1
    return qs, vs
