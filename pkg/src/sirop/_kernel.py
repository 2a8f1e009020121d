"""Compiled RK4 inner loop.

Written with explicit loops so the same source runs under numba or, if
numba is unavailable, as plain Python with identical operation order.
Packed state is ``y = [s, x, o]``.
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

OK = 0
CLAMP_OVERFLOW = 1
NEGATIVE_R = 2


@njit(cache=True)
def rhs(y, b, b_excess, g_min, g_excess, lap_i, n, out):
    for i in range(n):
        bx = 0.0
        ex = 0.0
        for j in range(n):
            bx += b[i, j] * y[n + j]
            ex += b_excess[i, j] * y[n + j]
        o_i = y[2 * n + i]
        force = y[i] * (bx - o_i * ex)
        out[i] = -force
        out[n + i] = force - (g_min + g_excess[i] * o_i) * y[n + i]
        lo = 0.0
        for j in range(n):
            lo += lap_i[i, j] * y[2 * n + j]
        out[2 * n + i] = (1.0 - y[i]) - lo


@njit(cache=True)
def run(y, r, b, b_excess, g_min, g_excess, lap_i, dt, n_steps, stride, tol, early_stop, x_floor, rec):
    """Advance ``n_steps`` RK4 steps in place, writing every ``stride``-th state to ``rec``.

    ``rec[k]`` holds ``[s, x, r, o]`` flattened; ``rec[0]`` must be pre-filled.
    Returns ``(records_written, status, step, index, magnitude)``.
    """
    n = b.shape[0]
    m = 3 * n
    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    tmp = np.empty(m)
    half = 0.5 * dt
    sixth = dt / 6.0
    written = 1
    for k in range(1, n_steps + 1):
        rhs(y, b, b_excess, g_min, g_excess, lap_i, n, k1)
        for q in range(m):
            tmp[q] = y[q] + half * k1[q]
        rhs(tmp, b, b_excess, g_min, g_excess, lap_i, n, k2)
        for q in range(m):
            tmp[q] = y[q] + half * k2[q]
        rhs(tmp, b, b_excess, g_min, g_excess, lap_i, n, k3)
        for q in range(m):
            tmp[q] = y[q] + dt * k3[q]
        rhs(tmp, b, b_excess, g_min, g_excess, lap_i, n, k4)
        for q in range(m):
            v = y[q] + sixth * (k1[q] + 2.0 * (k2[q] + k3[q]) + k4[q])
            if v < 0.0:
                if -v > tol:
                    return written, CLAMP_OVERFLOW, k, q, -v
                v = 0.0
            elif v > 1.0:
                if v - 1.0 > tol:
                    return written, CLAMP_OVERFLOW, k, q, v - 1.0
                v = 1.0
            y[q] = v
        x_max = 0.0
        for i in range(n):
            ri = 1.0 - y[i] - y[n + i]
            if ri < 0.0:
                if -ri > tol:
                    return written, NEGATIVE_R, k, i, -ri
                ri = 0.0
            r[i] = ri
            if y[n + i] > x_max:
                x_max = y[n + i]
        if k % stride == 0:
            for i in range(n):
                rec[written, i] = y[i]
                rec[written, n + i] = y[n + i]
                rec[written, 2 * n + i] = r[i]
                rec[written, 3 * n + i] = y[2 * n + i]
            written += 1
            if early_stop and x_max < x_floor:
                return written, OK, k, 0, 0.0
    return written, OK, n_steps, 0, 0.0
