"""Compiled inner loops.

Everything here works on split real/imaginary float64 values instead of
numba complex numbers. Complex-times-real promotion can flip the sign of a
zero real part, which would break the bit-exact conjugation symmetry the
renderer relies on; explicit real arithmetic keeps every operation an exact
mirror under ``im -> -im``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

ESCAPED = 0
CONVERGED = 1
OSCILLATING = 2
UNDECIDED = 3

STATUS_OK = 0
STATUS_ESCAPED = 1
STATUS_NONFINITE = 2

DISCRETE_TAIL = 16


@njit(cache=True)
def hermite(z0r, z0i, d0r, d0i, z1r, z1i, d1r, d1i, h, theta):
    """Cubic Hermite interpolant on one grid interval of width ``h``."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = (t3 - 2.0 * t2 + theta) * h
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = (t3 - t2) * h
    re = h00 * z0r + h10 * d0r + h01 * z1r + h11 * d1r
    im = h00 * z0i + h10 * d0i + h01 * z1i + h11 * d1i
    return re, im


@njit(cache=True)
def ring_node(zr, zi, node):
    j = node % zr.size
    return zr[j], zi[j]


@njit(cache=True)
def ring_interp(zr, zi, dr, di, node, theta, h):
    """Value at ``node + theta`` (grid units); nodes <= 0 are the zero history."""
    if node + 1 <= 0:
        return 0.0, 0.0
    size = zr.size
    j0 = node % size
    j1 = (node + 1) % size
    return hermite(zr[j0], zi[j0], dr[j0], di[j0],
                   zr[j1], zi[j1], dr[j1], di[j1], h, theta)


@njit(cache=True)
def ring_reset(zr, zi, dr, di, cr, ci):
    """Zero history on nodes -N-1..0; node 0 carries the right derivative c."""
    zr[:] = 0.0
    zi[:] = 0.0
    dr[:] = 0.0
    di[:] = 0.0
    dr[0] = cr
    di[0] = ci


@njit(cache=True)
def _record_count(n_steps, stride, record_from):
    first = ((record_from + stride - 1) // stride) * stride
    if first > n_steps:
        return 2
    return (n_steps - first) // stride + 3


@njit(cache=True)
def integrate(cr, ci, n_delay, dt, n_steps, escape_radius, stride, record_from):
    """Fixed-step RK4 for z' = -z + z(t - n_delay*dt)**2 + c from zero history.

    Samples are kept at nodes that are multiples of ``stride`` and not before
    ``record_from``; the final node and an escape node are always kept.
    Returns ``(tau, z_re, z_im, status)``.
    """
    size = n_delay + 2
    hzr = np.empty(size)
    hzi = np.empty(size)
    hdr = np.empty(size)
    hdi = np.empty(size)
    ring_reset(hzr, hzi, hdr, hdi, cr, ci)

    cap = _record_count(n_steps, stride, record_from)
    out_t = np.empty(cap)
    out_r = np.empty(cap)
    out_i = np.empty(cap)
    k = 0
    if record_from <= 0:
        out_t[0] = 0.0
        out_r[0] = 0.0
        out_i[0] = 0.0
        k = 1

    r2 = escape_radius * escape_radius
    h = dt
    hh = 0.5 * dt
    h6 = dt / 6.0
    zr = 0.0
    zi = 0.0
    status = STATUS_OK
    for n in range(n_steps):
        m = n - n_delay
        d0r, d0i = ring_node(hzr, hzi, m)
        d1r, d1i = ring_node(hzr, hzi, m + 1)
        dmr, dmi = ring_interp(hzr, hzi, hdr, hdi, m, 0.5, h)

        s0r = d0r * d0r - d0i * d0i + cr
        s0i = 2.0 * d0r * d0i + ci
        smr = dmr * dmr - dmi * dmi + cr
        smi = 2.0 * dmr * dmi + ci
        s1r = d1r * d1r - d1i * d1i + cr
        s1i = 2.0 * d1r * d1i + ci

        k1r = s0r - zr
        k1i = s0i - zi
        k2r = smr - (zr + hh * k1r)
        k2i = smi - (zi + hh * k1i)
        k3r = smr - (zr + hh * k2r)
        k3i = smi - (zi + hh * k2i)
        k4r = s1r - (zr + h * k3r)
        k4i = s1i - (zi + h * k3i)
        zr = zr + h6 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        zi = zi + h6 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)

        node = n + 1
        j = node % size
        hzr[j] = zr
        hzi[j] = zi
        hdr[j] = s1r - zr
        hdi[j] = s1i - zi

        if not (zr * zr + zi * zi <= r2):
            out_t[k] = node * dt
            out_r[k] = zr
            out_i[k] = zi
            k += 1
            if math.isfinite(zr) and math.isfinite(zi):
                status = STATUS_ESCAPED
            else:
                status = STATUS_NONFINITE
            break
        if node == n_steps or (node >= record_from and node % stride == 0):
            out_t[k] = node * dt
            out_r[k] = zr
            out_i[k] = zi
            k += 1
    return out_t[:k], out_r[:k], out_i[:k], status


@njit(cache=True)
def classify_samples(tau, zr, zi, cr, ci, window, conv_tol, escape_radius):
    """Classify a sampled trajectory.

    Returns ``(kind, final_index, scalar, nonfinite)``; scalar is the escape
    time, the stationarity residual, or the max modulus over the window.
    """
    n = tau.size
    r2 = escape_radius * escape_radius
    for k in range(n):
        if not (zr[k] * zr[k] + zi[k] * zi[k] <= r2):
            bad = not (math.isfinite(zr[k]) and math.isfinite(zi[k]))
            return ESCAPED, k, tau[k], bad

    last = n - 1
    ezr = zr[last]
    ezi = zi[last]
    t_start = tau[last] - window * (1.0 + 1e-12)
    start = last
    while start > 0 and tau[start - 1] >= t_start:
        start -= 1

    sup = 0.0
    amax = 0.0
    for k in range(start, n):
        dev = math.hypot(zr[k] - ezr, zi[k] - ezi)
        if dev > sup:
            sup = dev
        a = math.hypot(zr[k], zi[k])
        if a > amax:
            amax = a

    rr = ezr * ezr - ezi * ezi - ezr + cr
    ri = 2.0 * ezr * ezi - ezi + ci
    residual = math.hypot(rr, ri)
    if sup < conv_tol and residual < 10.0 * conv_tol:
        return CONVERGED, last, residual, False

    count = 0
    pmin = np.inf
    pmax = 0.0
    for k in range(start + 1, last):
        a = math.hypot(zr[k], zi[k])
        if a > math.hypot(zr[k - 1], zi[k - 1]) and a > math.hypot(zr[k + 1], zi[k + 1]):
            count += 1
            pmin = min(pmin, a)
            pmax = max(pmax, a)
    if count >= 3 and pmax - pmin <= 0.1 * pmax:
        return OSCILLATING, last, amax, False
    return UNDECIDED, last, amax, False


@njit(cache=True)
def discrete_orbit(cr, ci, max_iter, escape_radius, conv_tol, out_r, out_i):
    """Iterate z -> z**2 + c from 0.

    When ``out_r`` is non-empty it receives z_0..z_k up to the last computed
    iterate. Returns ``(kind, scalar, zf_re, zf_im, n_iterates)`` where
    scalar is the escape index, residual, or tail amplitude.
    """
    record = out_r.size > 0
    r2 = escape_radius * escape_radius
    tail_r = np.zeros(DISCRETE_TAIL)
    tail_i = np.zeros(DISCRETE_TAIL)
    zr = 0.0
    zi = 0.0
    if record:
        out_r[0] = 0.0
        out_i[0] = 0.0
    for k in range(1, max_iter + 1):
        zr, zi = zr * zr - zi * zi + cr, 2.0 * zr * zi + ci
        if record:
            out_r[k] = zr
            out_i[k] = zi
        if not (zr * zr + zi * zi <= r2):
            return ESCAPED, float(k), zr, zi, k + 1
        tail_r[k % DISCRETE_TAIL] = zr
        tail_i[k % DISCRETE_TAIL] = zi

    m = min(DISCRETE_TAIL, max_iter)
    sup = 0.0
    amax = 0.0
    for q in range(m):
        j = (max_iter - q) % DISCRETE_TAIL
        sup = max(sup, math.hypot(tail_r[j] - zr, tail_i[j] - zi))
        amax = max(amax, math.hypot(tail_r[j], tail_i[j]))
    rr = zr * zr - zi * zi - zr + cr
    ri = 2.0 * zr * zi - zi + ci
    residual = math.hypot(rr, ri)
    if sup < conv_tol and residual < 10.0 * conv_tol:
        return CONVERGED, residual, zr, zi, max_iter + 1
    return OSCILLATING, amax, zr, zi, max_iter + 1


@njit(cache=True)
def render_dde_chunk(c_re, c_im, n_delay, dt, n_steps, escape_radius,
                     window, conv_tol, kinds, scalars, flags):
    keep = int(math.ceil(window / dt)) + 1
    record_from = max(0, n_steps - keep)
    for p in range(c_re.size):
        tau, zr, zi, status = integrate(c_re[p], c_im[p], n_delay, dt, n_steps,
                                        escape_radius, 1, record_from)
        kind, _, scalar, bad = classify_samples(tau, zr, zi, c_re[p], c_im[p],
                                                window, conv_tol, escape_radius)
        kinds[p] = kind
        scalars[p] = scalar
        flags[p] = 1 if bad else 0


@njit(cache=True)
def render_discrete_chunk(c_re, c_im, max_iter, escape_radius, conv_tol,
                          kinds, scalars, flags):
    empty = np.empty(0)
    for p in range(c_re.size):
        kind, scalar, _, _, _ = discrete_orbit(c_re[p], c_im[p], max_iter,
                                               escape_radius, conv_tol, empty, empty)
        kinds[p] = kind
        scalars[p] = scalar
        flags[p] = 0
