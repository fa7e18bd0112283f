# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""C versions of the batched kernels in ``_pykernels``.

Same algorithms and constants, one matrix / one spectrum per loop
iteration instead of numpy broadcasting. ``r_theta`` differs: without
vectorisation constraints each row runs Newton inside a shrinking bracket
(geometric midpoint on rejected steps) and stops as soon as it has
converged, instead of a fixed bisection count followed by polishing.
"""

import numpy as np

from libc.math cimport atan, fabs, hypot, sqrt, tan

cdef enum:
    MAX_SWEEPS = 60
    HYBRID_STEPS = 100


cdef void _jacobi_one(double[:, ::1] a, double[:, ::1] v) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k, sweep
    cdef double off, scale, apq, tau, t, c, s, x, y

    for p in range(n):
        for q in range(n):
            v[p, q] = 1.0 if p == q else 0.0

    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)

    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if sqrt(off) <= 1e-18 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + hypot(tau, 1.0))
                else:
                    t = -1.0 / (-tau + hypot(tau, 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y


def jacobi_eigh(a_in):
    a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t nb = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    v = np.empty_like(a)
    cdef double[:, :, ::1] av = a
    cdef double[:, :, ::1] vv = v
    cdef Py_ssize_t b
    with nogil:
        for b in range(nb):
            _jacobi_one(av[b], vv[b])
    vals = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vecs = np.take_along_axis(v, order[:, None, :], axis=2)
    return vals, vecs


cdef inline double _sl(const double* lam, Py_ssize_t n, double r) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += atan(r * lam[i])
    return acc


def sl_r(vals_in, r_in):
    vals = np.ascontiguousarray(vals_in, dtype=np.float64)
    rr = np.array(np.broadcast_to(np.asarray(r_in, dtype=np.float64), (vals.shape[0],)))
    out = np.empty(vals.shape[0])
    cdef double[:, ::1] lv = vals
    cdef double[::1] rv = rr
    cdef double[::1] ov = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(lv.shape[0]):
            ov[b] = _sl(&lv[b, 0], lv.shape[1], rv[b])
    return out


def r_theta(vals_in, theta_in):
    vals = np.ascontiguousarray(vals_in, dtype=np.float64)
    nb = vals.shape[0]
    theta = np.array(np.broadcast_to(np.asarray(theta_in, dtype=np.float64), (nb,)))
    out = np.empty(nb)
    cdef double[:, ::1] lv = vals
    cdef double[::1] th = theta
    cdef double[::1] ov = out
    cdef Py_ssize_t n = vals.shape[1]
    cdef Py_ssize_t b, k, i
    cdef double t, lo, hi, r, f, df, rl, cand
    with nogil:
        for b in range(lv.shape[0]):
            t = tan(th[b] / n)
            lo = t / lv[b, n - 1]
            hi = t / lv[b, 0]
            r = sqrt(lo * hi)
            # Newton kept inside a shrinking bracket; a rejected step falls
            # back to the geometric midpoint
            for k in range(HYBRID_STEPS):
                f = -th[b]
                df = 0.0
                for i in range(n):
                    rl = r * lv[b, i]
                    f += atan(rl)
                    df += lv[b, i] / (1.0 + rl * rl)
                if f > 0.0:
                    hi = r
                elif f < 0.0:
                    lo = r
                else:
                    break
                cand = r - f / df if df > 0.0 else -1.0
                if not (cand > lo and cand < hi):
                    cand = sqrt(lo * hi)
                if fabs(cand - r) <= 4e-16 * r:
                    r = cand
                    break
                r = cand
            ov[b] = r
    return out
