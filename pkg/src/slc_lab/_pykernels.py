"""Batched numpy kernels: cyclic Jacobi eigensolver and the R_theta root finder.

These are the reference implementations. ``_ckernels.pyx`` mirrors them
loop-for-loop in C; :mod:`slc_lab.kernels` picks one at import time.
"""

from __future__ import annotations

import numpy as np

MAX_SWEEPS = 60
BISECTION_STEPS = 60
NEWTON_STEPS = 5


def jacobi_eigh(a):
    """Eigen-decompose a stack of symmetric matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (B, n, n)

    Returns
    -------
    vals : ndarray, shape (B, n), ascending per row
    vecs : ndarray, shape (B, n, n), columns are the matching eigenvectors
    """
    a = np.array(a, dtype=float, copy=True)
    nb, n, _ = a.shape
    v = np.zeros_like(a)
    v[:, np.arange(n), np.arange(n)] = 1.0
    if n == 1 or nb == 0:
        return a[:, :, 0].copy() if n == 1 else np.zeros((0, n)), v

    iu = np.triu_indices(n, 1)
    scale = np.sqrt(np.sum(a * a, axis=(1, 2)))
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(a[:, iu[0], iu[1]] ** 2, axis=1))
        if np.all(off <= 1e-18 * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                # a negligible a_pq overflows tau to inf, which correctly gives t = 0
                with np.errstate(over="ignore", invalid="ignore"):
                    tau = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(tau, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c[:, None] * colp - s[:, None] * colq
                a[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c[:, None] * vp - s[:, None] * vq
                v[:, :, q] = s[:, None] * vp + c[:, None] * vq

    vals = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vecs = np.take_along_axis(v, order[:, None, :], axis=2)
    return vals, vecs


def sl_r(vals, r):
    """Sum of arctan(r * lambda_i) for each row of ``vals``."""
    vals = np.asarray(vals, dtype=float)
    r = np.broadcast_to(np.asarray(r, dtype=float), vals.shape[:1])
    return np.sum(np.arctan(r[:, None] * vals), axis=1)


def r_theta(vals, theta):
    """Solve sum arctan(r * lambda_i) = theta for r > 0, row by row.

    ``vals`` must be strictly positive and sorted ascending. The bracket
    [tan(theta/n)/lambda_max, tan(theta/n)/lambda_min] always straddles the
    root; it is bisected in log r, then polished with safeguarded Newton.
    """
    vals = np.asarray(vals, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), vals.shape[:1])
    n = vals.shape[1]
    t = np.tan(theta / n)
    lo = np.log(t / vals[:, -1])
    hi = np.log(t / vals[:, 0])
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = sl_r(vals, np.exp(mid)) > theta
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    # widened by a few ulps so Newton may cross the collapsed bracket
    rlo, rhi = np.exp(lo) * (1 - 1e-12), np.exp(hi) * (1 + 1e-12)
    r = np.exp(0.5 * (lo + hi))
    for _ in range(NEWTON_STEPS):
        rl = r[:, None] * vals
        f = np.sum(np.arctan(rl), axis=1) - theta
        df = np.sum(vals / (1.0 + rl * rl), axis=1)
        step = np.where(df > 0.0, f / np.where(df > 0.0, df, 1.0), 0.0)
        cand = r - step
        r = np.where((cand >= rlo) & (cand <= rhi), cand, r)
    return r
