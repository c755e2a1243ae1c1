"""Compiled evaluation of basic, hybrid and composition objectives.

An objective is described by flat arrays (see :class:`Packed`) so one compiled
routine serves all ten functions.  Rows of a batch are evaluated one at a time
with a fixed summation order, which makes every fitness value independent of
batch size, worker count and memory layout.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

from .kernels import kernel_value

BASIC = 0
HYBRID = 1
COMPOSITION = 2


class Packed(NamedTuple):
    kind: int
    kids: np.ndarray  # (n,) kernel ids
    scales: np.ndarray  # (n,) domain scaling per component
    shifts: np.ndarray  # (n, D)
    rot_t: np.ndarray  # (n, D, D) transposed rotation matrices
    perm: np.ndarray  # (D,) hybrid shuffle
    bounds: np.ndarray  # (n + 1,) hybrid chunk offsets
    lam: np.ndarray
    sigma: np.ndarray
    bias: np.ndarray


@njit(cache=True, nogil=True)
def shift_rotate(x, shift, rot_t, scale, out, tmp):
    """``out = M @ (scale * (x - shift))`` with ``rot_t = M.T``."""
    D = x.shape[0]
    for j in range(D):
        tmp[j] = scale * (x[j] - shift[j])
    for i in range(D):
        out[i] = 0.0
    # column sweep: each out[i] still accumulates j = 0, 1, ... in order
    for j in range(D):
        t = tmp[j]
        row = rot_t[j]
        for i in range(D):
            out[i] += row[i] * t


@njit(cache=True, nogil=True)
def composition_weights(x, shifts, sigma, out):
    n = shifts.shape[0]
    D = x.shape[0]
    hit = -1
    total = 0.0
    for k in range(n):
        d2 = 0.0
        for j in range(D):
            d = x[j] - shifts[k, j]
            d2 += d * d
        if d2 == 0.0:
            hit = k
            break
        w = 1.0 / math.sqrt(d2) * math.exp(-d2 / (2.0 * D * sigma[k] * sigma[k]))
        out[k] = w
        total += w
    if hit >= 0:
        for k in range(n):
            out[k] = 0.0
        out[hit] = 1.0
    elif total == 0.0:
        # every weight underflowed: fall back to an even blend
        for k in range(n):
            out[k] = 1.0 / n
    else:
        for k in range(n):
            out[k] = out[k] / total


@njit(cache=True, nogil=True)
def _eval_row(x, kind, kids, scales, shifts, rot_t, perm, bounds, lam, sigma, bias, z, tmp, w):
    if kind == BASIC:
        shift_rotate(x, shifts[0], rot_t[0], scales[0], z, tmp)
        return kernel_value(kids[0], z)
    if kind == HYBRID:
        shift_rotate(x, shifts[0], rot_t[0], 1.0, z, tmp)
        D = x.shape[0]
        for j in range(D):
            tmp[j] = z[perm[j]]
        f = 0.0
        for k in range(kids.shape[0]):
            a = bounds[k]
            b = bounds[k + 1]
            for j in range(a, b):
                z[j] = tmp[j] * scales[k]
            f += kernel_value(kids[k], z[a:b])
        return f
    composition_weights(x, shifts, sigma, w)
    f = 0.0
    for k in range(kids.shape[0]):
        shift_rotate(x, shifts[k], rot_t[k], scales[k], z, tmp)
        f += w[k] * (lam[k] * kernel_value(kids[k], z) + bias[k])
    return f


@njit(cache=True, nogil=True)
def eval_rows(X, kind, kids, scales, shifts, rot_t, perm, bounds, lam, sigma, bias, out, start, stop):
    """Evaluate rows ``start:stop`` of ``X`` into ``out``."""
    D = X.shape[1]
    z = np.empty(D)
    tmp = np.empty(D)
    w = np.empty(kids.shape[0])
    for r in range(start, stop):
        out[r] = _eval_row(X[r], kind, kids, scales, shifts, rot_t, perm, bounds, lam, sigma, bias, z, tmp, w)


def evaluate_packed(p: Packed, X: np.ndarray, out: np.ndarray | None = None, start: int = 0, stop: int | None = None) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if out is None:
        out = np.empty(X.shape[0])
    if stop is None:
        stop = X.shape[0]
    eval_rows(X, p.kind, p.kids, p.scales, p.shifts, p.rot_t, p.perm, p.bounds, p.lam, p.sigma, p.bias, out, start, stop)
    return out
