"""Compiled data-parallel DE passes over index ranges of a population.

Each routine processes individuals ``start:stop`` so that a caller can split a
population across worker threads (all routines release the GIL).  The
arithmetic and the random-stream layout replicate :mod:`debench.core` and
:mod:`debench.rng` exactly; the cross-model tests hold them to bitwise equality.

``base`` is the global index of local individual 0.  Island sub-populations use
it so that their streams do not collide; indices returned are local.
"""
import numpy as np
from numba import njit

from ..core import F_LOWER, F_UPPER, TAU_CR, TAU_F
from ..functions.evaluate import _eval_row
from ..rng import CROSSOVER, GOLDEN, INDEX, INIT, JDE, MIX1, MIX2

_GOLDEN = np.uint64(GOLDEN)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_TO_UNIT = 2.0 ** -53

REJECTION = 0
DISPLACEMENT = 1


@njit(cache=True, nogil=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def stream_key(seed, generation, individual, purpose):
    sid = (((np.uint64(generation) << np.uint64(24)) | np.uint64(individual)) << np.uint64(4)) | np.uint64(purpose)
    return mix64(mix64(np.uint64(seed)) ^ sid)


@njit(cache=True, nogil=True)
def uniform_at(key, counter):
    bits = mix64(np.uint64(key) + (np.uint64(counter) + np.uint64(1)) * _GOLDEN)
    return np.float64(bits >> np.uint64(11)) * _TO_UNIT


@njit(cache=True, nogil=True)
def init_positions(seed, base, lo, hi, pos, start, stop):
    D = pos.shape[1]
    for i in range(start, stop):
        key = stream_key(seed, 0, base + i, INIT)
        for j in range(D):
            pos[i, j] = lo + uniform_at(key, j) * (hi - lo)


@njit(cache=True, nogil=True)
def _rejection(key, target, NP):
    c = 0
    r1 = int(uniform_at(key, c) * NP)
    c += 1
    while r1 == target:
        r1 = int(uniform_at(key, c) * NP)
        c += 1
    r2 = int(uniform_at(key, c) * NP)
    c += 1
    while r2 == target or r2 == r1:
        r2 = int(uniform_at(key, c) * NP)
        c += 1
    r3 = int(uniform_at(key, c) * NP)
    c += 1
    while r3 == target or r3 == r1 or r3 == r2:
        r3 = int(uniform_at(key, c) * NP)
        c += 1
    return r1, r2, r3


@njit(cache=True, nogil=True)
def _displacement(key, target, NP):
    third = NP // 3
    c = 0
    while True:
        d1 = 1 + int(uniform_at(key, c) * (NP - 1))
        d2 = 1 + int(uniform_at(key, c + 1) * third)
        d3 = 1 + int(uniform_at(key, c + 2) * third)
        c += 3
        r1 = (target + d1) % NP
        r2 = (r1 + d2) % NP
        r3 = (r2 + d3) % NP
        if r1 != target and r2 != target and r3 != target and r1 != r2 and r1 != r3 and r2 != r3:
            return r1, r2, r3


@njit(cache=True, nogil=True)
def select_indices(seed, generation, base, NP, method, idx, start, stop):
    for i in range(start, stop):
        key = stream_key(seed, generation, base + i, INDEX)
        if method == DISPLACEMENT:
            r1, r2, r3 = _displacement(key, i, NP)
        else:
            r1, r2, r3 = _rejection(key, i, NP)
        idx[i, 0] = r1
        idx[i, 1] = r2
        idx[i, 2] = r3


@njit(cache=True, nogil=True)
def _trial_params(seed, generation, gi, Fp, CRp, i, jde):
    F = Fp[i]
    CR = CRp[i]
    if jde:
        key = stream_key(seed, generation, gi, JDE)
        if uniform_at(key, 0) < TAU_F:
            F = F_LOWER + uniform_at(key, 1) * F_UPPER
        if uniform_at(key, 2) < TAU_CR:
            CR = uniform_at(key, 3)
    return F, CR


@njit(cache=True, nogil=True)
def _make_trial(pos, idx, i, F, CR, key, lo, hi, out):
    D = pos.shape[1]
    r1 = idx[i, 0]
    r2 = idx[i, 1]
    r3 = idx[i, 2]
    jr = int(uniform_at(key, 0) * D)
    for j in range(D):
        m = pos[r1, j] + F * (pos[r2, j] - pos[r3, j])
        if uniform_at(key, j + 1) <= CR or j == jr:
            v = m
        else:
            v = pos[i, j]
        v = max(v, lo)
        v = min(v, hi)
        out[j] = v


@njit(cache=True, nogil=True)
def generate_trials(pos, idx, Fp, CRp, jde, seed, generation, base, lo, hi, trials, Ft, CRt, start, stop):
    for i in range(start, stop):
        F, CR = _trial_params(seed, generation, base + i, Fp, CRp, i, jde)
        Ft[i] = F
        CRt[i] = CR
        key = stream_key(seed, generation, base + i, CROSSOVER)
        _make_trial(pos, idx, i, F, CR, key, lo, hi, trials[i])


@njit(cache=True, nogil=True)
def replace(pos, fit, Fp, CRp, trials, tfit, Ft, CRt, npos, nfit, nF, nCR, start, stop):
    D = pos.shape[1]
    for i in range(start, stop):
        if tfit[i] <= fit[i]:
            for j in range(D):
                npos[i, j] = trials[i, j]
            nfit[i] = tfit[i]
            nF[i] = Ft[i]
            nCR[i] = CRt[i]
        else:
            for j in range(D):
                npos[i, j] = pos[i, j]
            nfit[i] = fit[i]
            nF[i] = Fp[i]
            nCR[i] = CRp[i]


@njit(cache=True, nogil=True)
def fused_pass(
    pos, fit, Fp, CRp, idx, jde, seed, generation, base, lo, hi,
    kind, kids, scales, shifts, rot_t, perm, bounds, lam, sigma, bias,
    npos, nfit, nF, nCR, start, stop,
):
    """Trial generation, evaluation and replacement for one range, in one sweep."""
    D = pos.shape[1]
    trial = np.empty(D)
    z = np.empty(D)
    tmp = np.empty(D)
    w = np.empty(kids.shape[0])
    for i in range(start, stop):
        F, CR = _trial_params(seed, generation, base + i, Fp, CRp, i, jde)
        key = stream_key(seed, generation, base + i, CROSSOVER)
        _make_trial(pos, idx, i, F, CR, key, lo, hi, trial)
        f = _eval_row(trial, kind, kids, scales, shifts, rot_t, perm, bounds, lam, sigma, bias, z, tmp, w)
        if f <= fit[i]:
            for j in range(D):
                npos[i, j] = trial[j]
            nfit[i] = f
            nF[i] = F
            nCR[i] = CR
        else:
            for j in range(D):
                npos[i, j] = pos[i, j]
            nfit[i] = fit[i]
            nF[i] = Fp[i]
            nCR[i] = CRp[i]
