"""Numba kernels for skip-gram negative-sampling training.

The update rule mirrors the classic word2vec C implementation: for every
(center, context) pair inside a dynamically shrunk window, the context
word's input vector is trained to discriminate the center word from
``negatives`` draws of a unigram^(3/4) table.  Randomness comes from an
inline splitmix64 stream seeded per (epoch, sentence), which makes results
independent of sentence processing order: the single-threaded path is
exactly reproducible, and the multi-threaded path differs only through
benign update races.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_F53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _next(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(inline="always")
def _uniform(state):
    state, z = _next(state)
    return state, float(z >> np.uint64(11)) * _F53


@njit(inline="always")
def _sentence_state(seed, epoch, sent):
    s = (np.uint64(seed) + _GOLDEN) * _MIX1
    s = s ^ (np.uint64(epoch) * _MIX2 + np.uint64(sent) * _GOLDEN)
    return s


@njit(inline="always")
def _train_sentence(
    ids, start, end, syn0, syn1, table, keep, window, negatives, alpha, state, buf, work
):
    # Frequency subsampling: drop token w with prob 1 - keep[w].
    m = 0
    for idx in range(start, end):
        w = ids[idx]
        if keep[w] >= 1.0:
            buf[m] = w
            m += 1
        else:
            state, u = _uniform(state)
            if u < keep[w]:
                buf[m] = w
                m += 1
    d = syn0.shape[1]
    tsize = np.uint64(table.shape[0])
    for i in range(m):
        center = buf[i]
        state, z = _next(state)
        b = 1 + int(z % np.uint64(window))
        lo = i - b if i - b > 0 else 0
        hi = i + b + 1 if i + b + 1 < m else m
        for j in range(lo, hi):
            if j == i:
                continue
            ctx = buf[j]
            for k in range(d):
                work[k] = 0.0
            for neg in range(negatives + 1):
                if neg == 0:
                    target = center
                    label = 1.0
                else:
                    state, z = _next(state)
                    target = table[int(z % tsize)]
                    if target == center:
                        continue
                    label = 0.0
                f = 0.0
                for k in range(d):
                    f += float(syn0[ctx, k]) * float(syn1[target, k])
                if f > 6.0:
                    sig = 1.0
                elif f < -6.0:
                    sig = 0.0
                else:
                    sig = 1.0 / (1.0 + np.exp(-f))
                g = (label - sig) * alpha
                for k in range(d):
                    work[k] += g * float(syn1[target, k])
                    syn1[target, k] += g * float(syn0[ctx, k])
            for k in range(d):
                syn0[ctx, k] += work[k]
    return state


@njit(cache=True)
def train_serial(ids, offsets, syn0, syn1, table, keep, window, negatives, epochs, alpha0, seed):
    n_sent = offsets.shape[0] - 1
    n_tokens = offsets[n_sent]
    total = float(n_tokens) * epochs
    alpha_min = alpha0 * 1e-4
    maxlen = 0
    for s in range(n_sent):
        ln = offsets[s + 1] - offsets[s]
        if ln > maxlen:
            maxlen = ln
    buf = np.empty(maxlen, dtype=np.int32)
    work = np.empty(syn0.shape[1], dtype=np.float64)
    for ep in range(epochs):
        for s in range(n_sent):
            done = float(ep) * float(n_tokens) + float(offsets[s])
            alpha = alpha0 * (1.0 - done / total)
            if alpha < alpha_min:
                alpha = alpha_min
            state = _sentence_state(seed, ep, s)
            _train_sentence(
                ids, offsets[s], offsets[s + 1], syn0, syn1, table, keep,
                window, negatives, alpha, state, buf, work,
            )


@njit(cache=True, parallel=True)
def train_parallel(ids, offsets, syn0, syn1, table, keep, window, negatives, epochs, alpha0, seed):
    # Hogwild-style: concurrent row updates race, which only perturbs SGD noise.
    n_sent = offsets.shape[0] - 1
    n_tokens = offsets[n_sent]
    total = float(n_tokens) * epochs
    alpha_min = alpha0 * 1e-4
    for ep in range(epochs):
        for s in prange(n_sent):
            done = float(ep) * float(n_tokens) + float(offsets[s])
            alpha = alpha0 * (1.0 - done / total)
            if alpha < alpha_min:
                alpha = alpha_min
            buf = np.empty(offsets[s + 1] - offsets[s], dtype=np.int32)
            work = np.empty(syn0.shape[1], dtype=np.float64)
            state = _sentence_state(seed, ep, s)
            _train_sentence(
                ids, offsets[s], offsets[s + 1], syn0, syn1, table, keep,
                window, negatives, alpha, state, buf, work,
            )
