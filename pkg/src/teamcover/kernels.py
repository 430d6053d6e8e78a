"""Bit-packed coverage kernels.

Site-to-demand coverage is stored as little-endian bitsets: demand index
``d`` occupies bit ``d % 64`` of word ``d // 64`` of a site's row. The
solvers spend almost all of their time in weighted popcounts over these
rows (marginal-gain scans, union evaluation), so every kernel exists
twice: a numba ``@njit`` build that walks words and bits in place, and a
vectorized pure-numpy fallback that expands residual bitsets to a dense
0/1 matrix and uses matrix-vector products. Both return identical
integers.

The active set is chosen once at import time from the
``TEAMCOVER_BACKEND`` environment variable: ``numba``, ``numpy``, or
unset/``auto`` (numba when importable, numpy otherwise). Set the variable
before the first ``teamcover`` import. ``benchmarks/bench_backends.py``
times the two implementations side by side.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

_ONE = np.uint64(1)


def n_words(n_bits: int) -> int:
    """Number of uint64 words needed to hold ``n_bits`` bits."""
    return (n_bits + 63) >> 6


def pack_rows(rows) -> np.ndarray:
    """Pack a boolean matrix of shape (R, n) into uint64 words (R, ceil(n/64))."""
    rows = np.ascontiguousarray(rows, dtype=bool)
    r, n = rows.shape
    out = np.zeros((r, n_words(n)), dtype=np.uint64)
    for i in range(r):
        on = np.flatnonzero(rows[i])
        np.bitwise_or.at(out[i], on >> 6, _ONE << (on & 63).astype(np.uint64))
    return out


def _bit_index(n: int):
    idx = np.arange(n)
    return idx >> 6, (idx & 63).astype(np.uint64)


# --- pure-numpy backend ----------------------------------------------------


def _np_unpack(words2d: np.ndarray, n: int) -> np.ndarray:
    wi, bi = _bit_index(n)
    return ((words2d[:, wi] >> bi) & _ONE).astype(np.int64)


def _np_mask_value(words, weights):
    n = weights.shape[0]
    wi, bi = _bit_index(n)
    bits = ((words[wi] >> bi) & _ONE).astype(np.int64)
    return np.int64(bits @ weights)


def _np_gains(cover, covered, weights):
    resid = cover & ~covered
    return _np_unpack(resid, weights.shape[0]) @ weights


def _np_union_rows(cover, rows):
    if rows.shape[0] == 0:
        return np.zeros(cover.shape[1], dtype=np.uint64)
    return np.bitwise_or.reduce(cover[rows], axis=0)


def _np_cover_counts(cover, rows, n):
    if rows.shape[0] == 0:
        return np.zeros(n, dtype=np.int32)
    return _np_unpack(cover[rows], n).sum(axis=0).astype(np.int32)


def _np_counts_value(counts, weights, need):
    return np.int64(weights[counts >= need].sum())


def _np_b_gains(cover, counts, weights, need):
    bits = _np_unpack(cover, weights.shape[0])
    gain_new = bits @ np.where(counts == need - 1, weights, 0)
    gain_progress = bits @ np.where(counts < need - 1, weights, 0)
    return gain_new, gain_progress


def _np_update_counts(counts, row_words, delta):
    n = counts.shape[0]
    wi, bi = _bit_index(n)
    bits = ((row_words[wi] >> bi) & _ONE).astype(np.int32)
    counts += np.int32(delta) * bits


NUMPY_BACKEND = SimpleNamespace(
    name="numpy",
    mask_value=_np_mask_value,
    gains=_np_gains,
    union_rows=_np_union_rows,
    cover_counts=_np_cover_counts,
    counts_value=_np_counts_value,
    b_gains=_np_b_gains,
    update_counts=_np_update_counts,
)


# --- numba backend ---------------------------------------------------------


def _build_numba():
    from numba import njit

    one = np.uint64(1)

    @njit(cache=True, nogil=True)
    def mask_value(words, weights):
        total = np.int64(0)
        for w in range(words.shape[0]):
            x = words[w]
            if x:
                base = w << 6
                b = 0
                while x:
                    if x & one:
                        total += weights[base + b]
                    x >>= one
                    b += 1
        return total

    @njit(cache=True, nogil=True)
    def gains(cover, covered, weights):
        out = np.zeros(cover.shape[0], dtype=np.int64)
        for j in range(cover.shape[0]):
            acc = np.int64(0)
            for w in range(cover.shape[1]):
                x = cover[j, w] & ~covered[w]
                if x:
                    base = w << 6
                    b = 0
                    while x:
                        if x & one:
                            acc += weights[base + b]
                        x >>= one
                        b += 1
            out[j] = acc
        return out

    @njit(cache=True, nogil=True)
    def union_rows(cover, rows):
        out = np.zeros(cover.shape[1], dtype=np.uint64)
        for k in range(rows.shape[0]):
            r = rows[k]
            for w in range(cover.shape[1]):
                out[w] |= cover[r, w]
        return out

    @njit(cache=True, nogil=True)
    def cover_counts(cover, rows, n):
        counts = np.zeros(n, dtype=np.int32)
        for k in range(rows.shape[0]):
            r = rows[k]
            for w in range(cover.shape[1]):
                x = cover[r, w]
                if x:
                    base = w << 6
                    b = 0
                    while x:
                        if x & one:
                            counts[base + b] += 1
                        x >>= one
                        b += 1
        return counts

    @njit(cache=True, nogil=True)
    def counts_value(counts, weights, need):
        total = np.int64(0)
        for i in range(counts.shape[0]):
            if counts[i] >= need:
                total += weights[i]
        return total

    @njit(cache=True, nogil=True)
    def b_gains(cover, counts, weights, need):
        gain_new = np.zeros(cover.shape[0], dtype=np.int64)
        gain_progress = np.zeros(cover.shape[0], dtype=np.int64)
        for j in range(cover.shape[0]):
            acc_new = np.int64(0)
            acc_prog = np.int64(0)
            for w in range(cover.shape[1]):
                x = cover[j, w]
                if x:
                    base = w << 6
                    b = 0
                    while x:
                        if x & one:
                            i = base + b
                            c = counts[i]
                            if c == need - 1:
                                acc_new += weights[i]
                            elif c < need - 1:
                                acc_prog += weights[i]
                        x >>= one
                        b += 1
            gain_new[j] = acc_new
            gain_progress[j] = acc_prog
        return gain_new, gain_progress

    @njit(cache=True, nogil=True)
    def update_counts(counts, row_words, delta):
        for w in range(row_words.shape[0]):
            x = row_words[w]
            if x:
                base = w << 6
                b = 0
                while x:
                    if x & one:
                        counts[base + b] += delta
                    x >>= one
                    b += 1

    return SimpleNamespace(
        name="numba",
        mask_value=mask_value,
        gains=gains,
        union_rows=union_rows,
        cover_counts=cover_counts,
        counts_value=counts_value,
        b_gains=b_gains,
        update_counts=update_counts,
    )


try:
    NUMBA_BACKEND = _build_numba()
except ImportError:
    NUMBA_BACKEND = None


def _select_backend():
    choice = os.environ.get("TEAMCOVER_BACKEND", "").strip().lower()
    if choice not in ("", "auto", "numpy", "numba"):
        raise ValueError(f"unsupported TEAMCOVER_BACKEND value: {choice!r}")
    if choice == "numpy":
        return NUMPY_BACKEND
    if choice == "numba":
        if NUMBA_BACKEND is None:
            raise ImportError("TEAMCOVER_BACKEND=numba but numba is not importable")
        return NUMBA_BACKEND
    return NUMBA_BACKEND if NUMBA_BACKEND is not None else NUMPY_BACKEND


_ACTIVE = _select_backend()

mask_value = _ACTIVE.mask_value
gains = _ACTIVE.gains
union_rows = _ACTIVE.union_rows
cover_counts = _ACTIVE.cover_counts
counts_value = _ACTIVE.counts_value
b_gains = _ACTIVE.b_gains
update_counts = _ACTIVE.update_counts


def active_backend() -> str:
    """Name of the kernel set in use ('numba' or 'numpy')."""
    return _ACTIVE.name


def warmup() -> None:
    """Run each kernel once on tiny inputs (triggers numba compilation)."""
    cover = pack_rows(np.array([[True, False], [True, True]]))
    weights = np.array([3, 4], dtype=np.int64)
    rows = np.array([0, 1], dtype=np.int64)
    counts = np.zeros(2, dtype=np.int32)
    mask_value(cover[0], weights)
    gains(cover, cover[0], weights)
    union_rows(cover, rows)
    cover_counts(cover, rows, 2)
    counts_value(counts, weights, 1)
    b_gains(cover, counts, weights, 2)
    update_counts(counts, cover[0], 1)
