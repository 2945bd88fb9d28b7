"""Batched hot loops over F_q codes, with a numba and a pure-numpy backend.

The numba backend is used when numba imports and ``OPERLAB_NUMBA`` is not
``0``; otherwise the numpy versions run.  Both return identical arrays.
Field arithmetic goes through the (add, mul, neg) code tables from
``GF.numpy_tables``.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is too old; OpenMP is safe for concurrent callers
        numba.config.THREADING_LAYER = "omp"
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def backend() -> str:
    """'numba' or 'numpy', read from the environment on every call."""
    if HAVE_NUMBA and os.environ.get("OPERLAB_NUMBA", "1") != "0":
        return "numba"
    return "numpy"


def thread_cap() -> int:
    raw = os.environ.get("OPERLAB_THREADS")
    if not raw:
        return os.cpu_count() or 1
    return max(1, int(raw))


def _apply_threads():
    if HAVE_NUMBA:
        numba.set_num_threads(min(thread_cap(), numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# numpy backend

def _np_matmul(A, B, add, mul):
    # A, B: (batch, n, n) codes
    n = A.shape[1]
    acc = mul[A[:, :, 0][:, :, None], B[:, 0, :][:, None, :]]
    for k in range(1, n):
        acc = add[acc, mul[A[:, :, k][:, :, None], B[:, k, :][:, None, :]]]
    return acc


def _np_pcurv(mats, e, a, add, mul, neg):
    batch, n, _ = mats.shape
    result = np.zeros_like(mats)
    idx = np.arange(n)
    result[:, idx, idx] = 1
    base = mats.copy()
    while e:
        if e & 1:
            result = _np_matmul(result, base, add, mul)
        e >>= 1
        if e:
            base = _np_matmul(base, base, add, mul)
    return add[result, neg[mul[a, mats]]]


def _np_lucas_grid(ks, a, p, N):
    mod = p ** N
    shifted = (ks + a) % mod
    out = np.empty((ks.shape[0], N), dtype=np.int64)
    for i in range(N):
        out[:, i] = (shifted // p ** i) % p
    return out


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_matmul_one(A, B, add, mul, out):
        n = A.shape[0]
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = add[acc, mul[A[i, k], B[k, j]]]
                out[i, j] = acc

    @njit(cache=True)
    def _nb_pcurv_one(M, e, a, add, mul, neg, out):
        n = M.shape[0]
        result = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            result[i, i] = 1
        base = M.copy()
        tmp = np.empty((n, n), dtype=np.int64)
        while e:
            if e & 1:
                _nb_matmul_one(result, base, add, mul, tmp)
                result[:, :] = tmp
            e >>= 1
            if e:
                _nb_matmul_one(base, base, add, mul, tmp)
                base[:, :] = tmp
        for i in range(n):
            for j in range(n):
                out[i, j] = add[result[i, j], neg[mul[a, M[i, j]]]]

    @njit(cache=True, parallel=True)
    def _nb_pcurv(mats, e, a, add, mul, neg):
        out = np.empty_like(mats)
        for b in prange(mats.shape[0]):
            _nb_pcurv_one(mats[b], e, a, add, mul, neg, out[b])
        return out

    @njit(cache=True, parallel=True)
    def _nb_lucas_grid(ks, a, p, N):
        mod = p ** N
        out = np.empty((ks.shape[0], N), dtype=np.int64)
        for r in prange(ks.shape[0]):
            shifted = (ks[r] + a) % mod
            for i in range(N):
                out[r, i] = shifted % p
                shifted //= p
        return out


# ---------------------------------------------------------------------------
# dispatch

def batched_pcurvature(mats: np.ndarray, e: int, a: int, tables, which: str | None = None) -> np.ndarray:
    """M^e - a*M for every matrix in a (batch, n, n) array of field codes."""
    add, mul, neg = tables
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    which = which or backend()
    if mats.shape[0] == 0:
        return mats.copy()
    if which == "numba":
        _apply_threads()
        return _nb_pcurv(mats, int(e), int(a), add, mul, neg)
    return _np_pcurv(mats, int(e), int(a), add, mul, neg)


def lucas_digit_grid(ks: np.ndarray, a: int, p: int, N: int, which: str | None = None) -> np.ndarray:
    """Base-p digits 0..N-1 of (k + a) mod p^N for each exponent k."""
    ks = np.ascontiguousarray(ks, dtype=np.int64)
    which = which or backend()
    if which == "numba":
        _apply_threads()
        return _nb_lucas_grid(ks, int(a), int(p), int(N))
    return _np_lucas_grid(ks, int(a), int(p), int(N))
