"""Integer rank kernels: fraction-free elimination over int64, exactly.

Bareiss elimination keeps every intermediate entry an exact minor of the
input, so the result is exact integer arithmetic as long as nothing
overflows.  Both lanes guard every step: when any active entry reaches
``GUARD`` the kernel returns -1 and the caller re-runs the computation with
arbitrary-precision integers.  With |entries| < 2^30 the update terms stay
below 2^61, inside int64.

The numba lane is the default when numba imports; set DEGENLAB_KERNELS=numpy
to force the pure-numpy lane (or DEGENLAB_KERNELS=numba to insist on jit).
``benchmarks/bench_kernels.py`` compares the two.
"""
from __future__ import annotations

import os

import numpy as np

GUARD = 1 << 30


def _rank_bareiss_numpy(a: np.ndarray) -> int:
    m, n = a.shape
    rank = 0
    prev = np.int64(1)
    for col in range(n):
        if rank == m:
            break
        sub = a[rank:, col]
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv], :] = a[[piv, rank], :]
        if np.abs(a[rank:, col:]).max() >= GUARD:
            return -1
        p = a[rank, col]
        if rank + 1 < m:
            f = a[rank + 1 :, col].copy()
            block = a[rank + 1 :, col:]
            block[:, :] = (block * p - np.outer(f, a[rank, col:])) // prev
        prev = p
        rank += 1
    return rank


def _rank_bareiss_loops(a: np.ndarray) -> int:
    m, n = a.shape
    rank = 0
    prev = np.int64(1)
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if a[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for c in range(col, n):
                t = a[rank, c]
                a[rank, c] = a[piv, c]
                a[piv, c] = t
        big = np.int64(0)
        for r in range(rank, m):
            for c in range(col, n):
                v = a[r, c]
                if v < 0:
                    v = -v
                if v > big:
                    big = v
        if big >= GUARD:
            return -1
        p = a[rank, col]
        for r in range(rank + 1, m):
            f = a[r, col]
            if f != 0:
                for c in range(col + 1, n):
                    a[r, c] = (a[r, c] * p - f * a[rank, c]) // prev
            else:
                for c in range(col + 1, n):
                    a[r, c] = (a[r, c] * p) // prev
            a[r, col] = 0
        prev = p
        rank += 1
    return rank


_rank_bareiss_numba = None
try:  # jit is optional at runtime; the numpy lane is always available
    from numba import njit

    _rank_bareiss_numba = njit(cache=True)(_rank_bareiss_loops)
except ImportError:  # pragma: no cover
    pass


def backend_name() -> str:
    forced = os.environ.get("DEGENLAB_KERNELS", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        if _rank_bareiss_numba is None:
            raise RuntimeError("DEGENLAB_KERNELS=numba but numba is not importable")
        return "numba"
    return "numba" if _rank_bareiss_numba is not None else "numpy"


def rank_int64(a: np.ndarray) -> int:
    """Exact rank of an int64 matrix, or -1 when the overflow guard trips.

    The input array is clobbered.
    """
    if a.size == 0:
        return 0
    if backend_name() == "numba":
        return int(_rank_bareiss_numba(a))
    return _rank_bareiss_numpy(a)
