"""Dense mod-p row-reduction kernels.

This is the hot loop of the whole package: every exact nullspace/solve in the
bimodule engine is answered by reduced row echelon forms over word-sized prime
fields (the rational answer is recovered by CRT lifting and verified exactly in
:mod:`soergelkit._linalg`).

Two interchangeable implementations are provided: a numba ``@njit`` kernel and
a vectorized pure-numpy fallback.  Selection:

* ``SOERGELKIT_KERNEL=numpy`` forces the numpy path,
* ``SOERGELKIT_KERNEL=numba`` forces numba (ImportError if unavailable),
* unset: numba when importable, numpy otherwise.

Both kernels operate in place on C-contiguous ``int64`` arrays with entries
already reduced into ``[0, p)``; primes must stay below 2**31 so products fit
in int64.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["rref_modp", "nullspace_modp", "active_backend", "set_backend", "PRIME_POOL"]

# Primes just under 2**31; products of two residues fit comfortably in int64.
PRIME_POOL = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
    2147483423, 2147483399, 2147483353, 2147483323, 2147483269,
    2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
)


def _rref_numpy(a: np.ndarray, p: int) -> np.ndarray:
    """In-place RREF of ``a`` over F_p; returns the pivot column indices."""
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            a[np.ix_(rows, np.arange(c, n))] = (
                a[np.ix_(rows, np.arange(c, n))] - np.outer(a[rows, c], a[r, c:])
            ) % p
        pivots.append(c)
        r += 1
    return np.asarray(pivots, dtype=np.int64)


def _build_numba_kernel():
    from numba import njit

    @njit(cache=True)
    def _rref_numba(a, p):  # pragma: no cover - exercised via rref_modp
        m, n = a.shape
        pivots = np.empty(min(m, n), dtype=np.int64)
        r = 0
        for c in range(n):
            if r == m:
                break
            pr = -1
            for i in range(r, m):
                if a[i, c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(c, n):
                    t = a[r, j]
                    a[r, j] = a[pr, j]
                    a[pr, j] = t
            # inverse by Fermat: p prime, a[r, c] != 0 mod p
            base = a[r, c]
            e = p - 2
            inv = 1
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            for j in range(c, n):
                a[r, j] = (a[r, j] * inv) % p
            for i in range(m):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(c, n):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            pivots[r] = c
            r += 1
        return pivots[:r]

    return _rref_numba


_BACKENDS = {}


def _load_backend(name: str):
    if name in _BACKENDS:
        return _BACKENDS[name]
    if name == "numpy":
        _BACKENDS[name] = _rref_numpy
    elif name == "numba":
        _BACKENDS[name] = _build_numba_kernel()
    else:
        raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")
    return _BACKENDS[name]


def _initial_backend() -> str:
    env = os.environ.get("SOERGELKIT_KERNEL", "").strip().lower()
    if env:
        return env
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


_ACTIVE = _initial_backend()


def active_backend() -> str:
    return _ACTIVE


def set_backend(name: str) -> None:
    """Switch kernels at runtime (used by tests and the benchmark)."""
    global _ACTIVE
    _load_backend(name)
    _ACTIVE = name


def rref_modp(a: np.ndarray, p: int) -> np.ndarray:
    """Reduce ``a`` (int64, entries in [0, p)) to RREF in place mod ``p``.

    Returns the array of pivot column indices; the rank is its length.
    """
    if a.dtype != np.int64 or not a.flags.c_contiguous:
        raise TypeError("rref_modp expects a C-contiguous int64 array")
    kernel = _load_backend(_ACTIVE)
    return np.asarray(kernel(a, p), dtype=np.int64)


def nullspace_modp(a: np.ndarray, p: int):
    """Nullspace basis of ``a`` mod ``p`` from its RREF.

    Returns ``(pivots, free_cols, basis)`` where ``basis[k]`` is the nullspace
    vector (length = #columns) attached to ``free_cols[k]``: it has a 1 in that
    column and minus the RREF entries in the pivot columns.
    """
    n = a.shape[1]
    pivots = rref_modp(a, p)
    pivset = set(int(c) for c in pivots)
    free = [c for c in range(n) if c not in pivset]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            v = a[r, fc]
            if v:
                basis[k, pc] = (-v) % p
    return pivots, np.asarray(free, dtype=np.int64), basis
