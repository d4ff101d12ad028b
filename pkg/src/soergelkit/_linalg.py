"""Exact linear algebra over Q on top of the mod-p kernels.

Sparse integer constraint systems are reduced modulo word-sized primes (the
kernels in :mod:`soergelkit._modp`), and rational answers are recovered by CRT
plus rational reconstruction.  Soundness policy:

* ``certify="verify"`` reconstructs a rational object and checks it against
  the original integer matrix with exact arithmetic; a success is a proof
  (mod-p rank can only undercount, so a verified nullspace of mod-p nullity is
  the nullspace).  Used whenever a basis is requested.
* ``certify="double"`` accepts a rank after two distinct primes agree on the
  pivot structure.  This is Monte Carlo (two independent primes would both
  have to divide the same leading minors) and is reserved for dimension-only
  queries whose results are re-checked downstream against an independent
  oracle.

Rows are sparse ``[(col, int), ...]`` with arbitrary-precision integer
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from ._modp import PRIME_POOL, nullspace_modp, rref_modp

__all__ = [
    "LinearSystemError",
    "NullspaceResult",
    "nullspace",
    "solve_columns",
    "rref_fraction",
    "rational_reconstruct",
    "int_rows_from_fraction_rows",
]


class LinearSystemError(RuntimeError):
    """Exact reconstruction failed within the prime budget."""


@dataclass
class NullspaceResult:
    nullity: int
    basis: list[tuple[Fraction, ...]] | None
    verified: bool


def rational_reconstruct(r: int, m: int):
    """Wang reconstruction: n/d == r (mod m) with |n|, d <= sqrt(m/2)."""
    bound = (m // 2) ** 0.5
    v0, v1 = m, r % m
    u0, u1 = 0, 1
    while v1 > bound:
        q = v0 // v1
        v0, v1 = v1, v0 - q * v1
        u0, u1 = u1, u0 - q * u1
    d = abs(u1)
    if d == 0 or d > bound:
        return None
    n = v1 if u1 > 0 else -v1
    if gcd(d, m) != 1 or gcd(abs(n), d) != 1:
        return None
    return Fraction(n, d)


def _crt_pair(r1, m1, r2, m2):
    inv = pow(m1 % m2, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t, m1 * m2


def _dense_mod(rows, ncols, p):
    arr = np.zeros((max(len(rows), 1), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, a in row:
            if a % p:
                arr[i, c] = (arr[i, c] + a) % p
    return arr


def _verify_nullvector(rows, vec) -> bool:
    den = lcm(*[f.denominator for f in vec]) if vec else 1
    ints = [int(f * den) for f in vec]
    for row in rows:
        if sum(a * ints[c] for c, a in row) != 0:
            return False
    return True


def nullspace(rows, ncols, need_basis=True, certify=None, max_primes=8) -> NullspaceResult:
    """Nullspace of the sparse integer matrix ``rows`` (shape m x ncols)."""
    if certify is None:
        certify = "verify" if need_basis else "double"
    if ncols == 0:
        return NullspaceResult(0, [] if need_basis else None, True)
    rows = [r for r in rows if r]
    if not rows:
        basis = None
        if need_basis:
            basis = []
            for c in range(ncols):
                v = [Fraction(0)] * ncols
                v[c] = Fraction(1)
                basis.append(tuple(v))
        return NullspaceResult(ncols, basis, True)

    runs = []  # (p, pivots tuple, free tuple, basis mod p)
    for p in PRIME_POOL[:max_primes]:
        arr = _dense_mod(rows, ncols, p)
        pivots, free, bas = nullspace_modp(arr, p)
        runs.append((p, tuple(int(x) for x in pivots), tuple(int(x) for x in free), bas))
        best_rank = max(len(r[1]) for r in runs)
        live = [r for r in runs if len(r[1]) == best_rank]
        if len(live) < 2 and certify == "double":
            continue
        # a bad prime can only lose rank or push pivots lexicographically
        # later, so the lex-least pivot tuple among max-rank runs is the
        # candidate closest to the rational answer
        pivs = min(r[1] for r in live)
        live = [r for r in live if r[1] == pivs]
        if certify == "double" and not need_basis:
            if len(live) >= 2:
                return NullspaceResult(ncols - best_rank, None, False)
            continue
        # reconstruct basis from the live runs
        free = live[0][2]
        cand = []
        ok = True
        for k in range(len(free)):
            vec = []
            for c in range(ncols):
                r0, m0 = int(live[0][3][k, c]), live[0][0]
                for rr in live[1:]:
                    r0, m0 = _crt_pair(r0, m0, int(rr[3][k, c]), rr[0])
                f = rational_reconstruct(r0, m0)
                if f is None:
                    ok = False
                    break
                vec.append(f)
            if not ok:
                break
            cand.append(tuple(vec))
        if ok and all(_verify_nullvector(rows, v) for v in cand):
            return NullspaceResult(len(free), cand if need_basis else None, True)
    raise LinearSystemError(
        f"nullspace not certified within {max_primes} primes ({len(rows)}x{ncols})"
    )


def solve_columns(rows, ncols, rhs_cols, max_primes=8):
    """Solve ``A x = b`` for each sparse rhs column; A must have full column rank.

    ``rows`` is A (m x ncols, sparse int rows), ``rhs_cols`` a list of sparse
    columns ``[(row_index, int), ...]``.  Returns one Fraction tuple per rhs.
    Raises LinearSystemError if A is column-rank-deficient or inconsistent.
    """
    m = len(rows)
    k = len(rhs_cols)
    aug = [list(row) for row in rows]
    for j, col in enumerate(rhs_cols):
        for i, a in col:
            aug[i].append((ncols + j, a))
    runs = []
    for p in PRIME_POOL[:max_primes]:
        arr = _dense_mod(aug, ncols + k, p)
        pivots = rref_modp(arr, p)
        piv = tuple(int(x) for x in pivots)
        if any(c >= ncols for c in piv):
            raise LinearSystemError("inconsistent linear system")
        if len(piv) < ncols:
            # possible bad prime; but if every prime agrees the matrix is deficient
            runs.append(None)
            if len([r for r in runs if r is None]) >= 2:
                raise LinearSystemError("coefficient matrix is column-rank deficient")
            continue
        runs.append((p, arr.copy()))
        live = [r for r in runs if r]
        sols = []
        ok = True
        for j in range(k):
            vec = []
            for r in range(ncols):
                r0, m0 = int(live[0][1][r, ncols + j]), live[0][0]
                for rr in live[1:]:
                    r0, m0 = _crt_pair(r0, m0, int(rr[1][r, ncols + j]), rr[0])
                f = rational_reconstruct(r0, m0)
                if f is None:
                    ok = False
                    break
                vec.append(f)
            if not ok:
                break
            sols.append(vec)
        if not ok:
            continue
        if _check_solutions(rows, rhs_cols, sols):
            return [tuple(s) for s in sols]
    raise LinearSystemError(f"solve not certified within {max_primes} primes")


def _check_solutions(rows, rhs_cols, sols) -> bool:
    m = len(rows)
    for col, x in zip(rhs_cols, sols):
        den = lcm(*[f.denominator for f in x]) if x else 1
        ints = [int(f * den) for f in x]
        b = [0] * m
        for i, a in col:
            b[i] = a * den
        for i, row in enumerate(rows):
            if sum(a * ints[c] for c, a in row) != b[i]:
                return False
    return True


def rref_fraction(mat):
    """Reference RREF over Fraction; returns (rows, pivot_cols). Small inputs only."""
    rows = [list(map(Fraction, r)) for r in mat]
    if not rows:
        return [], []
    n = len(rows[0])
    pivots = []
    r = 0
    for c in range(n):
        if r == len(rows):
            break
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def int_rows_from_fraction_rows(frac_rows):
    """Scale each Fraction row to integers (row scaling preserves the nullspace)."""
    out = []
    for row in frac_rows:
        den = 1
        for _, f in row:
            den = lcm(den, f.denominator)
        out.append([(c, int(f * den)) for c, f in row if f])
    return out
