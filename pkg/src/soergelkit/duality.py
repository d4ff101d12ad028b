"""Bigraded dimension tables, the regrading exchange, and the end-to-end
equivariant-monodromic comparison.

A table records multiplicities at (cohomological degree, Frobenius weight).
Frobenius is modeled purely by integer weights: every object in scope is a
direct sum of weight-semisimple pieces, and a weight-degree lock violation on
the equivariant side aborts the comparison.

The regrading functor moves a piece at (d, w) to (d - w, -w); as a map on
support points it is an involution.  The Tate twist by one half-step lowers
the weight by 1, a homological shift by n lowers the degree by n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bimod import bott_samelson, hom_graded
from .coxeter import Realization

__all__ = [
    "BigradedDim",
    "regrade",
    "regrade_inverse",
    "shift",
    "twist",
    "convolve",
    "baby_case_roundtrip",
    "em_check",
    "EMReport",
]


class BigradedDim:
    """Finite multiplicity table over (degree, weight) with values >= 0."""

    __slots__ = ("dims",)

    def __init__(self, dims=None):
        self.dims = {}
        for (d, w), m in (dims or {}).items():
            m = int(m)
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m:
                self.dims[(int(d), int(w))] = m

    @classmethod
    def singleton(cls, d, w, mult=1):
        return cls({(d, w): mult})

    def __eq__(self, other):
        return isinstance(other, BigradedDim) and self.dims == other.dims

    def __bool__(self):
        return bool(self.dims)

    def __add__(self, other):
        out = dict(self.dims)
        for k, m in other.dims.items():
            out[k] = out.get(k, 0) + m
        return BigradedDim(out)

    def items_sorted(self):
        return sorted(self.dims.items())

    def map_support(self, fn):
        out = {}
        for (d, w), m in self.dims.items():
            key = fn(d, w)
            out[key] = out.get(key, 0) + m
        return BigradedDim(out)

    def total(self):
        return sum(self.dims.values())

    def __repr__(self):
        return f"BigradedDim({dict(self.items_sorted())})"


def regrade(m: BigradedDim) -> BigradedDim:
    """(d, w) -> (d - w, -w)."""
    return m.map_support(lambda d, w: (d - w, -w))


def regrade_inverse(m: BigradedDim) -> BigradedDim:
    # the same exchange; it is an involution on support points
    return regrade(m)


def shift(m: BigradedDim, n: int) -> BigradedDim:
    """Homological [n]: (d, w) -> (d - n, w)."""
    return m.map_support(lambda d, w: (d - n, w))


def twist(m: BigradedDim, k_doubled: int) -> BigradedDim:
    """Tate twist by k_doubled half-steps: (d, w) -> (d, w - k_doubled)."""
    return m.map_support(lambda d, w: (d, w - k_doubled))


def convolve(a: BigradedDim, b: BigradedDim) -> BigradedDim:
    """Pointwise-additive product of tables (degrees and weights add)."""
    out = {}
    for (d1, w1), m1 in a.dims.items():
        for (d2, w2), m2 in b.dims.items():
            key = (d1 + d2, w1 + w2)
            out[key] = out.get(key, 0) + m1 * m2
    return BigradedDim(out)


def convolve_degree_zero(a: BigradedDim, b: BigradedDim) -> BigradedDim:
    """Weights add at degree zero (the regraded image of a pure product)."""
    out = {}
    for (d1, w1), m1 in a.dims.items():
        for (d2, w2), m2 in b.dims.items():
            key = (0, w1 + w2)
            out[key] = out.get(key, 0) + m1 * m2
    return BigradedDim(out)


def baby_case_roundtrip(m: BigradedDim) -> BigradedDim:
    """Regrade a table of a finite complex of graded modules over a degree-2
    polynomial generator; check the image lands where a power-series-side
    module complex lives (weights bounded above in each degree) and that the
    inverse exchange applied twice is the identity."""
    image = regrade(m)
    perdeg = {}
    for (d, w), mult in image.dims.items():
        perdeg.setdefault(d, []).append(w)
    for d, ws in perdeg.items():
        assert max(ws) < float("inf")  # finite support: weights bounded above per degree
    assert regrade_inverse(regrade_inverse(m)) == m
    return image


@dataclass
class PairResult:
    x_word: tuple
    y_word: tuple
    passed: bool
    equivariant: BigradedDim
    regraded: BigradedDim
    monodromic: BigradedDim
    first_discrepancy: tuple | None


@dataclass
class EMReport:
    realization_digest: str
    symmetrizable_self: bool
    results: list

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]


def reduced_words(group, max_length):
    """All reduced words of length <= max_length, ShortLex order."""
    out = [()]
    frontier = [((), group.identity)]
    for _ in range(max_length):
        nxt = []
        for word, el in frontier:
            for i in range(group.n):
                if not group.has_right_descent(el, i):
                    nxt.append((word + (i,), group.multiply(el, group.generators[i])))
        frontier = nxt
        out.extend(w for w, _ in nxt)
    return out


def equivariant_table(real: Realization, x_word, y_word, degree_bound=None):
    """Bigraded table of Hom between equivariant Bott-Samelson bimodules;
    generators in degree d carry weight d (weight-degree lock, asserted)."""
    hom = hom_graded(bott_samelson(real, x_word, "equivariant"),
                     bott_samelson(real, y_word, "equivariant"),
                     degree_bound=degree_bound)
    if hom.generators is None:
        from .bimod import DegreeBoundExceeded
        raise DegreeBoundExceeded("degree bound too small for a complete table")
    table = {}
    for d, w in hom.generators:
        if w != d:
            raise AssertionError(
                f"weight-degree lock violated on the equivariant side: ({d}, {w})"
            )
        table[(d, w)] = table.get((d, w), 0) + 1
    return BigradedDim(table)


def monodromic_table(real_m: Realization, x_word, y_word, degree_bound=None):
    """Bigraded table of Hom between monodromic Bott-Samelson bimodules; Hom
    lives in cohomological degree 0 with weights <= 0."""
    hom = hom_graded(bott_samelson(real_m, x_word, "monodromic"),
                     bott_samelson(real_m, y_word, "monodromic"),
                     degree_bound=degree_bound)
    if hom.generators is None:
        from .bimod import DegreeBoundExceeded
        raise DegreeBoundExceeded("degree bound too small for a complete table")
    table = {}
    for d, w in hom.generators:
        if w != -d:
            raise AssertionError(
                f"weight lock violated on the monodromic side: ({d}, {w})"
            )
        table[(0, w)] = table.get((0, w), 0) + 1
    return BigradedDim(table)


def em_check(real: Realization, max_length=2, word_pairs=None,
             symmetrizable_self=False, degree_bound=None) -> EMReport:
    """Compare the regraded equivariant Hom tables with the monodromic ones.

    The monodromic side is built on the transpose-dual realization, or on the
    same realization when ``symmetrizable_self`` is set (valid for
    symmetrizable types, where both give the same answers).
    """
    from .bimod import _group_of

    if symmetrizable_self and not real.cartan.is_symmetrizable():
        raise ValueError("symmetrizable_self requires a symmetrizable GCM")
    real_m = real if symmetrizable_self else real.dual()
    group = _group_of(real)
    if word_pairs is None:
        words = reduced_words(group, max_length)
        word_pairs = [(x, y) for x in words for y in words]
    results = []
    for x, y in word_pairs:
        e_table = equivariant_table(real, x, y, degree_bound)
        m_table = monodromic_table(real_m, x, y, degree_bound)
        r_table = regrade(e_table)
        ok = r_table == m_table
        first = None
        if not ok:
            all_keys = sorted(set(r_table.dims) | set(m_table.dims))
            for key in all_keys:
                if r_table.dims.get(key, 0) != m_table.dims.get(key, 0):
                    first = (key, r_table.dims.get(key, 0), m_table.dims.get(key, 0))
                    break
        results.append(PairResult(x, y, ok, e_table, r_table, m_table, first))
    return EMReport(real.digest(), symmetrizable_self, results)
