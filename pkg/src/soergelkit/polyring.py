"""Graded polynomial ring Sym of the covector space of a realization, with
Weyl-group action, Demazure operators and invariant splitting.

Generators sit in grading degree 2 (monomial degree 1).  Coefficients are
exact rationals throughout; monomials are ordered graded-lexicographically so
serialized polynomials are canonical.

The ring is built on the *effective* covector coordinates: the W-invariant
covector directions act identically through the left and the right module
structure of every bimodule in this package, so they are bookkept by Hilbert
series convolution rather than carried through the linear algebra.  For the
finite types in the test corpus the invariant subspace is zero and the ring
is the full Sym.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

__all__ = ["DivisionFailure", "GradedPoly", "PolyRing"]


class DivisionFailure(ArithmeticError):
    """Exact division by a linear form failed; signals a broken realization."""


class GradedPoly:
    """Polynomial with Fraction coefficients, keyed by exponent tuples."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, GradedPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, Fraction(0)) + c
        return GradedPoly(self.ring, t)

    def __sub__(self, other):
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, Fraction(0)) - c
        return GradedPoly(self.ring, t)

    def __neg__(self):
        return GradedPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedPoly):
            t = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    t[m] = t.get(m, Fraction(0)) + c1 * c2
            return GradedPoly(self.ring, t)
        c = Fraction(other)
        return GradedPoly(self.ring, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def scale(self, c):
        c = Fraction(c)
        return GradedPoly(self.ring, {m: v * c for m, v in self.terms.items()})

    def monomial_degree(self):
        """Total monomial degree; requires homogeneity. Zero yields -1."""
        degs = {sum(m) for m in self.terms}
        if not degs:
            return -1
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def grading_degree(self):
        d = self.monomial_degree()
        return None if d < 0 else 2 * d

    def homogeneous_component(self, monomial_degree):
        return GradedPoly(
            self.ring,
            {m: c for m, c in self.terms.items() if sum(m) == monomial_degree},
        )

    def constant(self):
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def evaluate(self, point):
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for e, x in zip(m, point):
                if e:
                    v *= Fraction(x) ** e
            total += v
        return total

    def canonical_str(self):
        if not self.terms:
            return "0"
        def key(m):
            return (sum(m), tuple(-e for e in m))
        parts = []
        for m in sorted(self.terms, key=key):
            c = self.terms[m]
            mono = "*".join(
                f"x{k}" + (f"^{e}" if e > 1 else "")
                for k, e in enumerate(m) if e
            )
            if mono:
                parts.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                parts.append(str(c))
        return " + ".join(parts)

    def __repr__(self):
        return f"GradedPoly({self.canonical_str()})"

    @classmethod
    def parse(cls, ring, text):
        """Inverse of canonical_str (fixture ingestion)."""
        text = text.strip()
        if text == "0":
            return ring.zero()
        terms = {}
        for part in text.split(" + "):
            coeff = Fraction(1)
            mono = [0] * ring.nvars
            for factor in part.split("*"):
                factor = factor.strip()
                if factor.startswith("x"):
                    if "^" in factor:
                        var, exp = factor[1:].split("^")
                        mono[int(var)] += int(exp)
                    else:
                        mono[int(factor[1:])] += 1
                else:
                    coeff *= Fraction(factor)
            key = tuple(mono)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return cls(ring, terms)


class PolyRing:
    """Sym of the covector space of ``realization`` (effective coordinates)."""

    _cache = {}

    def __new__(cls, realization):
        key = realization.digest()
        ring = cls._cache.get(key)
        if ring is None:
            ring = super().__new__(cls)
            ring._init(realization)
            cls._cache[key] = ring
        return ring

    def _init(self, realization):
        self.realization = realization
        self.nvars = realization.n_effective
        self.full_nvars = realization.dim_h
        self.n_invariant = realization.n_invariant
        self._zero_mono = (0,) * self.nvars
        self._element_matrices = {}
        self._alphas = tuple(
            self.linear_from_covector(realization.roots[i])
            for i in range(realization.cartan.rank)
        )
        self._coroot_pairings = tuple(
            tuple(Fraction(x) for x in realization.coroots[i])
            for i in range(realization.cartan.rank)
        )

    def digest(self):
        return self.realization.digest()

    def zero(self):
        return GradedPoly(self, {})

    def one(self):
        return GradedPoly(self, {self._zero_mono: Fraction(1)})

    def constant(self, c):
        c = Fraction(c)
        return GradedPoly(self, {self._zero_mono: c} if c else {})

    def variable(self, k):
        m = [0] * self.nvars
        m[k] = 1
        return GradedPoly(self, {tuple(m): Fraction(1)})

    def variables(self):
        return [self.variable(k) for k in range(self.nvars)]

    def linear_from_effective(self, eff_coords):
        t = {}
        for k, c in enumerate(eff_coords):
            c = Fraction(c)
            if c:
                m = [0] * self.nvars
                m[k] = 1
                t[tuple(m)] = c
        return GradedPoly(self, t)

    def linear_from_covector(self, cov):
        return self.linear_from_effective(self.realization.covector_to_effective(cov))

    def alpha(self, i):
        """Simple root as a linear form (grading degree 2)."""
        return self._alphas[i]

    def alpha_half(self, i):
        return self._alphas[i].scale(Fraction(1, 2))

    def monomial_count(self, monomial_degree):
        if monomial_degree < 0:
            return 0
        if self.nvars == 0:
            return 1 if monomial_degree == 0 else 0
        return comb(monomial_degree + self.nvars - 1, self.nvars - 1)

    def full_monomial_count(self, monomial_degree):
        if monomial_degree < 0:
            return 0
        if self.full_nvars == 0:
            return 1 if monomial_degree == 0 else 0
        return comb(monomial_degree + self.full_nvars - 1, self.full_nvars - 1)

    def monomials(self, monomial_degree):
        """All exponent tuples of the given total degree, lex order."""
        out = []
        def rec(prefix, remaining, slots):
            if slots == 1:
                out.append(tuple(prefix + [remaining]))
                return
            for e in range(remaining, -1, -1):
                rec(prefix + [e], remaining - e, slots - 1)
        if self.nvars == 0:
            return [()] if monomial_degree == 0 else []
        rec([], monomial_degree, self.nvars)
        return out

    # -- Weyl group action ------------------------------------------------

    def element_matrix(self, w):
        """Matrix of w on effective covector coordinates (columns = images).

        Elements of the Weyl group of a different realization of the same rank
        are translated through their word (the groups are canonically
        identified generator by generator).
        """
        mat = self._element_matrices.get(w.word)
        if mat is None:
            real = self.realization
            if w.group.realization.digest() != real.digest():
                w = self.realization_group().element_from_word(w.word)
            cols = []
            for k in range(self.nvars):
                rep = real.effective_representative(
                    [1 if t == k else 0 for t in range(self.nvars)]
                )
                cols.append(real.covector_to_effective(w.apply_covector(rep)))
            mat = tuple(tuple(cols[k][l] for k in range(self.nvars))
                        for l in range(self.nvars))
            self._element_matrices[w.word] = mat
        return mat

    def act(self, w, f: GradedPoly) -> GradedPoly:
        """Degree-preserving ring automorphism induced by w."""
        if not f.terms:
            return f
        mat = self.element_matrix(w)
        images = [
            GradedPoly(self, {
                tuple(1 if t == l else 0 for t in range(self.nvars)): mat[l][k]
                for l in range(self.nvars) if mat[l][k]
            })
            for k in range(self.nvars)
        ]
        total = self.zero()
        for m, c in f.terms.items():
            term = self.constant(c)
            for k, e in enumerate(m):
                for _ in range(e):
                    term = term * images[k]
            total = total + term
        return total

    def reflect(self, i, f):
        return self.act(self.realization_group().generators[i], f)

    def realization_group(self):
        if not hasattr(self, "_group"):
            from .coxeter import WeylGroup
            self._group = WeylGroup(self.realization)
        return self._group

    def demazure(self, i, f: GradedPoly) -> GradedPoly:
        """(f - s_i f) / alpha_i, exact; drops grading degree by 2."""
        diff = f - self.reflect(i, f)
        return self.divide_linear(diff, self.alpha(i))

    def split_invariant(self, i, f: GradedPoly):
        """f = p + (alpha_i/2) q with p, q both s_i-invariant."""
        p = (f + self.reflect(i, f)).scale(Fraction(1, 2))
        q = self.demazure(i, f)
        return p, q

    def divide_linear(self, f: GradedPoly, ell: GradedPoly) -> GradedPoly:
        """Exact division by a homogeneous linear form."""
        lin = {m: c for m, c in ell.terms.items() if c}
        if not lin or any(sum(m) != 1 for m in lin):
            raise DivisionFailure("divisor must be a nonzero linear form")
        k0 = max(range(self.nvars),
                 key=lambda k: abs(lin.get(tuple(1 if t == k else 0 for t in range(self.nvars)),
                                           Fraction(0))))
        key0 = tuple(1 if t == k0 else 0 for t in range(self.nvars))
        c0 = lin.get(key0, Fraction(0))
        if not c0:
            k0 = next(k for m in lin for k, e in enumerate(m) if e)
            key0 = tuple(1 if t == k0 else 0 for t in range(self.nvars))
            c0 = lin[key0]
        rem = dict(f.terms)
        quo = {}
        while True:
            cand = [m for m in rem if m[k0] > 0 and rem[m]]
            if not cand:
                break
            m = max(cand, key=lambda m: (m[k0], m))
            coeff = rem[m] / c0
            t = tuple(e - (1 if k == k0 else 0) for k, e in enumerate(m))
            quo[t] = quo.get(t, Fraction(0)) + coeff
            for lm, lc in lin.items():
                mm = tuple(a + b for a, b in zip(t, lm))
                rem[mm] = rem.get(mm, Fraction(0)) - coeff * lc
        if any(c for c in rem.values()):
            raise DivisionFailure("linear form does not divide the polynomial")
        return GradedPoly(self, quo)
