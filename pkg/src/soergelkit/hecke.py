"""Hecke algebra over Z[v, v^-1] with Kazhdan-Lusztig basis, the Hom pairing,
and parabolic (anti)spherical modules.

Conventions (pinned globally):

* quadratic relation ``H_s^2 = (v^-1 - v) H_s + H_e``;
* canonical basis ``b_s = H_s + v H_e``; in general ``b_w = H_w + sum_{u<w}
  m_{u,w}(v) H_u`` with ``m_{u,w} = v^{l(w)-l(u)} P_{u,w}(v^-2)``;
* ``hom_pairing(x, y) = eps(iota(x) y)`` where ``iota`` is the bar-twisted
  anti-automorphism ``H_w -> H_{w^-1}``, ``v -> v^-1`` and ``eps`` extracts
  the ``H_e`` coefficient.  The power normalization is fixed once by the
  rank-one calibration: paired with Bott-Samelson characters
  ``prod(v * b_s)`` it reproduces the graded right-rank of the bimodule
  engine's Hom spaces on the nose (see tests/test_acceptance.py).
"""

from __future__ import annotations

import json
import os
import threading

from .coxeter import ParabolicSubset, WeylElement, factor_parabolic

__all__ = [
    "LaurentPoly",
    "HeckeAlgebra",
    "HeckeElement",
    "KLTable",
    "ParabolicModule",
    "hom_pairing",
    "bs_character",
]

CONVENTION_VERSION = "soergel-v1"
ENGINE_VERSION = "0.1.0"


class LaurentPoly:
    """Z[v, v^-1] with exact integer coefficients; no stored zeros."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {int(e): int(a) for e, a in (coeffs or {}).items() if a}

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def v(cls, exp=1, coeff=1):
        return cls({exp: coeff})

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.c == other.c
        if other == 0:
            return not self.c
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other):
        c = dict(self.c)
        for e, a in other.c.items():
            c[e] = c.get(e, 0) + a
        return LaurentPoly(c)

    def __sub__(self, other):
        c = dict(self.c)
        for e, a in other.c.items():
            c[e] = c.get(e, 0) - a
        return LaurentPoly(c)

    def __neg__(self):
        return LaurentPoly({e: -a for e, a in self.c.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: a * other for e, a in self.c.items()})
        c = {}
        for e1, a1 in self.c.items():
            for e2, a2 in other.c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + a1 * a2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def bar(self):
        """v -> v^-1."""
        return LaurentPoly({-e: a for e, a in self.c.items()})

    def shift(self, k):
        """Multiply by v^k."""
        return LaurentPoly({e + k: a for e, a in self.c.items()})

    def coeff(self, e):
        return self.c.get(e, 0)

    def exponents(self):
        return sorted(self.c)

    def min_exp(self):
        return min(self.c) if self.c else None

    def evaluate_at_one(self):
        return sum(self.c.values())

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c):
            a = self.c[e]
            if e == 0:
                parts.append(str(a))
            else:
                head = "" if a == 1 else ("-" if a == -1 else str(a) + "*")
                parts.append(f"{head}v^{e}" if e != 1 else f"{head}v")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self):
        return {str(e): a for e, a in sorted(self.c.items())}

    @classmethod
    def from_json(cls, data):
        return cls({int(e): int(a) for e, a in data.items()})


V = LaurentPoly.v


class HeckeElement:
    """Finitely supported combination of basis elements, tagged by basis."""

    __slots__ = ("algebra", "basis", "support")

    def __init__(self, algebra, support, basis="H"):
        self.algebra = algebra
        self.basis = basis
        self.support = {w: f for w, f in support.items() if f}

    def __eq__(self, other):
        return (
            isinstance(other, HeckeElement)
            and self.basis == other.basis
            and self.support == other.support
        )

    def __add__(self, other):
        assert self.basis == other.basis
        s = dict(self.support)
        for w, f in other.support.items():
            s[w] = s.get(w, LaurentPoly.zero()) + f
        return HeckeElement(self.algebra, s, self.basis)

    def __sub__(self, other):
        assert self.basis == other.basis
        s = dict(self.support)
        for w, f in other.support.items():
            s[w] = s.get(w, LaurentPoly.zero()) - f
        return HeckeElement(self.algebra, s, self.basis)

    def scale(self, f: LaurentPoly):
        return HeckeElement(
            self.algebra, {w: g * f for w, g in self.support.items()}, self.basis
        )

    def __mul__(self, other):
        return self.algebra.mult(self, other)

    def coeff(self, w):
        return self.support.get(w, LaurentPoly.zero())

    def terms_sorted(self):
        return sorted(self.support.items(), key=lambda t: (t[0].length, t[0].word))

    def __repr__(self):
        tag = "H" if self.basis == "H" else "b"
        if not self.support:
            return "0"
        return " + ".join(f"({f})*{tag}[{w!r}]" for w, f in self.terms_sorted())


class HeckeAlgebra:
    """Hecke algebra of a Weyl group, standard basis arithmetic."""

    def __init__(self, group):
        self.group = group

    def unit(self):
        return HeckeElement(self, {self.group.identity: LaurentPoly.one()})

    def h(self, w: WeylElement):
        return HeckeElement(self, {w: LaurentPoly.one()})

    def h_word(self, word):
        return self.h(self.group.element_from_word(word))

    def _mult_gen(self, support, i):
        """Right multiplication by H_{s_i} in the standard basis."""
        g = self.group
        s = g.generators[i]
        out = {}
        for w, f in support.items():
            ws = g.multiply(w, s)
            if ws.length > w.length:
                out[ws] = out.get(ws, LaurentPoly.zero()) + f
            else:
                # H_w H_s = (v^-1 - v) H_w + H_{ws}
                out[w] = out.get(w, LaurentPoly.zero()) + f * LaurentPoly({-1: 1, 1: -1})
                out[ws] = out.get(ws, LaurentPoly.zero()) + f
        return {w: f for w, f in out.items() if f}

    def mult(self, a: HeckeElement, b: HeckeElement) -> HeckeElement:
        assert a.basis == "H" and b.basis == "H", "multiply in the standard basis"
        out = {}
        for w, f in b.support.items():
            acc = {u: g * f for u, g in a.support.items()}
            for i in w.word:
                acc = self._mult_gen(acc, i)
            for u, g in acc.items():
                out[u] = out.get(u, LaurentPoly.zero()) + g
        return HeckeElement(self, out)

    def bar_h(self, w: WeylElement):
        """bar(H_w) = (H_{w^-1})^{-1}, expanded along the canonical word."""
        out = self.unit()
        barhs_cache = {}
        for i in w.word:
            bi = barhs_cache.get(i)
            if bi is None:
                bi = HeckeElement(
                    self,
                    {self.group.generators[i]: LaurentPoly.one(),
                     self.group.identity: LaurentPoly({1: 1, -1: -1})},
                )
                barhs_cache[i] = bi
            out = self.mult(out, bi)
        return out

    def bar(self, x: HeckeElement) -> HeckeElement:
        assert x.basis == "H"
        out = HeckeElement(self, {})
        for w, f in x.support.items():
            out = out + self.bar_h(w).scale(f.bar())
        return out

    def iota(self, x: HeckeElement) -> HeckeElement:
        """Bar-twisted anti-automorphism: the bar involution composed with the
        inversion anti-automorphism H_w -> H_{w^-1}; it fixes every b_w."""
        assert x.basis == "H"
        return self.bar(
            HeckeElement(self, {w.inverse(): f for w, f in x.support.items()})
        )

    def epsilon(self, x: HeckeElement) -> LaurentPoly:
        return x.coeff(self.group.identity)


def hom_pairing(x: HeckeElement, y: HeckeElement) -> LaurentPoly:
    """eps(iota(x) * y); with Bott-Samelson characters this equals the graded
    right-rank of the corresponding bimodule Hom space (rank-one calibrated)."""
    alg = x.algebra
    assert alg is y.algebra
    return alg.epsilon(alg.mult(alg.iota(x), y))


def bs_character(algebra: HeckeAlgebra, word, table: "KLTable") -> HeckeElement:
    """prod_i (v * b_{s_i}): the Hecke character of the Bott-Samelson bimodule
    on ``word`` in the engine's normalization (generators in degrees >= 0)."""
    out = algebra.unit()
    for i in word:
        out = algebra.mult(out, table.b_word((i,)).scale(V(1)))
    return out


class KLTable:
    """Cache of canonical-basis coefficients m_{u,w} with JSONL persistence.

    Many concurrent readers are fine once entries exist; writes are guarded by
    a lock.  The cache file is keyed by realization digest and convention
    version; loading validates the header and every record's invariants, and
    recomputation cross-checks cached entries.
    """

    def __init__(self, algebra: HeckeAlgebra, cache_path=None):
        self.algebra = algebra
        self.entries = {}   # (u.word, w.word) -> LaurentPoly, u <= w
        self.computed = set()  # words w whose b_w is complete
        self.dirty = False
        self.provenance = {"convention": CONVENTION_VERSION,
                           "engine": ENGINE_VERSION,
                           "realization": algebra.group.realization.digest()}
        self._lock = threading.Lock()
        self.cache_path = cache_path
        if cache_path and os.path.exists(cache_path):
            self.load(cache_path)

    # -- canonical basis ---------------------------------------------------

    def b(self, w: WeylElement) -> HeckeElement:
        """b_w in the standard basis."""
        self._ensure(w)
        alg = self.algebra
        with self._lock:
            items = [(uw, m) for (uw, ww), m in self.entries.items() if ww == w.word]
        supp = {w: LaurentPoly.one()}
        for uw, m in items:
            supp[alg.group.element_from_word(uw)] = m
        return HeckeElement(alg, supp)

    def b_word(self, word) -> HeckeElement:
        return self.b(self.algebra.group.element_from_word(word))

    def m(self, u: WeylElement, w: WeylElement) -> LaurentPoly:
        """Coefficient of H_u in b_w."""
        self._ensure(w)
        if u == w:
            return LaurentPoly.one()
        return self.entries.get((u.word, w.word), LaurentPoly.zero())

    def mu(self, u: WeylElement, w: WeylElement) -> int:
        return self.m(u, w).coeff(1)

    def kl_poly(self, u: WeylElement, w: WeylElement) -> dict:
        """P_{u,w} as {q-exponent: coefficient}; validates degree bounds."""
        g = self.algebra.group
        if u == w:
            return {0: 1}
        if not g.bruhat_leq(u, w):
            return {}
        m = self.m(u, w)
        ldiff = w.length - u.length
        out = {}
        for e, a in m.c.items():
            k2 = ldiff - e
            if k2 < 0 or k2 % 2:
                raise RuntimeError(f"bad exponent {e} in m_{{{u!r},{w!r}}} = {m}")
            out[k2 // 2] = a
        return out

    def _ensure(self, w: WeylElement):
        if w.word in self.computed:
            return
        with self._lock:
            self._compute(w)

    def _compute(self, w: WeylElement):
        if w.word in self.computed:
            return
        g = self.algebra.group
        alg = self.algebra
        if w.is_identity():
            self.computed.add(w.word)
            return
        s_idx = w.word[-1]
        s = g.generators[s_idx]
        ws = g.multiply(w, s)
        self._compute(ws)
        # candidate = b_{ws} * b_s in the standard basis
        bws = {ws: LaurentPoly.one()}
        for (uw, ww), m in self.entries.items():
            if ww == ws.word:
                bws[g.element_from_word(uw)] = m
        cand = alg.mult(
            HeckeElement(alg, bws),
            HeckeElement(alg, {s: LaurentPoly.one(), g.identity: V(1)}),
        ).support
        # subtract mu(z, ws) b_z over z < ws with zs < z
        for z in sorted(bws, key=lambda e: -e.length):
            if z == ws:
                continue
            mu = self.entries.get((z.word, ws.word), LaurentPoly.zero()).coeff(1)
            if mu == 0:
                continue
            zs = g.multiply(z, s)
            if zs.length > z.length:
                continue
            self._compute(z)
            cand[z] = cand.get(z, LaurentPoly.zero()) - LaurentPoly({0: mu})
            for (uw, zw), mz in list(self.entries.items()):
                if zw == z.word:
                    u = g.element_from_word(uw)
                    cand[u] = cand.get(u, LaurentPoly.zero()) - mz * mu
        cand = {u: f for u, f in cand.items() if f}
        assert cand.pop(w) == LaurentPoly.one()
        for u, f in cand.items():
            self._validate_entry(u, w, f)
            key = (u.word, w.word)
            if key in self.entries and self.entries[key] != f:
                raise RuntimeError(f"cache mismatch at {key}: {self.entries[key]} vs {f}")
            self.entries[key] = f
        self.computed.add(w.word)
        self.dirty = True

    def _validate_entry(self, u, w, f):
        ldiff = w.length - u.length
        for e, a in f.c.items():
            if e < 1 or (ldiff - e) % 2 or ldiff - e < 0:
                raise RuntimeError(f"KL degree bound violated at ({u!r},{w!r}): {f}")
            if a < 0:
                raise RuntimeError(f"negative KL coefficient at ({u!r},{w!r}): {f}")

    # -- persistence ---------------------------------------------------------

    def save(self, path=None):
        path = path or self.cache_path
        if path is None:
            raise ValueError("no cache path configured")
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with self._lock, open(path, "w") as fh:
            fh.write(json.dumps({"header": self.provenance}) + "\n")
            for (uw, ww) in sorted(self.entries, key=lambda k: (len(k[1]), k[1], k[0])):
                rec = {"u": list(uw), "w": list(ww),
                       "m": self.entries[(uw, ww)].to_json()}
                fh.write(json.dumps(rec) + "\n")
            for ww in sorted(self.computed, key=lambda k: (len(k), k)):
                fh.write(json.dumps({"complete": list(ww)}) + "\n")
        self.dirty = False

    def load(self, path):
        g = self.algebra.group
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("header") != self.provenance:
                raise RuntimeError(
                    f"cache {path} was written under a different realization/convention"
                )
            for line in fh:
                rec = json.loads(line)
                if "complete" in rec:
                    self.computed.add(tuple(rec["complete"]))
                    continue
                u = g.element_from_word(rec["u"])
                w = g.element_from_word(rec["w"])
                f = LaurentPoly.from_json(rec["m"])
                self._validate_entry(u, w, f)
                self.entries[(u.word, w.word)] = f


class ParabolicModule:
    """Right Hecke module on minimal coset representatives of W_Theta \\ W.

    flavor 'spherical': generators of Theta act by v^{-1} on the unit;
    flavor 'antispherical': by -v (so b_s acts by zero for s in Theta).
    """

    def __init__(self, algebra: HeckeAlgebra, theta: ParabolicSubset, flavor):
        if flavor not in ("spherical", "antispherical"):
            raise ValueError("flavor must be 'spherical' or 'antispherical'")
        self.algebra = algebra
        self.theta = theta
        self.flavor = flavor
        self.eigen = V(-1) if flavor == "spherical" else V(1, -1)
        self._n_cache = {}

    def is_minimal(self, w):
        g = self.algebra.group
        return not any(g.has_left_descent(w, i) for i in self.theta.generators)

    def unit(self):
        return {self.algebra.group.identity: LaurentPoly.one()}

    def act_gen(self, supp, i):
        g = self.algebra.group
        s = g.generators[i]
        out = {}
        def add(w, f):
            if f:
                out[w] = out.get(w, LaurentPoly.zero()) + f
        for x, f in supp.items():
            xs = g.multiply(x, s)
            if xs.length > x.length:
                if self.is_minimal(xs):
                    add(xs, f)
                else:
                    add(x, f * self.eigen)
            else:
                add(xs, f)
                add(x, f * LaurentPoly({-1: 1, 1: -1}))
        return {w: f for w, f in out.items() if f}

    def act(self, supp, h: HeckeElement):
        assert h.basis == "H"
        out = {}
        for w, f in h.support.items():
            acc = {x: g * f for x, g in supp.items()}
            for i in w.word:
                acc = self.act_gen(acc, i)
            for x, g in acc.items():
                out[x] = out.get(x, LaurentPoly.zero()) + g
        return {x: f for x, f in out.items() if f}

    def project(self, h: HeckeElement):
        """Image of a Hecke element under H -> module, H_u -> c^{l(t)} N_x
        for u = t x with t in W_Theta and x minimal."""
        out = {}
        for u, f in h.support.items():
            t, x = factor_parabolic(u, self.theta)
            c = f
            for _ in range(t.length):
                c = c * self.eigen
            if c:
                out[x] = out.get(x, LaurentPoly.zero()) + c
        return {x: f for x, f in out.items() if f}

    def bar(self, supp):
        out = {}
        for x, f in supp.items():
            barx = self.project(self.algebra.bar_h(x))
            for y, g in barx.items():
                out[y] = out.get(y, LaurentPoly.zero()) + f.bar() * g
        return {x: f for x, f in out.items() if f}

    def n_basis(self, w):
        """Parabolic KL basis element n_w as a dict over minimal reps."""
        if not self.is_minimal(w):
            raise ValueError(f"{w!r} is not a minimal coset representative")
        cached = self._n_cache.get(w.word)
        if cached is not None:
            return dict(cached)
        g = self.algebra.group
        if w.is_identity():
            res = self.unit()
        else:
            i = w.word[-1]
            ws = g.multiply(w, g.generators[i])
            cand = self.act(
                self.n_basis(ws),
                HeckeElement(self.algebra,
                             {g.generators[i]: LaurentPoly.one(), g.identity: V(1)}),
            )
            for z in sorted(cand, key=lambda e: -e.length):
                if z == w:
                    continue
                cz = cand.get(z, LaurentPoly.zero())
                bad = {e: a for e, a in cz.c.items() if e <= 0}
                if not bad:
                    continue
                corr = LaurentPoly(
                    {0: bad.get(0, 0)}
                ) + LaurentPoly({e: a for e, a in bad.items() if e < 0}) + LaurentPoly(
                    {-e: a for e, a in bad.items() if e < 0}
                )
                nz = self.n_basis(z)
                for y, gy in nz.items():
                    cand[y] = cand.get(y, LaurentPoly.zero()) - corr * gy
            res = {x: f for x, f in cand.items() if f}
        assert res.get(w) == LaurentPoly.one()
        self._n_cache[w.word] = dict(res)
        return res

    def parabolic_kl(self, ubar, wbar) -> dict:
        """Parabolic KL polynomial as {q-exponent: coefficient}."""
        if not self.is_minimal(ubar):
            raise ValueError("ubar must be a minimal representative")
        n = self.n_basis(wbar)
        m = n.get(ubar, LaurentPoly.zero())
        if ubar == wbar:
            return {0: 1}
        ldiff = wbar.length - ubar.length
        out = {}
        for e, a in m.c.items():
            k2 = ldiff - e
            if k2 < 0 or k2 % 2:
                raise RuntimeError(f"parabolic KL parity violated: {m}")
            out[k2 // 2] = a
        return out

    def in_n_basis(self, supp):
        """Express a module element in the n-basis by triangular elimination."""
        rest = dict(supp)
        out = {}
        while rest:
            z = max(rest, key=lambda e: (e.length, e.word))
            c = rest.pop(z)
            if not c:
                continue
            out[z] = c
            for y, gy in self.n_basis(z).items():
                if y == z:
                    continue
                rest[y] = rest.get(y, LaurentPoly.zero()) - c * gy
            rest = {y: f for y, f in rest.items() if f}
        return out
