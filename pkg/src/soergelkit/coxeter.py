"""Coxeter/Weyl group arithmetic from a generalized Cartan matrix.

Elements are stored by canonical (ShortLex-least) reduced word, computed
greedily by peeling the smallest left descent; the integer matrix of the
element acting on the realization space is cached and used as a fast
pre-filter for equality and for descent tests.  No global element table is
built, so infinite (affine) groups work; every enumeration takes an explicit
length bound.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from ._linalg import rref_fraction

__all__ = [
    "InvalidCartanMatrix",
    "NotFiniteType",
    "GeneralizedCartanMatrix",
    "Realization",
    "WeylGroup",
    "WeylElement",
    "ParabolicSubset",
    "weyl_group",
    "coset_representatives",
    "longest_element",
    "factor_parabolic",
    "load_realization",
]


class InvalidCartanMatrix(ValueError):
    pass


class NotFiniteType(ValueError):
    pass


def _mat_mul(a, b):
    n = len(a)
    m = len(b[0])
    k = len(b)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)) for i in range(n)
    )


def _mat_id(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


class GeneralizedCartanMatrix:
    """Integer matrix with 2s on the diagonal and nonpositive off-diagonal
    entries, vanishing symmetrically."""

    def __init__(self, entries):
        entries = tuple(tuple(int(x) for x in row) for row in entries)
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise InvalidCartanMatrix("cartan matrix must be square and nonempty")
        for i in range(n):
            if entries[i][i] != 2:
                raise InvalidCartanMatrix(f"diagonal entry a[{i}][{i}] must be 2")
            for j in range(n):
                if i != j:
                    if entries[i][j] > 0:
                        raise InvalidCartanMatrix("off-diagonal entries must be <= 0")
                    if (entries[i][j] == 0) != (entries[j][i] == 0):
                        raise InvalidCartanMatrix("a[i][j] = 0 iff a[j][i] = 0 violated")
        self.entries = entries
        self.rank = n

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        return isinstance(other, GeneralizedCartanMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"GeneralizedCartanMatrix({[list(r) for r in self.entries]})"

    def transpose(self):
        n = self.rank
        return GeneralizedCartanMatrix(
            tuple(tuple(self.entries[j][i] for j in range(n)) for i in range(n))
        )

    def digest(self) -> str:
        return hashlib.sha256(repr(self.entries).encode()).hexdigest()[:16]

    def submatrix(self, indices):
        idx = sorted(indices)
        return GeneralizedCartanMatrix(
            tuple(tuple(self.entries[i][j] for j in idx) for i in idx)
        )

    def symmetrizer(self):
        """Positive rationals d with d_i a_ij = d_j a_ji, or None."""
        n = self.rank
        d = [None] * n
        for start in range(n):
            if d[start] is not None:
                continue
            d[start] = Fraction(1)
            stack = [start]
            while stack:
                i = stack.pop()
                for j in range(n):
                    if self.entries[i][j] != 0 and i != j:
                        val = d[i] * self.entries[i][j] / self.entries[j][i]
                        if d[j] is None:
                            d[j] = val
                            stack.append(j)
                        elif d[j] != val:
                            return None
        return d

    def is_symmetrizable(self) -> bool:
        return self.symmetrizer() is not None

    def is_finite_type(self) -> bool:
        """Positive-definite symmetrization test (exact leading minors)."""
        d = self.symmetrizer()
        if d is None:
            return False
        n = self.rank
        sym = [[d[i] * self.entries[i][j] for j in range(n)] for i in range(n)]
        # Leading principal minors by fraction-free expansion on small sizes.
        for k in range(1, n + 1):
            if _det([row[:k] for row in sym[:k]]) <= 0:
                return False
        return True


def _det(mat):
    n = len(mat)
    m = [list(map(Fraction, row)) for row in mat]
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                for j in range(c, n):
                    m[i][j] -= f * m[c][j]
    return det


class Realization:
    """Integer realization of a GCM: simple roots as covectors, simple
    coroots as vectors, in a space of dimension >= rank."""

    def __init__(self, cartan: GeneralizedCartanMatrix, dim_h: int, roots, coroots):
        self.cartan = cartan
        self.dim_h = int(dim_h)
        self.roots = tuple(tuple(int(x) for x in r) for r in roots)
        self.coroots = tuple(tuple(int(x) for x in r) for r in coroots)
        n = cartan.rank
        if len(self.roots) != n or len(self.coroots) != n:
            raise InvalidCartanMatrix("need one root and one coroot per generator")
        if self.dim_h < n:
            raise InvalidCartanMatrix("dim_h must be at least the rank")
        if any(len(r) != self.dim_h for r in self.roots + self.coroots):
            raise InvalidCartanMatrix("root/coroot coordinate length must equal dim_h")
        for i in range(n):
            for j in range(n):
                pair = sum(self.roots[j][k] * self.coroots[i][k] for k in range(self.dim_h))
                if pair != cartan[i, j]:
                    raise InvalidCartanMatrix(
                        f"<coroot_{i}, root_{j}> = {pair} != a[{i}][{j}] = {cartan[i, j]}"
                    )
        if _rank_of(self.roots) != n or _rank_of(self.coroots) != n:
            raise InvalidCartanMatrix("simple roots and coroots must be independent")
        self._init_derived()

    @classmethod
    def minimal(cls, cartan: GeneralizedCartanMatrix):
        """Minimal realization: dim_h = rank + corank, coroots the first
        coordinate vectors, roots the GCM columns padded to independence."""
        n = cartan.rank
        rows, pivots = rref_fraction([list(map(Fraction, r)) for r in cartan.entries])
        corank = n - len(pivots)
        dim = n + corank
        nonpivots = [j for j in range(n) if j not in pivots]
        coroots = [[1 if k == i else 0 for k in range(dim)] for i in range(n)]
        roots = []
        for j in range(n):
            extra = [1 if (j in nonpivots and n + nonpivots.index(j) == k) else 0
                     for k in range(n, dim)]
            roots.append([cartan[i, j] for i in range(n)] + extra)
        return cls(cartan, dim, roots, coroots)

    def dual(self) -> "Realization":
        """Swap roots and coroots; the GCM transposes."""
        if not hasattr(self, "_dual"):
            self._dual = Realization(
                self.cartan.transpose(), self.dim_h, self.coroots, self.roots
            )
        return self._dual

    def digest(self) -> str:
        key = repr((self.cartan.entries, self.dim_h, self.roots, self.coroots))
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def _init_derived(self):
        n = self.cartan.rank
        d = self.dim_h
        # reflection matrices on V (columns convention: v' = M v)
        self.vector_reflections = []
        self.covector_reflections = []
        for i in range(n):
            mv = [[(1 if k == l else 0) - self.coroots[i][k] * self.roots[i][l]
                   for l in range(d)] for k in range(d)]
            mc = [[(1 if k == l else 0) - self.roots[i][k] * self.coroots[i][l]
                   for l in range(d)] for k in range(d)]
            self.vector_reflections.append(tuple(tuple(r) for r in mv))
            self.covector_reflections.append(tuple(tuple(r) for r in mc))
        # left inverse of the root matrix (columns = roots), for expressing
        # real roots in the simple-root basis
        self._root_solver = _left_inverse([[Fraction(r[k]) for r in self.roots]
                                           for k in range(d)])
        # W-invariant covectors: lambda with lambda(coroot_i) = 0 for all i
        inv_rows, inv_pivots = rref_fraction(
            [[Fraction(self.coroots[i][k]) for k in range(d)] for i in range(n)]
        )
        inv_basis = []
        pivset = set(inv_pivots)
        freecols = [c for c in range(d) if c not in pivset]
        for fc in freecols:
            v = [Fraction(0)] * d
            v[fc] = Fraction(1)
            for r, pc in enumerate(inv_pivots):
                v[pc] = -inv_rows[r][fc]
            inv_basis.append(tuple(v))
        self.invariant_covectors = tuple(inv_basis)
        # quotient of the covector space by the invariants: coordinates kept
        # at the non-pivot positions of the invariant basis
        red_rows, red_pivots = rref_fraction([list(v) for v in inv_basis]) if inv_basis else ([], [])
        self._inv_rref = red_rows
        self._inv_pivots = list(red_pivots)
        self.effective_coords = [c for c in range(d) if c not in set(red_pivots)]
        self.n_effective = len(self.effective_coords)
        self.n_invariant = d - self.n_effective

    def covector_to_effective(self, cov):
        """Coordinates of a covector in the covector space modulo invariants."""
        v = [Fraction(x) for x in cov]
        for r, pc in enumerate(self._inv_pivots):
            if v[pc]:
                f = v[pc]
                for c in range(self.dim_h):
                    v[c] -= f * self._inv_rref[r][c]
        return tuple(v[c] for c in self.effective_coords)

    def effective_representative(self, eff):
        """A covector representing the given effective coordinates."""
        v = [Fraction(0)] * self.dim_h
        for k, c in enumerate(self.effective_coords):
            v[c] = Fraction(eff[k])
        return tuple(v)

    def root_coordinates(self, cov):
        """Coordinates of a covector in the simple-root basis, or None."""
        coeffs = [sum(self._root_solver[i][k] * Fraction(cov[k]) for k in range(self.dim_h))
                  for i in range(self.cartan.rank)]
        for k in range(self.dim_h):
            if sum(coeffs[i] * self.roots[i][k] for i in range(self.cartan.rank)) != cov[k]:
                return None
        return coeffs


def _rank_of(vectors):
    _, pivots = rref_fraction([list(map(Fraction, v)) for v in vectors])
    return len(pivots)


def _left_inverse(columns_matrix):
    """Left inverse of a full-column-rank matrix given as list of rows."""
    rows = columns_matrix
    m = len(rows)
    n = len(rows[0])
    aug = [list(rows[i]) + [Fraction(1 if i == j else 0) for j in range(m)] for i in range(m)]
    red, pivots = rref_fraction(aug)
    if list(pivots[:n]) != list(range(n)):
        raise InvalidCartanMatrix("roots are not linearly independent")
    return [[red[i][n + j] for j in range(m)] for i in range(n)]


class WeylElement:
    """Group element as canonical reduced word with cached action matrices."""

    __slots__ = ("group", "word", "mat", "imat", "_hash")

    def __init__(self, group, word, mat, imat):
        self.group = group
        self.word = word
        self.mat = mat
        self.imat = imat
        self._hash = hash(word)

    @property
    def length(self):
        return len(self.word)

    def is_identity(self):
        return not self.word

    def __mul__(self, other):
        return self.group.multiply(self, other)

    def inverse(self):
        return self.group.element_from_matrices(self.imat, self.mat)

    def __eq__(self, other):
        return (
            isinstance(other, WeylElement)
            and self.group is other.group
            and self.word == other.word
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.word:
            return "e"
        return "*".join(f"s{i}" for i in self.word)

    def apply_covector(self, cov):
        """w . lambda, coordinates of the covector image."""
        m = self.imat  # (w.lambda)(v) = lambda(w^{-1} v)
        d = self.group.realization.dim_h
        return tuple(sum(cov[k] * m[k][l] for k in range(d)) for l in range(d))

    def apply_vector(self, vec):
        d = self.group.realization.dim_h
        m = self.mat
        return tuple(sum(m[k][l] * vec[l] for l in range(d)) for k in range(d))


class WeylGroup:
    """Handle with cached simple-reflection matrices and interned elements."""

    def __init__(self, realization: Realization):
        self.realization = realization
        self.n = realization.cartan.rank
        d = realization.dim_h
        self._elements = {}
        self.identity = self._intern((), _mat_id(d), _mat_id(d))
        self.generators = tuple(
            self._intern(
                (i,), realization.vector_reflections[i], realization.vector_reflections[i]
            )
            for i in range(self.n)
        )
        self._bruhat_memo = {}

    def _intern(self, word, mat, imat):
        el = self._elements.get(word)
        if el is None:
            el = WeylElement(self, word, mat, imat)
            self._elements[word] = el
        return el

    def generator(self, i):
        return self.generators[i]

    def _is_negative_root(self, cov):
        coeffs = self.realization.root_coordinates(cov)
        if coeffs is None:
            raise RuntimeError("covector is not in the root lattice")
        if all(c <= 0 for c in coeffs):
            return True
        if all(c >= 0 for c in coeffs):
            return False
        raise RuntimeError("covector is not a real root")

    def _left_descent_mats(self, mat, i):
        """True iff s_i reduces the element with action matrix ``mat``."""
        alpha = self.realization.roots[i]
        d = self.realization.dim_h
        img = tuple(sum(alpha[k] * mat[k][l] for k in range(d)) for l in range(d))
        return self._is_negative_root(img)

    def element_from_matrices(self, mat, imat):
        word = []
        m, im = mat, imat
        d = self.realization.dim_h
        ident = _mat_id(d)
        guard = 0
        while m != ident:
            guard += 1
            if guard > 10**6:
                raise RuntimeError("canonicalization did not terminate; invalid matrix?")
            for i in range(self.n):
                # left descent of x: x^{ -1} . alpha_i < 0, i.e. row(alpha_i) . M_x
                if self._left_descent_mats(m, i):
                    s = self.realization.vector_reflections[i]
                    m = _mat_mul(s, m)
                    im = _mat_mul(im, s)
                    word.append(i)
                    break
            else:
                raise RuntimeError("no left descent found; invalid matrix?")
        return self._intern(tuple(word), mat, imat)

    def element_from_word(self, word):
        el = self.identity
        for i in word:
            el = self.multiply(el, self.generators[i])
        return el

    def multiply(self, u: WeylElement, v: WeylElement) -> WeylElement:
        if u.group is not v.group:
            raise ValueError("elements of different groups")
        if not u.word:
            return v
        if not v.word:
            return u
        mat = _mat_mul(u.mat, v.mat)
        imat = _mat_mul(v.imat, u.imat)
        return self.element_from_matrices(mat, imat)

    def has_left_descent(self, w: WeylElement, i: int) -> bool:
        return self._left_descent_mats(w.mat, i)

    def has_right_descent(self, w: WeylElement, i: int) -> bool:
        alpha = self.realization.roots[i]
        return self._is_negative_root(w.apply_covector(alpha))

    def left_descents(self, w):
        return [i for i in range(self.n) if self.has_left_descent(w, i)]

    def right_descents(self, w):
        return [i for i in range(self.n) if self.has_right_descent(w, i)]

    def bruhat_leq(self, u: WeylElement, w: WeylElement) -> bool:
        """Descent recursion: u <= w iff min(u, su) <= sw for a left descent s of w."""
        if u.group is not self or w.group is not self:
            raise ValueError("elements of a different group")
        if not u.word:
            return True
        if u.length > w.length:
            return False
        if u.length == w.length:
            return u == w
        key = (u.word, w.word)
        cached = self._bruhat_memo.get(key)
        if cached is not None:
            return cached
        s = w.word[0]  # canonical word starts with the smallest left descent
        sw = self.multiply(self.generators[s], w)
        if self.has_left_descent(u, s):
            res = self.bruhat_leq(self.multiply(self.generators[s], u), sw)
        else:
            res = self.bruhat_leq(u, sw)
        self._bruhat_memo[key] = res
        return res

    def elements_up_to(self, length_bound: int):
        """All elements of length <= bound, by breadth-first growth."""
        layers = [[self.identity]]
        seen = {self.identity}
        for _ in range(length_bound):
            nxt = []
            for w in layers[-1]:
                for i in range(self.n):
                    if not self.has_right_descent(w, i):
                        ws = self.multiply(w, self.generators[i])
                        if ws not in seen:
                            seen.add(ws)
                            nxt.append(ws)
            if not nxt:
                break
            layers.append(sorted(nxt, key=lambda e: e.word))
        return [w for layer in layers for w in layer]

    def demazure_product(self, word):
        """Product with s skipped whenever it would shorten (used for supports)."""
        el = self.identity
        for i in word:
            if not self.has_right_descent(el, i):
                el = self.multiply(el, self.generators[i])
        return el


def weyl_group(realization: Realization) -> WeylGroup:
    return WeylGroup(realization)


class ParabolicSubset:
    """Subset of simple reflections; finite_type is decided by both the
    positive-definite classification and capped enumeration (they must agree)."""

    ENUM_CAP = 10**6
    LENGTH_CAP = 64

    def __init__(self, group: WeylGroup, generators):
        self.group = group
        self.generators = frozenset(int(i) for i in generators)
        if any(i < 0 or i >= group.n for i in self.generators):
            raise ValueError("generator index out of range")
        self.finite_type = self._decide_finite()

    def _decide_finite(self) -> bool:
        if not self.generators:
            return True
        sub = self.group.realization.cartan.submatrix(self.generators)
        by_classification = sub.is_finite_type()
        closed, _ = self._enumerate(self.LENGTH_CAP, self.ENUM_CAP)
        if by_classification != closed:
            raise RuntimeError(
                "finite-type classification and enumeration disagree for "
                f"theta={sorted(self.generators)}"
            )
        return by_classification

    def _enumerate(self, length_cap, size_cap):
        gens = [self.group.generators[i] for i in sorted(self.generators)]
        layer = [self.group.identity]
        seen = {self.group.identity}
        for _ in range(length_cap):
            nxt = []
            for w in layer:
                for g in gens:
                    ws = self.group.multiply(w, g)
                    if ws.length > w.length and ws not in seen:
                        seen.add(ws)
                        nxt.append(ws)
                        if len(seen) > size_cap:
                            return False, seen
            if not nxt:
                return True, seen
            layer = nxt
        return False, seen

    def elements(self):
        if not self.finite_type:
            raise NotFiniteType(f"theta={sorted(self.generators)} generates an infinite group")
        _, seen = self._enumerate(self.LENGTH_CAP, self.ENUM_CAP)
        return sorted(seen, key=lambda e: (e.length, e.word))


def longest_element(theta: ParabolicSubset) -> WeylElement:
    els = theta.elements()  # raises NotFiniteType when infinite
    top = max(els, key=lambda e: e.length)
    assert sum(1 for e in els if e.length == top.length) == 1
    g = theta.group
    for i in theta.generators:
        assert g.has_left_descent(top, i) and g.has_right_descent(top, i)
    return top


def coset_representatives(theta: ParabolicSubset, side="left", kind="minimal",
                          length_bound=0):
    """Coset representatives of W_Theta \\ W (side='left') or W / W_Theta,
    complete up to length_bound, filtered by the descent criterion."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if kind not in ("minimal", "maximal"):
        raise ValueError("kind must be 'minimal' or 'maximal'")
    if kind == "maximal" and not theta.finite_type:
        raise NotFiniteType("maximal-length representatives need finite type")
    g = theta.group
    has = g.has_left_descent if side == "left" else g.has_right_descent
    out = []
    for w in g.elements_up_to(length_bound):
        descents = [i for i in theta.generators if has(w, i)]
        if kind == "minimal" and not descents:
            out.append(w)
        elif kind == "maximal" and len(descents) == len(theta.generators):
            out.append(w)
    return out


def is_minimal_representative(group: WeylGroup, w: WeylElement, theta_generators) -> bool:
    return not any(group.has_left_descent(w, i) for i in theta_generators)


def factor_parabolic(w: WeylElement, theta: ParabolicSubset):
    """w = u * v with u in W_Theta, v minimal in its coset, lengths adding."""
    g = theta.group
    u_word = []
    x = w
    while True:
        t = next((i for i in sorted(theta.generators) if g.has_left_descent(x, i)), None)
        if t is None:
            break
        u_word.append(t)
        x = g.multiply(g.generators[t], x)
    u = g.element_from_word(u_word)
    assert u.length + x.length == w.length
    return u, x


def load_realization(source) -> Realization:
    """Realization from a JSON document {"cartan": [[...]], "dim_h": n,
    "roots": [[...]], "coroots": [[...]]}; roots/coroots optional."""
    if isinstance(source, (str, bytes)):
        data = json.loads(source)
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        data = source
    gcm = GeneralizedCartanMatrix(data["cartan"])
    if "roots" in data or "coroots" in data:
        if not ("roots" in data and "coroots" in data and "dim_h" in data):
            raise InvalidCartanMatrix("explicit realizations need dim_h, roots and coroots")
        return Realization(gcm, data["dim_h"], data["roots"], data["coroots"])
    real = Realization.minimal(gcm)
    if "dim_h" in data and int(data["dim_h"]) != real.dim_h:
        raise InvalidCartanMatrix(
            f"dim_h={data['dim_h']} does not match the minimal realization ({real.dim_h})"
        )
    return real
