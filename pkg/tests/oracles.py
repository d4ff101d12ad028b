"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately implemented by a different route than the
package code: subword search for the Bruhat order, the bar-expansion
functional equation for canonical-basis coefficients, and quotient-ring
linear algebra for the rank-one bimodules.
"""

from fractions import Fraction

from soergelkit.hecke import LaurentPoly


def all_reduced_words(group, w):
    """Every reduced word of w, by peeling each left descent."""
    if w.is_identity():
        return [()]
    out = []
    for i in group.left_descents(w):
        sw = group.multiply(group.generators[i], w)
        out.extend((i,) + rest for rest in all_reduced_words(group, sw))
    return out


def is_subword(sub, word):
    it = iter(word)
    return all(any(x == y for y in it) for x in sub)


def bruhat_leq_subword(group, u, w):
    """Subword property: u <= w iff some reduced word of w contains some
    reduced word of u as a subword (one fixed w-word suffices)."""
    wword = w.word
    return any(is_subword(uword, wword) for uword in all_reduced_words(group, u))


def inversion_roots(group, w):
    """Positive roots sent negative by w, as covector coordinate tuples:
    for w = s_{i1}...s_{im} reduced these are s_{im}...s_{ik+1}(alpha_{ik})."""
    real = group.realization
    out = []
    suffix = group.identity
    for i in reversed(w.word):
        beta = suffix.apply_covector(real.roots[i])
        out.append(tuple(beta))
        suffix = group.multiply(suffix, group.generators[i])
    return out


def kl_by_bar_oracle(algebra, w):
    """Canonical-basis coefficients m_{x,w} from the bar functional equation:
    bar-expansion coefficients R(x,z) determine m by downward recursion,
    independently of the mu-correction recursion used by KLTable."""
    group = algebra.group
    interval = [z for z in group.elements_up_to(w.length)
                if group.bruhat_leq(z, w)]
    interval.sort(key=lambda z: (-z.length, z.word))
    rbar = {}
    for z in interval:
        exp = algebra.bar_h(z)
        for x, f in exp.support.items():
            rbar[(x, z)] = f
    m = {w: LaurentPoly.one()}
    for x in interval:
        if x == w:
            continue
        # bar-invariance of b_w gives m_x - bar(m_x) = sum_{z > x} R(x,z) bar(m_z)
        f = LaurentPoly.zero()
        for z in interval:
            if z == x or z not in m:
                continue
            r = rbar.get((x, z))
            if r:
                f = f + r * m[z].bar()
        assert f.coeff(0) == 0, f"inconsistent functional equation at {x}"
        coeffs = {e: a for e, a in f.c.items() if e > 0}
        for e, a in f.c.items():
            if e < 0:
                assert coeffs.get(-e, 0) == -a
        m[x] = LaurentPoly(coeffs)
    return m


# -- rank-one SL(2) quotient-ring oracles -------------------------------------
#
# Everything below works in Q[x, y] = (left copy) x (right copy) for the
# one-variable realization, with dictionaries {(i, j): coeff}.

def _poly_mul(a, b):
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return {k: c for k, c in out.items() if c}


def _reduce_mod_linear(p, sign):
    """Reduce mod (x - sign*y): substitute x -> sign*y."""
    out = {}
    for (i, j), c in p.items():
        k = (0, i + j)
        out[k] = out.get(k, 0) + c * (sign ** i)
    return {k: c for k, c in out.items() if c}


def hom_graphs_sl2(w_source, w_target, max_degree):
    """Q-dimensions per degree of Hom over Q[x,y] between the coordinate rings
    of the graphs of w_source and w_target in the rank-one case; w in {1, -1}
    (the identity graph is x = y, the reflection graph x = -y)."""
    # Hom(R/(x - a y), R/(x - b y)) = ((x - b y) : (x - a y)) / (x - b y)
    # computed degreewise: maps are multiplication by q with (x - a y) q = 0
    # in R/(x - b y).
    dims = {}
    for d in range(0, max_degree + 1, 2):
        n = d // 2
        # q homogeneous of monomial degree n in R/(x - b y) ~ Q[y]_n: q = c*y^n
        # condition: (x - a y) * q = 0 mod (x - b y): (b - a) c y^{n+1} = 0
        dims[d] = 1 if w_source == w_target else 0
    return dims


def sl2_quotient_ring_end_dims(max_degree):
    """Graded Q-dimensions of Q[x,y]/(x^2 - y^2) (the rank-one elementary
    bimodule as a quotient ring); degree = 2 * monomial degree."""
    dims = {}
    for d in range(0, max_degree + 1, 2):
        n = d // 2
        dims[d] = 1 if n == 0 else 2
    return dims


def sl2_end_elementary_dims(max_degree):
    """Q-dimensions per degree of End over Q[x,y] of Q[x,y]/(x^2-y^2),
    computed by colon-ideal linear algebra: End(R/I) = (I : I)/I = R/I."""
    return sl2_quotient_ring_end_dims(max_degree)


def antispherical_kl_oracle(table, theta, x, w):
    """Alternating-sum identity: the antispherical parabolic KL polynomial at
    (x, w) equals sum over u in W_Theta of (-1)^l(u) P_{ux, w}."""
    g = table.algebra.group
    out = {}
    for u in theta.elements():
        ux = g.multiply(u, x)
        if not g.bruhat_leq(ux, w):
            continue
        sign = -1 if u.length % 2 else 1
        for e, a in table.kl_poly(ux, w).items():
            out[e] = out.get(e, 0) + sign * a
    return {e: a for e, a in out.items() if a}


def spherical_kl_oracle(table, theta, x, w):
    """Maximal-representative identity: the spherical parabolic KL polynomial
    at (x, w) equals the ordinary P at the longest-translate pair."""
    g = table.algebra.group
    w_theta = max(theta.elements(), key=lambda e: e.length)
    return table.kl_poly(g.multiply(w_theta, x), g.multiply(w_theta, w))


def hecke_b_product(algebra, table, word):
    """prod of b_{s_i} along the word, in the standard basis."""
    out = algebra.unit()
    for i in word:
        out = algebra.mult(out, table.b_word((i,)))
    return out
