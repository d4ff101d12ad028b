"""Character-level models of the parabolic and Whittaker categories:
pushforward and averaging on standard objects, the kill rule for non-minimal
elements, decomposition multiplicities of parabolic pushforwards, and the
parabolic-Whittaker matching of standards.

Left cosets throughout: minimal representatives are characterized by having
no left descent in Theta, and this convention is used consistently for the
kill rule and the module recursions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coxeter import NotFiniteType, ParabolicSubset, WeylElement, factor_parabolic
from .hecke import KLTable, ParabolicModule

__all__ = [
    "ParabolicCharacter",
    "push_standard",
    "average_standard",
    "kill_nonminimal",
    "parabolic_decomp_multiplicities",
    "pw_match",
    "whittaker_cover_multiset",
]


@dataclass(frozen=True)
class ParabolicCharacter:
    """Singleton standard-object character: a coset representative with a
    homological shift and a doubled Tate twist."""
    theta: tuple
    flavor: str  # 'parabolic' | 'whittaker'
    coset: WeylElement
    shift: int
    twist2: int

    def support_key(self):
        return self.coset.word


def _require_finite(theta: ParabolicSubset):
    if not theta.finite_type:
        raise NotFiniteType(
            f"theta={sorted(theta.generators)} generates an infinite group"
        )


def push_standard(w: WeylElement, theta: ParabolicSubset, variance: str) -> ParabolicCharacter:
    """Pushforward of a standard (variance '!') or costandard ('*') object:
    factor w = u v and land on the coset of v with shift/twist -l(u) for '!'
    and +l(u) for '*', twists stored doubled."""
    _require_finite(theta)
    if variance not in ("!", "*"):
        raise ValueError("variance must be '!' or '*'")
    u, v = factor_parabolic(w, theta)
    sign = -1 if variance == "!" else 1
    return ParabolicCharacter(
        theta=tuple(sorted(theta.generators)), flavor="parabolic",
        coset=v, shift=sign * u.length, twist2=sign * u.length,
    )


def average_standard(w: WeylElement, theta: ParabolicSubset) -> ParabolicCharacter:
    """Averaging of a free-monodromic standard: exact (no shift), lands on the
    coset of v with doubled twist +l(u)."""
    _require_finite(theta)
    u, v = factor_parabolic(w, theta)
    return ParabolicCharacter(
        theta=tuple(sorted(theta.generators)), flavor="whittaker",
        coset=v, shift=0, twist2=u.length,
    )


def kill_nonminimal(w: WeylElement, theta: ParabolicSubset) -> bool:
    """True (killed) iff w is not the minimal representative of its coset,
    i.e. some generator of Theta is a left descent of w."""
    g = theta.group
    return any(g.has_left_descent(w, i) for i in theta.generators)


def parabolic_decomp_multiplicities(w: WeylElement, theta: ParabolicSubset,
                                    table: KLTable):
    """Multiplicities of shifted simple classes in the parabolic pushforward
    of the simple class of w: expand the image of b_w in the spherical module
    through the parabolic canonical basis.  Returns [(coset, n, mult)] with
    n = exponent of the multiplicity polynomial; parity n = l(w) - l(coset)
    mod 2 is enforced."""
    _require_finite(theta)
    alg = table.algebra
    module = ParabolicModule(alg, theta, "spherical")
    image = module.project(table.b(w))
    expansion = module.in_n_basis(image)
    out = []
    for vbar, poly in sorted(expansion.items(), key=lambda t: (t[0].length, t[0].word)):
        for n, mult in sorted(poly.c.items()):
            if (n - (w.length - vbar.length)) % 2:
                raise RuntimeError(
                    f"parity violated in parabolic decomposition of {w!r}: "
                    f"shift {n} against length difference {w.length - vbar.length}"
                )
            if mult < 0:
                raise RuntimeError("negative multiplicity in parabolic decomposition")
            out.append((vbar, n, mult))
    if module.is_minimal(w):
        assert any(v == w and n == 0 and m == 1 for v, n, m in out), (
            "minimal representatives must contribute their own class once"
        )
    return out


def pw_match(wbar: WeylElement, theta: ParabolicSubset):
    """The parabolic-Whittaker pairing of standard objects: identical support
    and (shift, twist) data on both sides."""
    _require_finite(theta)
    if kill_nonminimal(wbar, theta):
        raise ValueError("pw_match expects a minimal coset representative")
    key = tuple(sorted(theta.generators))
    par = ParabolicCharacter(theta=key, flavor="parabolic", coset=wbar,
                             shift=0, twist2=0)
    whi = ParabolicCharacter(theta=key, flavor="whittaker", coset=wbar,
                             shift=0, twist2=0)
    return par, whi


def whittaker_cover_multiset(theta: ParabolicSubset):
    """Standard multiset of the Whittaker-side projective cover over Theta:
    each u in W_Theta appears exactly once, with doubled twist l(u)."""
    _require_finite(theta)
    return sorted(((u, u.length) for u in theta.elements()),
                  key=lambda t: (t[0].length, t[0].word))
