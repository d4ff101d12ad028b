"""Command-line front end: configuration ingestion, result caching, and table
emission for the engine modules.

Exit codes: 0 success, 1 check/invariant failure or engine error (with a JSON
diagnostic on stderr), 2 usage error.  Reports are deterministic for a fixed
configuration and cache state.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bimod as bimod_mod
from . import duality as duality_mod
from . import parabolic as parabolic_mod
from .coxeter import (
    NotFiniteType,
    ParabolicSubset,
    coset_representatives,
    load_realization,
)
from .hecke import (
    CONVENTION_VERSION,
    ENGINE_VERSION,
    HeckeAlgebra,
    KLTable,
    ParabolicModule,
    hom_pairing,
)

CACHE_ENV = "SOERGELKIT_CACHE_DIR"


def _load_real(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"GCM file not found: {path}")
    with open(path) as fh:
        return load_realization(json.load(fh))


def _parse_word(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(t) for t in text.replace(",", " ").split())


def _word_str(word):
    return ",".join(str(i) for i in word)


def _emit(rows, fmt, stream=None):
    stream = stream or sys.stdout
    if not rows:
        rows = []
    if fmt == "json":
        stream.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
        return
    headers = sorted({k for row in rows for k in row}) if rows else []
    if fmt == "csv":
        stream.write(",".join(headers) + "\n")
        for row in rows:
            stream.write(",".join(str(row.get(h, "")) for h in headers) + "\n")
        return
    if fmt == "latex":
        stream.write("\\begin{tabular}{" + "l" * len(headers) + "}\n")
        stream.write(" & ".join(headers) + " \\\\\n\\hline\n")
        for row in rows:
            stream.write(" & ".join(str(row.get(h, "")) for h in headers) + " \\\\\n")
        stream.write("\\end{tabular}\n")
        return
    raise ValueError(f"unknown format {fmt}")


def _format_flag(parser):
    parser.add_argument("--json", dest="fmt", action="store_const", const="json")
    parser.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    parser.add_argument("--latex", dest="fmt", action="store_const", const="latex")
    parser.set_defaults(fmt="json")


def _cache_dir(args):
    return args.cache_dir or os.environ.get(CACHE_ENV)


def _kl_table(real, args):
    alg = HeckeAlgebra(bimod_mod._group_of(real))
    cache_dir = _cache_dir(args)
    path = None
    if cache_dir:
        path = os.path.join(
            cache_dir, f"kl-{real.digest()}-{CONVENTION_VERSION}.jsonl"
        )
    table = KLTable(alg, cache_path=path)
    return alg, table


def _save_cache(table):
    if table.cache_path and table.dirty:
        table.save()


def cmd_group(args):
    real = _load_real(args.type)
    group = bimod_mod._group_of(real)
    rows = []
    for w in group.elements_up_to(args.max_length):
        rows.append({
            "word": _word_str(w.word),
            "length": w.length,
            "left_descents": _word_str(group.left_descents(w)),
            "right_descents": _word_str(group.right_descents(w)),
        })
    _emit(rows, args.fmt)
    return 0


def cmd_kl(args):
    real = _load_real(args.type)
    alg, table = _kl_table(real, args)
    group = alg.group
    rows = []
    for w in group.elements_up_to(args.max_length):
        b = table.b(w)
        for u, _ in sorted(b.support.items(), key=lambda t: (t[0].length, t[0].word)):
            poly = table.kl_poly(u, w)
            rows.append({
                "u": _word_str(u.word),
                "w": _word_str(w.word),
                "P": " + ".join(
                    (f"{c}q^{e}" if e else str(c)) for e, c in sorted(poly.items())
                ) or "0",
            })
    _save_cache(table)
    _emit(rows, args.fmt)
    return 0


def cmd_mult(args):
    real = _load_real(args.type)
    alg, table = _kl_table(real, args)
    if args.basis == "H":
        x = alg.h_word(_parse_word(args.x))
        y = alg.h_word(_parse_word(args.y))
    else:
        x = table.b_word(_parse_word(args.x))
        y = table.b_word(_parse_word(args.y))
    prod = alg.mult(x, y)
    rows = [{"w": _word_str(w.word), "coeff": str(f)}
            for w, f in prod.terms_sorted()]
    _save_cache(table)
    _emit(rows, args.fmt)
    return 0


def cmd_pairing(args):
    real = _load_real(args.type)
    alg, table = _kl_table(real, args)
    x = table.b_word(_parse_word(args.x))
    y = table.b_word(_parse_word(args.y))
    val = hom_pairing(x, y)
    _save_cache(table)
    _emit([{"x": args.x, "y": args.y, "pairing": str(val)}], args.fmt)
    return 0


def cmd_parabolic_kl(args):
    real = _load_real(args.type)
    alg, table = _kl_table(real, args)
    theta = ParabolicSubset(alg.group, _parse_word(args.theta))
    module = ParabolicModule(alg, theta, args.flavor)
    reps = coset_representatives(theta, "left", "minimal", args.max_length)
    rows = []
    for w in reps:
        for u in reps:
            if not alg.group.bruhat_leq(u, w):
                continue
            poly = module.parabolic_kl(u, w)
            rows.append({
                "u": _word_str(u.word),
                "w": _word_str(w.word),
                "P": " + ".join(
                    (f"{c}q^{e}" if e else str(c)) for e, c in sorted(poly.items())
                ) or "0",
            })
    _save_cache(table)
    _emit(rows, args.fmt)
    return 0


def cmd_bimod(args):
    real = _load_real(args.type)
    side = args.side
    if args.action == "bs":
        b = bimod_mod.bott_samelson(real, _parse_word(args.word), side)
        rows = [{"generator": t, "degree": d, "weight": w}
                for t, (d, w) in enumerate(b.gens)]
        _emit(rows, args.fmt)
        return 0
    if args.action == "hom":
        b = bimod_mod.bott_samelson(real, _parse_word(args.word), side)
        c = bimod_mod.bott_samelson(real, _parse_word(args.word2), side)
        hom = bimod_mod.hom_graded(b, c, degree_bound=args.degree_bound)
        rows = [{"degree": d, "weight": w} for d, w in sorted(hom.generators)]
        _emit(rows, args.fmt)
        return 0
    if args.action == "decompose":
        b = bimod_mod.bott_samelson(real, _parse_word(args.word), side)
        dec = bimod_mod.decompose(b)
        rows = []
        for (word, shift), mult in sorted(dec.multiplicities().items()):
            rows.append({
                "label": _word_str(word),
                "shift": shift,
                "twist2": shift,
                "multiplicity": mult,
            })
        _emit(rows, args.fmt)
        return 0
    raise ValueError(f"unknown bimod action {args.action}")


def cmd_duality_check(args):
    real = _load_real(args.type)
    report = duality_mod.em_check(
        real, max_length=args.max_length,
        symmetrizable_self=args.symmetrizable_self,
        degree_bound=args.degree_bound,
    )
    rows = []
    for r in report.results:
        row = {
            "x": _word_str(r.x_word),
            "y": _word_str(r.y_word),
            "status": "pass" if r.passed else "FAIL",
        }
        if args.dump:
            row["equivariant"] = str(r.equivariant.items_sorted())
            row["regraded"] = str(r.regraded.items_sorted())
            row["monodromic"] = str(r.monodromic.items_sorted())
        if r.first_discrepancy:
            row["first_discrepancy"] = str(r.first_discrepancy)
        rows.append(row)
    _emit(rows, args.fmt)
    return 0 if report.passed else 1


def cmd_parabolic(args):
    real = _load_real(args.type)
    group = bimod_mod._group_of(real)
    theta = ParabolicSubset(group, _parse_word(args.theta))
    rows = []
    if args.action == "push":
        w = group.element_from_word(_parse_word(args.w))
        ch = parabolic_mod.push_standard(w, theta, args.variance)
        rows = [{"coset": _word_str(ch.coset.word), "shift": ch.shift,
                 "twist2": ch.twist2}]
    elif args.action == "average":
        w = group.element_from_word(_parse_word(args.w))
        ch = parabolic_mod.average_standard(w, theta)
        rows = [{"coset": _word_str(ch.coset.word), "shift": ch.shift,
                 "twist2": ch.twist2}]
    elif args.action == "decomp":
        alg, table = _kl_table(real, args)
        w = group.element_from_word(_parse_word(args.w))
        for vbar, n, mult in parabolic_mod.parabolic_decomp_multiplicities(w, theta, table):
            rows.append({"coset": _word_str(vbar.word), "shift": n, "mult": mult})
        _save_cache(table)
    elif args.action == "match":
        w = group.element_from_word(_parse_word(args.w))
        par, whi = parabolic_mod.pw_match(w, theta)
        rows = [
            {"side": "parabolic", "coset": _word_str(par.coset.word),
             "shift": par.shift, "twist2": par.twist2},
            {"side": "whittaker", "coset": _word_str(whi.coset.word),
             "shift": whi.shift, "twist2": whi.twist2},
        ]
    else:
        raise ValueError(f"unknown parabolic action {args.action}")
    _emit(rows, args.fmt)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="soergelkit",
        description="Exact Coxeter/Hecke/Soergel-bimodule engine with duality checks",
    )
    parser.add_argument("--cache-dir", default=None,
                        help=f"cache directory (or ${CACHE_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="enumerate group elements")
    p.add_argument("--type", required=True)
    p.add_argument("--max-length", type=int, default=3)
    _format_flag(p)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("kl", help="Kazhdan-Lusztig polynomial table")
    p.add_argument("--type", required=True)
    p.add_argument("--max-length", type=int, default=3)
    _format_flag(p)
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("mult", help="multiply two Hecke elements")
    p.add_argument("--type", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--basis", choices=["H", "b"], default="H")
    _format_flag(p)
    p.set_defaults(func=cmd_mult)

    p = sub.add_parser("pairing", help="Hom pairing of canonical basis elements")
    p.add_argument("--type", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    _format_flag(p)
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("parabolic-kl", help="parabolic KL polynomials")
    p.add_argument("--type", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--flavor", choices=["spherical", "antispherical"],
                   default="antispherical")
    p.add_argument("--max-length", type=int, default=3)
    _format_flag(p)
    p.set_defaults(func=cmd_parabolic_kl)

    p = sub.add_parser("bimod", help="bimodule engine")
    p.add_argument("action", choices=["bs", "hom", "decompose"])
    p.add_argument("word")
    p.add_argument("word2", nargs="?", default="")
    p.add_argument("--type", required=True)
    p.add_argument("--side", choices=["equivariant", "monodromic"],
                   default="equivariant")
    p.add_argument("--degree-bound", type=int, default=None)
    _format_flag(p)
    p.set_defaults(func=cmd_bimod)

    p = sub.add_parser("duality", help="equivariant-monodromic duality checks")
    p.add_argument("action", choices=["check"])
    p.add_argument("--type", required=True)
    p.add_argument("--max-length", type=int, default=2)
    p.add_argument("--symmetrizable-self", action="store_true")
    p.add_argument("--degree-bound", type=int, default=None)
    p.add_argument("--dump", action="store_true")
    _format_flag(p)
    p.set_defaults(func=cmd_duality_check)

    p = sub.add_parser("parabolic", help="parabolic/Whittaker characters")
    p.add_argument("action", choices=["push", "average", "decomp", "match"])
    p.add_argument("--type", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--w", default="")
    p.add_argument("--variance", choices=["!", "*"], default="!")
    _format_flag(p)
    p.set_defaults(func=cmd_parabolic)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on usage errors
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(json.dumps({"error": "missing-file", "detail": str(exc)}),
              file=sys.stderr)
        return 2
    except (NotFiniteType, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2
    except Exception as exc:  # engine failure -> structured diagnostic
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
