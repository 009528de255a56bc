"""Command-line workbench: ``lagrange3 <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

import mpmath

from . import contfrac as cf
from .errors import DisjointnessViolation, Lagrange3Error
from .excision import (
    DEPTH_CAP,
    build_excision,
    excision_history,
    figure_shadows,
    history_csv,
    mcshane_term,
    render_svg,
    shadows_csv,
    tree_depth,
)
from .group import FrickeTriple, build_group, fricke_complete
from .scalar import DEFAULT_PRECISION, EXACT, FLOAT, Arith
from .tree import enumerate_tree, exceptional_geodesics, heights_by_recurrence, node_record

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


class InputError(Exception):
    pass


def _schema(name):
    return f"lagrange3.{name}/{SCHEMA_VERSION}"


def _num(x, digits=30):
    return mpmath.nstr(mpmath.mpf(x) if isinstance(x, float) else x, digits, min_fixed=-6, max_fixed=mpmath.inf) if x else "0"


# -- shared setup ---------------------------------------------------------------


def _arith(args):
    return Arith(args.mode, args.precision)


def _group(args):
    ar = _arith(args)
    a, b = ar.scalar(args.a), ar.scalar(args.b)
    c = ar.scalar(args.c) if args.c is not None else fricke_complete(a, b, ar)
    return build_group(FrickeTriple(a, b, c, ar))


def _check_depth(depth):
    if not 0 <= depth <= DEPTH_CAP:
        raise InputError(f"depth must be in [0, {DEPTH_CAP}]")


def _header(name, group, args):
    tr = group.triple
    return {
        "schema": _schema(name),
        "mode": args.mode,
        "precision": args.precision,
        "triple": dict(zip("abc", tr.as_strings())),
        "normalized": tr.normalized,
    }


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_INT_ARRAY = re.compile(r"\[\n\s+(-?\d+(?:,\n\s+-?\d+)*)\n\s+\]")


def _json(obj):
    text = json.dumps(obj, indent=2)
    # CF words on one line
    text = _INT_ARRAY.sub(lambda m: "[" + re.sub(r",\n\s+", ", ", m.group(1)) + "]", text)
    return text + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------


def cmd_tree(args):
    _check_depth(args.depth)
    group = _group(args)
    nodes = enumerate_tree(group, args.depth)
    records = [node_record(n) for n in nodes]
    if args.format == "csv":
        keys = ["path", "x", "y", "z", "trace", "length", "peak_height"]
        return _csv(keys, [[r[k] if r[k] is not None else "" for k in keys] for r in records])
    out = _header("tree", group, args)
    ar = group.arith
    out.update(
        depth=args.depth,
        count=len(records),
        exceptional=[{"name": g.name, "matrix": g.matrix.to_list(ar), "z": ar.fmt(g.z)} for g in exceptional_geodesics(group)],
        nodes=records,
    )
    return _json(out)


def cmd_excise(args):
    _check_depth(args.depth)
    group = _group(args)
    ar = group.arith
    nodes = enumerate_tree(group, args.depth)
    rows = excision_history(group, args.depth, nodes, identity_tol=args.identity_tol)
    if args.svg or args.shadows_csv:
        cover = build_excision(group, min(args.depth, args.svg_depth), nodes)
        shadows = figure_shadows(cover, args.chain, args.svg_level)
        if args.svg:
            with open(args.svg, "w", encoding="utf-8") as fh:
                fh.write(render_svg(cover, shadows))
        if args.shadows_csv:
            with open(args.shadows_csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(shadows_csv(shadows, ar))
    failed = [r.depth for r in rows if not r.identity_ok]
    if args.format == "csv":
        text = history_csv(rows, ar)
    else:
        out = _header("excise", group, args)
        out["depth"] = args.depth
        out["rows"] = [
            {
                "depth": r.depth,
                "intervals": r.intervals,
                "L_d": _num(r.remaining),
                "S_d": _num(r.mcshane),
                "s_sums": {str(s): _num(v, 12) for s, v in r.s_sums.items()},
                "covering": {f"{e:g}": n for e, n in r.covering.items()},
                "identity_residual": _num(r.identity_residual, 5),
                "identity": "PASS" if r.identity_ok else "FAIL",
            }
            for r in rows
        ]
        text = _json(out)
    if failed:
        sys.stderr.write(f"identity L_d = a(1 - 2 S_d) failed at depths {failed}\n")
    return text, (EXIT_INVARIANT if failed else EXIT_OK)


def cmd_mcshane(args):
    _check_depth(args.depth)
    group = _group(args)
    ar = group.arith
    exc = [g.z for g in exceptional_geodesics(group)]
    by_depth = {}
    for path, _, _, z in heights_by_recurrence(group, args.depth):
        by_depth.setdefault(tree_depth(path), []).append(z)
    total = ar.mp.fsum(mcshane_term(z, group.a, ar) for z in exc)
    table = []
    for d in range(args.depth + 1):
        inc = ar.mp.fsum(mcshane_term(z, group.a, ar) for z in by_depth.get(d, []))
        total += inc
        table.append((d, len(by_depth.get(d, [])), inc, total))
    monotone = all(b[3] > a[3] for a, b in zip(table, table[1:]))
    if args.format == "csv":
        text = _csv(["depth", "new_terms", "increment", "S_d", "gap_to_half"], [[d, k, _num(i), _num(s), _num(0.5 - s)] for d, k, i, s in table])
    else:
        out = _header("mcshane", group, args)
        out.update(
            depth=args.depth,
            monotone=monotone,
            rows=[{"depth": d, "new_terms": k, "increment": _num(i), "S_d": _num(s), "gap_to_half": _num(0.5 - s)} for d, k, i, s in table],
        )
        text = _json(out)
    return text, (EXIT_OK if monotone else EXIT_INVARIANT)


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {text!r}") from exc


def cmd_fold(args):
    r = _rational(args.rational)
    if args.iterations < 1:
        raise InputError("iterations must be >= 1")
    rec = cf.word_machinery(r, args.m)
    direction = rec.direction if args.direction == "auto" else args.direction
    word = cf.cf_expand(r)
    steps = []
    for k in range(1, args.iterations + 1):
        folded = cf.successor_word(word, args.m, direction)
        value = cf.cf_eval(folded)
        closed = cf.descendant(r, args.m, k, direction)
        step = {
            "k": k,
            "word": folded.to_list(),
            "value": f"{value.numerator}/{value.denominator}",
            "matches_descendant": value == closed,
        }
        if direction == rec.direction and k >= rec.k0:
            vw = cf.v_words(r, args.m, k, rec)
            step["V_prime"] = list(vw.V)
            step["predicted"] = vw.predicted.to_list()
            step["matches_v_words"] = vw.predicted == folded
        steps.append(step)
        word = folded
    ok = all(s["matches_descendant"] and s.get("matches_v_words", True) for s in steps)
    out = {"schema": _schema("fold"), "direction": direction, "case": rec.to_record(), "steps": steps, "ok": ok}
    return _json(out), (EXIT_OK if ok else EXIT_INVARIANT)


def cmd_dribble(args):
    r = _rational(args.rational)
    d = cf.dribble_endpoints(r, args.m, args.precision)
    out = {"schema": _schema("dribble"), **d.to_record()}
    try:
        rec = cf.word_machinery(r, args.m)
        out["case"] = rec.case
        out["words"] = {"U": list(rec.U), "W": list(rec.W), "prefix": list(rec.prefix), "k0": rec.k0}
    except Lagrange3Error as exc:
        out["case"] = None
        out["words"] = None
        out["note"] = str(exc)
    return _json(out)


def _parse_cf(text, repeat):
    terms = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "x" in tok:
            val, count = tok.split("x", 1)
            terms += [int(val)] * int(count)
        else:
            terms.append(int(tok))
    if not terms:
        raise InputError("empty continued fraction")
    if repeat > 1:
        # the first term is a0; the rest is the repeated period
        terms = terms[:1] + terms[1:] * repeat if len(terms) > 1 else terms * repeat
    return cf.CFWord.of(terms)


def cmd_lagrange(args):
    if (args.cf is None) == (args.value is None):
        raise InputError("give exactly one of --cf or --value")
    if args.cf is not None:
        x = _parse_cf(args.cf, args.repeat)
        n_terms = len(x.terms)
    else:
        if "/" in args.value:
            raise cf.RationalInput(f"{args.value} is rational")
        # a decimal only carries the bits its digits give
        digits = len(args.value.lower().split("e")[0].replace("-", "").replace(".", "").lstrip("0"))
        ctx = mpmath.MPContext()
        ctx.prec = max(53, min(args.precision, math.ceil(digits * math.log2(10))))
        x = ctx.mpf(args.value)
        n_terms = None
    est = cf.lagrange_estimate(x, args.window, args.tail, ctx.prec if args.value is not None else args.precision)
    out = {
        "schema": _schema("lagrange"),
        "window": args.window,
        "tail": args.tail,
        "terms": n_terms,
        "estimate": _num(est, 20),
    }
    return _json(out)


# -- parser -----------------------------------------------------------------------


def _add_common(p, triple=True, fmt=("json", "csv")):
    p.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="bits for irrational values (env LAGRANGE3_PRECISION)")
    p.add_argument("--format", choices=fmt, default=fmt[0])
    p.add_argument("--output", help="write here instead of stdout")
    if triple:
        p.add_argument("--a", required=True)
        p.add_argument("--b", required=True)
        p.add_argument("--c", help="default: the normalized completion")
        p.add_argument("--depth", type=int, default=3)


def build_parser():
    parser = argparse.ArgumentParser(prog="lagrange3", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="enumerate the adjusted Fricke tree")
    _add_common(p)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("excise", help="excision cover, measure and McShane bookkeeping per depth")
    _add_common(p)
    p.add_argument("--svg", help="write a figure of the window, excised intervals and shadows")
    p.add_argument("--shadows-csv", help="one row per shadow drawn in the figure")
    p.add_argument("--svg-depth", type=int, default=2, help="tree depth shown in the figure")
    p.add_argument("--svg-level", type=int, default=2, help="draw shadow chains for levels up to this")
    p.add_argument("--chain", type=int, default=3, help="shadows per chain direction")
    p.add_argument("--identity-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_excise)

    p = sub.add_parser("mcshane", help="McShane partial sums per depth")
    _add_common(p)
    p.set_defaults(func=cmd_mcshane)

    p = sub.add_parser("fold", help="iterated folding and the successor words")
    _add_common(p, triple=False, fmt=("json",))
    p.add_argument("--rational", required=True)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--iterations", type=int, default=2)
    p.add_argument("--direction", choices=("auto", cf.SIGMA, cf.TAU), default="auto")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("dribble", help="dribble endpoints with a certified tail bound")
    _add_common(p, triple=False, fmt=("json",))
    p.add_argument("--rational", required=True)
    p.add_argument("--m", type=int, default=3)
    p.set_defaults(func=cmd_dribble)

    p = sub.add_parser("lagrange", help="convergent-based Lagrange value estimate")
    _add_common(p, triple=False, fmt=("json",))
    p.add_argument("--cf", help="partial quotients a0,a1,...; 'vxN' repeats v N times")
    p.add_argument("--repeat", type=int, default=1, help="repeat the quotients after a0")
    p.add_argument("--value", help="a decimal, read at --precision bits")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--tail", type=int, help="trailing quotients of a --cf word used only as lookahead (default: centre the window)")
    p.set_defaults(func=cmd_lagrange)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except DisjointnessViolation as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except (Lagrange3Error, InputError, ValueError, ZeroDivisionError, TypeError) as exc:
        sys.stderr.write(f"invalid input: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
    _emit(args, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
