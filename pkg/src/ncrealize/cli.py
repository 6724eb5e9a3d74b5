"""Command-line front end: every subcommand reads and writes ``ncrealize/1`` JSON.

Exit status is 0 on success, 1 for usage errors, 2 for parse or validation
errors and 3 for numerical domain errors; failures also print an error
document on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import entire, expr, fps, jsonio, matcentre, minimal, realization, spectral
from .errors import InputError, NCRealizeError
from .linalg import RANK_TOL, SINGULARITY_TOL

DEFAULT_DEGREE = 6


class UsageError(Exception):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input helpers --------------------------------------------------------------


def _read_json(path):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path or 'stdin'}: {exc}") from exc


def _unwrap(doc):
    # envelopes produced by minimize / entire-construct carry the realization inside
    if isinstance(doc, dict) and "realization" in doc:
        return doc["realization"]
    return doc


def _load_realization(path):
    doc = _unwrap(_read_json(path))
    if not isinstance(doc, dict):
        raise InputError("expected a realization document")
    if doc.get("kind") == "matrix-centre":
        doc = doc["fm"]
    return realization.realization_from_dict(doc)


def _load_tuple(path):
    doc = _read_json(path)
    if isinstance(doc, dict) and doc.get("kind") == "tuple":
        return realization.MatrixTuple.from_dict(doc)
    if isinstance(doc, list):
        # bare list of matrices
        return realization.MatrixTuple(np.array([jsonio.dec_matrix(m) for m in doc], dtype=complex))
    raise InputError("expected a tuple document")


def _load_series(path, degree=None):
    doc = _read_json(path)
    if isinstance(doc, dict) and doc.get("kind") in ("descriptor", "fm"):
        r = realization.realization_from_dict(doc)
        return r.series(degree if degree is not None else DEFAULT_DEGREE)
    if isinstance(doc, dict) and "realization" in doc:
        r = realization.realization_from_dict(doc["realization"])
        return r.series(degree if degree is not None else DEFAULT_DEGREE)
    return jsonio.series_from_dict(doc)


def _load_matrix(path):
    doc = _read_json(path)
    if isinstance(doc, dict) and doc.get("kind") == "matrix":
        return jsonio.dec_matrix(doc["value"])
    if isinstance(doc, list):
        return jsonio.dec_matrix(doc)
    raise InputError("expected a matrix document")


def _number(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _matrix_doc(M):
    return {"schema": jsonio.SCHEMA, "kind": "matrix", "n": int(M.shape[0]), "value": jsonio.enc_matrix(M)}


def _with_schema(doc):
    out = {"schema": jsonio.SCHEMA}
    out.update(doc)
    return out


def _tol(args, default):
    return args.tolerance if args.tolerance is not None else default


# -- subcommands ----------------------------------------------------------------


def cmd_parse(args):
    e = expr.parse(args.expression, args.d)
    return _with_schema({"kind": "expression", "text": expr.to_string(e), "ast": expr.to_dict(e)})


def cmd_compile(args):
    e = expr.parse(args.expression, args.d)
    d = args.d if args.d is not None else max(1, expr.max_variable(e))
    return expr.compile_expr(e, d).to_dict()


def cmd_minimize(args):
    r = _load_realization(args.input)
    out, rep = minimal.kalman_minimize(r, _tol(args, RANK_TOL), return_report=True)
    doc = out.to_dict()
    doc["report"] = rep.to_dict()
    return doc


def cmd_eval(args):
    r = _load_realization(args.input)
    X = _load_tuple(args.point)
    return _matrix_doc(realization.evaluate(r, X, _tol(args, SINGULARITY_TOL)))


def cmd_coeffs(args):
    r = _load_realization(args.input)
    if args.word:
        words = [tuple(int(c) for c in w.split(",") if c) for w in args.word]
        return [_number(r.coeff(w)) for w in words]
    up_to = args.up_to if args.up_to is not None else (args.degree if args.degree is not None else DEFAULT_DEGREE)
    s = r.series(up_to)
    return [_number(s[w]) for w in fps.words_up_to(r.d, up_to)]


def cmd_series(args):
    if args.expression is not None:
        e = expr.parse(args.expression, args.d)
        d = args.d if args.d is not None else max(1, expr.max_variable(e))
        return jsonio.series_to_dict(expr.interpret(e, d, args.degree or DEFAULT_DEGREE))
    r = _load_realization(args.input)
    return jsonio.series_to_dict(r.series(args.degree or DEFAULT_DEGREE))


def cmd_radius(args):
    f = _load_series(args.input, args.degree)
    window = tuple(args.window) if args.window else None
    est = fps.radius_estimate(f, window)
    return _with_schema(
        {
            "kind": "radius",
            "radius": est.radius if math.isfinite(est.radius) else "inf",
            "roots": list(est.roots),
            "window": list(est.window),
        }
    )


def cmd_entire_construct(args):
    f = _load_series(args.input, args.N)
    if f.d == 1:
        coeffs = [f[(1,) * n] for n in range(args.N + 1)]
        if args.N > f.degree_bound:
            raise InputError(f"series known to degree {f.degree_bound}, construction asked for {args.N}")
        q = entire.quasinilpotent_1d(coeffs, dim_cap=args.dim_cap)
    else:
        q = entire.quasinilpotent_nc(f, args.N, dim_cap=args.dim_cap)
    return _with_schema({"kind": "entire-construction", "realization": q.realization.to_dict(), "certificate": q.certificate()})


def cmd_recenter(args):
    r = _load_realization(args.input)
    Y = _load_tuple(args.centre)
    return matcentre.matcentre_from_fm(r, Y, _tol(args, SINGULARITY_TOL)).to_dict()


def cmd_tt(args):
    doc = _unwrap(_read_json(args.input))
    if isinstance(doc, dict) and doc.get("kind") == "matrix-centre":
        r = realization.realization_from_dict(doc["fm"])
        Y = realization.MatrixTuple.from_dict(doc["centre"])
    else:
        r = realization.realization_from_dict(doc)
        if args.centre is None:
            raise InputError("tt needs --centre unless given a matrix-centre document")
        Y = _load_tuple(args.centre)
    mc = matcentre.matcentre_from_fm(r, Y, _tol(args, SINGULARITY_TOL))
    H = _load_tuple(args.direction)
    terms = [{"word": list(w), "value": jsonio.enc_matrix(T)} for w, T in matcentre.tt_table(mc, H, args.up_to)]
    return _with_schema({"kind": "tt-table", "m": mc.m, "terms": terms})


def cmd_poles(args):
    r = _load_realization(args.input)
    X = _load_tuple(args.point)
    rep = spectral.restriction_poles(r, X)
    doc = _with_schema(rep.to_dict())
    if args.verify:
        doc["verdicts"] = [v.to_dict() for v in spectral.verify_all_poles(r, X, rep)]
    return doc


def cmd_probe(args):
    r = _load_realization(args.input)
    rng = np.random.default_rng(args.seed)
    rep = spectral.zariski_probe(r.A, args.level, args.trials, rng, args.lines, _tol(args, SINGULARITY_TOL))
    return _with_schema(rep.to_dict())


def cmd_jsr(args):
    r = _load_realization(args.input)
    res = entire.joint_spectral_radius(r.A, args.max_m)
    return _with_schema({"kind": "joint-spectral-radius", **res.to_dict()})


def cmd_schatten(args):
    doc = _unwrap(_read_json(args.input))
    if isinstance(doc, dict) and doc.get("kind") in ("descriptor", "fm"):
        r = realization.realization_from_dict(doc)
        norms = [spectral.schatten_norm(a, args.p) for a in r.A]
        return _with_schema({"kind": "schatten", "p": args.p, "norms": norms})
    M = jsonio.dec_matrix(doc["value"] if isinstance(doc, dict) else doc)
    return _with_schema({"kind": "schatten", "p": args.p, "norm": spectral.schatten_norm(M, args.p)})


# -- argument parsing -----------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--degree", type=int, default=None, help="degree bound for series output")
    common.add_argument("--tolerance", type=float, default=None, help="override the relevant numerical tolerance")

    p = _Parser(prog="ncrealize", description="Realizations of noncommutative rational and entire functions.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "parse an expression and print its tree")
    sp.add_argument("expression")
    sp.add_argument("--d", type=int, default=None)

    sp = add("compile", cmd_compile, "compile an expression to an FM realization")
    sp.add_argument("expression")
    sp.add_argument("--d", type=int, default=None)

    sp = add("minimize", cmd_minimize, "Kalman-minimize a realization")
    sp.add_argument("input", nargs="?", default="-")

    sp = add("eval", cmd_eval, "evaluate a realization at a matrix tuple")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--point", required=True, help="tuple JSON file")

    sp = add("coeffs", cmd_coeffs, "list coefficients in graded-lex order")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--up-to", type=int, default=None)
    sp.add_argument("--word", action="append", help="comma-separated letters, repeatable")

    sp = add("series", cmd_series, "series JSON of a realization (or of an expression via the oracle)")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--expression", default=None)
    sp.add_argument("--d", type=int, default=None)

    sp = add("radius", cmd_radius, "estimate the radius of convergence")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--window", type=int, nargs=2, default=None, metavar=("LO", "HI"))

    sp = add("entire-construct", cmd_entire_construct, "nilpotent realization of a truncated series")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--dim-cap", type=int, default=entire.DIM_CAP)

    sp = add("recenter", cmd_recenter, "matrix-centre realization about a tuple")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--centre", required=True)

    sp = add("tt", cmd_tt, "Taylor-Taylor terms about a centre")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--centre", default=None)
    sp.add_argument("--direction", required=True)
    sp.add_argument("--up-to", type=int, default=2)

    sp = add("poles", cmd_poles, "pole candidates of z -> f(zX)")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--point", required=True)
    sp.add_argument("--verify", action="store_true", help="confirm each candidate by a circle fit")

    sp = add("probe", cmd_probe, "Monte Carlo invertibility probe")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--level", type=int, default=2)
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--lines", type=int, default=5)

    sp = add("jsr", cmd_jsr, "joint spectral radius sequence")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--max-m", type=int, required=True)

    sp = add("schatten", cmd_schatten, "Schatten p-norm of a matrix (or of each A_j)")
    sp.add_argument("input", nargs="?", default="-")
    sp.add_argument("--p", type=float, default=2.0)
    return p


def _fail(kind, message, code, extra=None):
    doc = {"schema": jsonio.SCHEMA, "error": kind, "message": message, "exit_code": code}
    if extra:
        doc.update(extra)
    sys.stderr.write(jsonio.dumps(doc) + "\n")
    return code


def _thread_limit():
    value = os.environ.get("NCREALIZE_THREADS")
    if not value:
        return None
    try:
        n = int(value)
    except ValueError:
        return None
    return n if n > 0 else None


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc), 1)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    limit = _thread_limit()
    try:
        if limit is not None:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=limit):
                out = args.func(args)
        else:
            out = args.func(args)
    except NCRealizeError as exc:
        extra = {}
        if getattr(exc, "position", None) is not None:
            extra["position"] = exc.position
        rcond = getattr(exc, "rcond", None)
        if rcond is not None and math.isfinite(rcond):
            extra["rcond"] = rcond
        return _fail(type(exc).__name__, str(exc), exc.exit_code, extra)
    except UsageError as exc:
        return _fail("usage", str(exc), 1)
    sys.stdout.write(jsonio.dumps(out) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
