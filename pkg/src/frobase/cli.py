"""Command-line front end.

Every command prints one report (JSON by default, markdown with
--format md) and exits 0 when its checks pass, 1 on a verification failure
and 2 on malformed input. Reports are deterministic: keys are sorted,
residuals rounded, and no wall-clock appears (use --timing for that, which
writes to stderr).
"""
import argparse
import os
import sys
import time

import numpy as np

from . import __version__, acceptance, bimod, io
from .center import check_transitivity, rebase_isomorphism, rebase_over_center
from .covering import covering_bijection, frobenius_from_covering, idempotents, spectrum_isomorphism
from .cpstar import NoWitness, choi_spectra, cpstar_witness, is_completely_positive, witness_residual
from .errors import InputError, VerificationError
from .frobenius import (FROBENIUS_LAWS, LAWS, center_dims, classify_fibers, is_central,
                        star_isomorphism_residual, verify_laws)

DEFAULT_TOL = 1e-9
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def default_tol():
    raw = os.environ.get("FROBASE_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"FROBASE_TOL is not a number: {raw!r}") from None
    if not tol > 0:
        raise InputError("FROBASE_TOL must be positive")
    return tol


def rounded(obj):
    """Round every float in a nested structure for byte-stable output."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return acceptance.num(obj)
    return obj


# -- report rendering ------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report, fmt):
    if fmt == "json":
        return io.dumps(report)
    lines = [f"# frobase {report['command']}", "",
             f"- verdict: **{report['verdict']}**",
             f"- tolerance: {report['tolerance']}",
             f"- seed: {report['seed']}",
             f"- inputs digest: `{report['inputs_digest']}`", "",
             "| check | value |", "|---|---|"]
    for key, val in _flatten(report["checks"]):
        lines.append(f"| {key} | {val} |")
    return "\n".join(lines) + "\n"


def make_report(command, args, raws, checks, ok, data=None):
    """Residual-style ``checks`` are rounded; ``data`` (structures, coverings) is kept exact."""
    report = {"command": command, "version": __version__, "inputs_digest": io.digest(*raws),
              "seed": args.seed, "tolerance": args.tol, "checks": rounded(checks),
              "verdict": "pass" if ok else "fail"}
    if data is not None:
        report["data"] = data
    return report


# -- commands ----------------------------------------------------------------------

def _load(path, parse):
    raw = io.read_text(path)
    return raw, parse(io.loads(raw))


def _law_table(rep, requested):
    return {law: {"residual": rep.residuals[law], "pass": rep.verdicts[law], "requested": law in requested}
            for law in rep.residuals}


def parse_laws(text):
    known = LAWS + ("specialisable",)
    if text == "all":
        return known
    laws = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [law for law in laws if law not in known]
    if bad or not laws:
        raise InputError(f"unknown law {bad[0]!r}; choose from {', '.join(known)} or 'all'" if bad
                         else "no laws requested", "--laws")
    return laws


def cmd_verify(args):
    laws = parse_laws(args.laws)
    raw, F = _load(args.path, io.frobenius_from_json)
    rep = verify_laws(F, args.tol)
    failing = rep.failing(*laws)
    checks = {"laws": _law_table(rep, laws), "failing": failing}
    return make_report("verify", args, [raw], checks, not failing)


def _laws_or_fail(command, args, raws, F, laws=FROBENIUS_LAWS):
    """None if F satisfies the laws, otherwise a failure report naming them."""
    rep = verify_laws(F, args.tol)
    failing = rep.failing(*laws)
    if not failing:
        return None
    checks = {"laws": _law_table(rep, laws), "failing": failing, "error": "structure fails required laws"}
    return make_report(command, args, raws, checks, False)


def cmd_classify(args):
    raw, F = _load(args.path, io.frobenius_from_json)
    bad = _laws_or_fail("classify", args, [raw], F)
    if bad:
        return bad
    fibers = classify_fibers(F, args.seed)
    checks = {"fibers": {p: [int(n) for n in s] for p, s in fibers.items()},
              "center_dims": dict(zip(F.base.points, center_dims(F)))}
    return make_report("classify", args, [raw], checks, True)


def cmd_spectrum(args):
    raw, F = _load(args.path, io.frobenius_from_json)
    bad = _laws_or_fail("spectrum", args, [raw], F, FROBENIUS_LAWS + ("commutative", "nondegenerate"))
    if bad:
        return bad
    cov, _, r = spectrum_isomorphism(F, args.seed, args.tol)
    idem = idempotents(F, args.seed)
    chars = {}
    for y, t in zip(cov.total.points, cov.proj):
        j = cov.fiber(t).index(cov.total.index(y))
        chars[y] = {"point": F.base.points[t], "idempotent": io.encode_array(idem[t][j], True)}
    checks = {"isomorphism_residual": r, "fiber_sizes": dict(zip(cov.base.points, cov.fiber_sizes()))}
    data = {"covering": io.covering_to_json(cov), "characters": chars}
    return make_report("spectrum", args, [raw], checks, r < args.tol, data)


def cmd_from_covering(args):
    raw = io.read_text(args.path)
    doc = io.loads(raw)
    if isinstance(doc, dict) and "covering" in doc and "total" not in doc:
        p = io.covering_from_json(doc["covering"], "$.covering")
    elif isinstance(doc, dict) and isinstance(doc.get("data"), dict) and "covering" in doc["data"]:
        p = io.covering_from_json(doc["data"]["covering"], "$.data.covering")
    else:
        p = io.covering_from_json(doc)
    if not p.is_surjective():
        raise InputError("proj is not surjective", "$.proj")
    F = frobenius_from_covering(p)
    rep = verify_laws(F, args.tol)
    cov, _, r = spectrum_isomorphism(F, args.seed, args.tol)
    bij = covering_bijection(cov, p)
    ok = bij is not None and r < args.tol and rep.ok(*FROBENIUS_LAWS, "commutative", "nondegenerate")
    checks = {"laws": _law_table(rep, FROBENIUS_LAWS + ("commutative", "nondegenerate")),
              "round_trip": {"bijection": {cov.total.points[a]: p.total.points[b] for a, b in enumerate(bij)}
                             if bij else None,
                             "isomorphism_residual": r}}
    return make_report("from-covering", args, [raw], checks, ok, {"structure": io.frobenius_to_json(F)})


def cmd_rebase(args):
    raw, F = _load(args.path, io.frobenius_from_json)
    rep = check_transitivity(F, args.tol, args.seed)
    checks = {"transitivity": rep.as_dict()}
    ok = rep.agree
    try:
        rb = rebase_over_center(F, args.seed, args.tol)
    except VerificationError as exc:
        checks["rebased"] = {"error": str(exc)}
        return make_report("rebase", args, [raw], checks, False)
    U, comp = rebase_isomorphism(F, rb)
    r = star_isomorphism_residual(U, F, comp)
    checks["rebased"] = {"points": list(rb.new_base.points),
                         "dims": dict(zip(rb.new_base.points, rb.structure.carrier.dims)),
                         "central": is_central(rb.structure, args.tol),
                         "round_trip_residual": r}
    return make_report("rebase", args, [raw], checks, ok and r < args.tol,
                       {"covering": io.covering_to_json(rb.covering)})


def cmd_cp_check(args):
    raw1, F1 = _load(args.source, io.frobenius_from_json)
    raw2, F2 = _load(args.target, io.frobenius_from_json)
    raws = [raw1, raw2, io.read_text(args.morphism)]
    f = io.morphism_from_json(io.loads(raws[2]), F1.carrier, F2.carrier)
    for F in (F1, F2):
        bad = _laws_or_fail("cp-check", args, raws, F)
        if bad:
            return bad
    choi = is_completely_positive(f, F1, F2, args.tol, args.seed)
    spectra = {p: s.tolist() for p, s in zip(F1.base.points, choi_spectra(f, F1, F2, args.seed))}
    checks = {"choi": {"completely_positive": choi, "spectra": spectra}}
    special = all(verify_laws(F, args.tol).ok(*FROBENIUS_LAWS, "special") for F in (F1, F2))
    agree = True
    if special:
        try:
            _, g = cpstar_witness(f, F1, F2, args.tol)
            checks["witness"] = {"found": True, "residual": witness_residual(f, F1, F2, g)}
        except NoWitness as exc:
            checks["witness"] = {"found": False, "reason": str(exc)}
        agree = checks["witness"]["found"] == choi
        checks["routes_agree"] = agree
    else:
        checks["witness"] = {"found": None, "reason": "witness route needs special structures"}
    return make_report("cp-check", args, raws, checks, choi and agree)


def cmd_coherence(args):
    rng = np.random.default_rng(args.seed)
    raws = []
    if args.path:
        raw = io.read_text(args.path)
        raws.append(raw)
        doc = io.loads(raw)
        cells = doc.get("cells") if isinstance(doc, dict) else None
        if not isinstance(cells, list) or len(cells) not in (3, 4):
            raise InputError("expected a list of 3 or 4 composable 1-cells", "$.cells")
        cells = [io.cell1_from_json(c, f"$.cells[{i}]") for i, c in enumerate(cells)]
        for i in range(len(cells) - 1):
            if cells[i].target0 != cells[i + 1].source0:
                raise InputError("consecutive cells are not composable", f"$.cells[{i + 1}].source")
    else:
        Xs = [acceptance.points(c, int(rng.integers(1, 4))) for c in "wxyzv"]
        cells = [bimod.random_cell1(Xs[j], Xs[j + 1], rng) for j in range(4)]
    E, F, G = cells[:3]
    rep = bimod.coherence_check(E, F, G, cells[3] if len(cells) == 4 else None, args.seed)
    dims = bimod.hcompose(E, F)
    checks = {"pentagon": rep["pentagon"], "triangle": rep["triangle"], "unitary": rep["unitary"],
              "cells": [io.cell1_to_json(c) for c in (E, F, G, rep["fourth"])],
              "hcompose_dims_integer_product": bool(np.array_equal(dims.dims, E.dims @ F.dims))}
    ok = rep["pentagon"] < 1e-12 and rep["triangle"] < 1e-12 and rep["unitary"]
    return make_report("coherence", args, raws, checks, ok and checks["hcompose_dims_integer_product"])


def cmd_selftest(args):
    results = acceptance.run_all(args.seed, args.sizes)
    for r in results:
        print(r.line(), file=sys.stderr)
    checks = {"sizes": args.sizes, "criteria": {str(r.number): r.as_dict() for r in results},
              "failures": [r.number for r in results if not r.passed]}
    return make_report("selftest", args, [], checks, all(r.passed for r in results))


# -- argument parsing --------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9 or $FROBASE_TOL)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--format", choices=("json", "md"), default="json")
    common.add_argument("--timing", action="store_true", help="print elapsed time to stderr")

    parser = argparse.ArgumentParser(prog="frobase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check the laws of a Frobenius structure")
    p.add_argument("path")
    p.add_argument("--laws", default=",".join(FROBENIUS_LAWS),
                   help="comma-separated laws that must pass, or 'all' (default: %(default)s)")
    p.set_defaults(func=cmd_verify)

    for name, func, doc in (("classify", cmd_classify, "matrix block sizes per point"),
                            ("spectrum", cmd_spectrum, "covering of characters of a commutative structure"),
                            ("rebase", cmd_rebase, "rebase over the center and check transitivity")):
        p = sub.add_parser(name, parents=[common], help=doc)
        p.add_argument("path")
        p.set_defaults(func=func)

    p = sub.add_parser("from-covering", parents=[common], help="Frobenius structure of a covering")
    p.add_argument("path", help="a covering, or a spectrum report")
    p.set_defaults(func=cmd_from_covering)

    p = sub.add_parser("cp-check", parents=[common], help="complete positivity of a morphism")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("morphism")
    p.set_defaults(func=cmd_cp_check)

    p = sub.add_parser("coherence", parents=[common], help="pentagon and triangle for bimodule cells")
    p.add_argument("path", nargs="?", help="JSON with 3 or 4 composable 1-cells (random if omitted)")
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--sizes", choices=acceptance.SIZES, default="full")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        if args.tol is None:
            args.tol = default_tol()
        elif not args.tol > 0:
            raise InputError("--tol must be positive")
        report = args.func(args)
    except InputError as exc:
        print(f"frobase {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"frobase {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(render(report, args.format))
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return EXIT_OK if report["verdict"] == "pass" else EXIT_FAIL
