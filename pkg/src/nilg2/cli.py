"""Command-line front end.

Subcommands: validate, torsion, instanton, classify, holonomy, example.
Exit codes: 0 success, 1 strict-mode instanton failure, 2 invalid input,
3 parse error, 4 no characteristic connection.  Reports are emitted as
human-readable text or machine-readable JSON (--format machine); the
banner always states the scalar mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import scalars
from .errors import (InputError, KindMismatch, Nilg2Error,
                     NoCharacteristicConnection, NotCoclosed,
                     NotPositiveThreeForm)
from .families import FAMILY_BUILDERS
from .g2 import torsion_forms
from .instanton import (DEFAULT_SWEEP_GRID, LAMBDA_CUBE_ROOT4_MINUS_1,
                        classify, lambda_sweep, naturally_reductive_check,
                        run_instanton)
from .connection import curvature, holonomy_algebra, nabla_lambda
from .io import (INPUT_VERSION, family_document, load_document,
                 matrix_to_json, parse_input, render_scalar)
from .scalars import EXACT, FLOAT

EXIT_OK = 0
EXIT_STRICT = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_NO_CONNECTION = 4


def _parse_lambda(text: str):
    if text == "cbrt4-1":
        return LAMBDA_CUBE_ROOT4_MINUS_1
    return scalars.parse_scalar(text)


def _emit(args, human_lines, machine_doc):
    if args.format == "machine":
        payload = json.dumps(machine_doc, indent=2, sort_keys=True)
    else:
        payload = "\n".join(human_lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _load(args):
    doc = load_document(args.input)
    L, g2, mode = parse_input(doc)
    return doc, L, g2, mode


def _validation_section(L, tol):
    rep = L.validate(tol)
    return rep, {
        "antisymmetry_ok": rep.antisymmetry_ok,
        "jacobi_ok": rep.jacobi_ok,
        "jacobi_failures": [m for m, _ in rep.jacobi_failures],
        "nilpotency_step": rep.nilpotency_step,
        "two_step": rep.two_step,
        "dim_commutator": rep.dim_commutator,
        "dim_center": rep.dim_center,
    }


def _torsion_section(L, g2, tol):
    tc = torsion_forms(g2, L, tol)
    if L.commutator_subspace(tol).dim == 1:
        mu = tc.tau0 * 7 / 2
    else:
        mu = tc.tau0 * 7 / 4
    return tc, {
        "tau0": render_scalar(tc.tau0),
        "mu": render_scalar(mu),
        "closed": tc.closed,
        "coclosed": tc.coclosed,
        "purely_coclosed": tc.purely_coclosed,
        "torsion_free": tc.torsion_free,
        "tau2_zero": tc.tau2.is_zero(tol),
    }


def cmd_validate(args) -> int:
    doc, L, g2, mode = _load(args)
    rep, section = _validation_section(L, args.tol)
    lines = [f"scalar mode: {mode}",
             f"antisymmetry: {'ok' if rep.antisymmetry_ok else 'violated'}"]
    if rep.jacobi_ok:
        lines.append("jacobi: ok (d^2 = 0 on all generators)")
    else:
        bad = ", ".join(f"e^{m}" for m, _ in rep.jacobi_failures)
        lines.append(f"jacobi: violated (d^2 != 0 at {bad})")
    lines.append(f"nilpotency step: {rep.nilpotency_step}")
    lines.append(f"two-step: {rep.two_step}")
    lines.append(f"dim commutator: {rep.dim_commutator}")
    lines.append(f"dim center: {rep.dim_center}")
    machine = {"input": doc, "scalar_mode": mode, "validation": section}
    _emit(args, lines, machine)
    return EXIT_OK if rep.valid else EXIT_INVALID


def cmd_torsion(args) -> int:
    doc, L, g2, mode = _load(args)
    rep, vsection = _validation_section(L, args.tol)
    if not rep.valid:
        print("invalid Lie algebra; run validate for details", file=sys.stderr)
        return EXIT_INVALID
    tc, section = _torsion_section(L, g2, args.tol)
    lines = [f"scalar mode: {mode}",
             f"tau0: {section['tau0']}",
             f"mu: {section['mu']}",
             f"closed: {'yes' if tc.closed else 'no'}",
             f"coclosed: {'yes' if tc.coclosed else 'no'}",
             f"purely coclosed: {'yes' if tc.purely_coclosed else 'no'}",
             f"torsion-free: {'yes' if tc.torsion_free else 'no'}"]
    machine = {"input": doc, "scalar_mode": mode, "validation": vsection,
               "torsion": section}
    _emit(args, lines, machine)
    return EXIT_OK


def _residual_rows(report):
    rows = []
    for a in range(1, 8):
        for b in range(1, 8):
            norm = report.residuals[a - 1][b - 1].norm_l1()
            if norm != 0:
                rows.append({"alpha": a, "beta": b,
                             "norm": render_scalar(norm)})
    return rows


def cmd_instanton(args) -> int:
    doc, L, g2, mode = _load(args)
    rep, vsection = _validation_section(L, args.tol)
    if not rep.valid:
        print("invalid Lie algebra; run validate for details", file=sys.stderr)
        return EXIT_INVALID
    tc, tsection = _torsion_section(L, g2, args.tol)
    if not tc.tau2.is_zero(args.tol):
        print("no characteristic connection: tau2 != 0", file=sys.stderr)
        return EXIT_NO_CONNECTION
    lines = [f"scalar mode: {mode}"]
    section: dict = {}
    ok_everywhere = True
    if args.lam == "sweep":
        grid = list(DEFAULT_SWEEP_GRID)
        rows = lambda_sweep(L, g2, grid, args.tol)
        section["sweep"] = [
            {"lambda": render_scalar(lam),
             "max_residual": render_scalar(norm),
             "instanton": flag}
            for lam, norm, flag in rows]
        ok_everywhere = any(flag for _, _, flag in rows)
        lines.append("lambda sweep:")
        for lam, norm, flag in rows:
            lines.append(f"  lambda = {render_scalar(lam)}: "
                         f"{'INSTANTON' if flag else 'no'} "
                         f"(max residual {render_scalar(norm)})")
    else:
        lam = _parse_lambda(args.lam)
        if isinstance(lam, float) and mode == EXACT:
            L, g2 = L.to_float(), g2.to_float()
            lines.append("note: irrational parameter; run downgraded to "
                         "float mode")
        report = run_instanton(L, g2, lam, args.tol)
        ok_everywhere = report.is_instanton
        lines.append(f"lambda = {render_scalar(lam)}")
        lines.append(f"INSTANTON: {'yes' if report.is_instanton else 'no'}")
        lines.append(f"max residual norm: "
                     f"{render_scalar(report.max_residual_norm)}")
        residuals = _residual_rows(report)
        section["lambda"] = render_scalar(lam)
        section["instanton"] = report.is_instanton
        section["max_residual"] = render_scalar(report.max_residual_norm)
        section["group_norms"] = {k: render_scalar(v)
                                  for k, v in report.group_norms.items()}
        section["residuals"] = residuals
        if residuals:
            lines.append("nonzero residual components (alpha, beta, norm):")
            for row in residuals:
                lines.append(f"  ({row['alpha']},{row['beta']}): "
                             f"{row['norm']}")
    machine = {"input": doc, "scalar_mode": mode, "validation": vsection,
               "torsion": tsection, "instanton": section}
    _emit(args, lines, machine)
    if args.strict and not ok_everywhere:
        return EXIT_STRICT
    return EXIT_OK


def cmd_classify(args) -> int:
    doc, L, g2, mode = _load(args)
    rep, vsection = _validation_section(L, args.tol)
    if not rep.valid:
        print("invalid Lie algebra; run validate for details", file=sys.stderr)
        return EXIT_INVALID
    tc, tsection = _torsion_section(L, g2, args.tol)
    if not tc.tau2.is_zero(args.tol):
        print("no characteristic connection: tau2 != 0", file=sys.stderr)
        return EXIT_NO_CONNECTION
    result = classify(L, g2, args.tol)
    reductive = None
    if result.is_instanton:
        reductive = naturally_reductive_check(L, g2, args.tol)
    lines = [f"scalar mode: {mode}", f"case: {result.case}"]
    for k, v in result.parameters.items():
        lines.append(f"parameter {k} = {render_scalar(v)}")
    for note in result.notes:
        lines.append(f"note: {note}")
    if reductive is not None:
        lines.append(f"naturally reductive (parallel torsion and "
                     f"curvature): {reductive}")
    section = {
        "case": result.case,
        "parameters": {k: render_scalar(v)
                       for k, v in result.parameters.items()},
        "witness_basis": (matrix_to_json(result.witness_basis)
                          if result.witness_basis is not None else None),
        "mode": result.mode,
        "notes": list(result.notes),
    }
    machine = {"input": doc, "scalar_mode": mode, "validation": vsection,
               "torsion": tsection, "classification": section,
               "naturally_reductive": reductive}
    _emit(args, lines, machine)
    return EXIT_OK


def cmd_holonomy(args) -> int:
    doc, L, g2, mode = _load(args)
    rep, vsection = _validation_section(L, args.tol)
    if not rep.valid:
        print("invalid Lie algebra; run validate for details", file=sys.stderr)
        return EXIT_INVALID
    tc, tsection = _torsion_section(L, g2, args.tol)
    if not tc.tau2.is_zero(args.tol):
        print("no characteristic connection: tau2 != 0", file=sys.stderr)
        return EXIT_NO_CONNECTION
    lam = _parse_lambda(args.lam if args.lam != "sweep" else "1")
    C = nabla_lambda(L, g2, lam, args.tol)
    hol = holonomy_algebra(C, L, args.tol)
    lines = [f"scalar mode: {mode}",
             f"holonomy algebra dimension: {hol.dim}",
             f"killing form negative definite: "
             f"{hol.killing_negative_definite}"]
    section = {
        "lambda": render_scalar(lam),
        "dim": hol.dim,
        "killing_negative_definite": hol.killing_negative_definite,
        "bracket_table": [[[render_scalar(x) for x in row]
                           for row in plane] for plane in hol.bracket_table],
    }
    machine = {"input": doc, "scalar_mode": mode, "validation": vsection,
               "torsion": tsection, "holonomy": section}
    _emit(args, lines, machine)
    return EXIT_OK


def cmd_example(args) -> int:
    params = {}
    builder, argnames = FAMILY_BUILDERS[args.family]
    if len(args.params) != len(argnames):
        print(f"family {args.family} needs parameters {argnames}",
              file=sys.stderr)
        return EXIT_INVALID
    for name, raw in zip(argnames, args.params):
        params[name] = Fraction(raw)
    doc = family_document(args.family, params, expanded=args.expanded)
    payload = json.dumps(doc, indent=2, sort_keys=True)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilg2",
        description="Verify and classify instanton conditions for the "
                    "connection family of coclosed G2-structures on "
                    "7-dimensional 2-step nilpotent Lie algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="input document (JSON)")
        p.add_argument("--format", choices=["human", "machine"],
                       default="human")
        p.add_argument("--out", default=None,
                       help="write the report to a file instead of stdout")
        p.add_argument("--tol", type=float, default=None,
                       help="zero tolerance for float mode (default 1e-10)")

    p = sub.add_parser("validate", help="schema and Lie-structure checks")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("torsion", help="torsion forms and class flags")
    common(p)
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("instanton", help="instanton residual check")
    common(p)
    p.add_argument("--lambda", dest="lam", default="1",
                   help="connection parameter: fraction, decimal, "
                        "'cbrt4-1', or 'sweep'")
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when the check fails")
    p.set_defaults(func=cmd_instanton)

    p = sub.add_parser("classify", help="match against the normal forms")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("holonomy", help="holonomy algebra of the connection")
    common(p)
    p.add_argument("--lambda", dest="lam", default="1")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("example", help="emit an input file for a family")
    p.add_argument("family", choices=sorted(FAMILY_BUILDERS))
    p.add_argument("params", nargs="*", help="family parameters, in order")
    p.add_argument("--emit", default=None, help="output path")
    p.add_argument("--expanded", action="store_true",
                   help="write explicit bracket entries instead of the "
                        "family reference")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoCharacteristicConnection as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO_CONNECTION
    except (InputError, KindMismatch, NotCoclosed,
            NotPositiveThreeForm) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Nilg2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
