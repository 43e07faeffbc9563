"""Command-line interface.

Subcommands run individual analysis stages on a system-definition file (or,
for algebra-level commands, on a structure-constants JSON document), so each
part of the workbench is independently scriptable:

    liepde symmetries system.pde
    liepde structure system.pde            # or --constants algebra.json
    liepde adjoint system.pde
    liepde flows system.pde
    liepde invariants --order 2 system.pde
    liepde check-generator --field "0; x; 0; u; 0" system.pde
    liepde normal-form --vector "1,0,0,1,0" system.pde
    liepde verify-optimal --file table.json system.pde

Exit code 0 means no module error; discrepancy notes never fail a run.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import expr, optimal, parser, pipeline, reference, structure
from .errors import LiepdeError
from .fields import VectorField
from .prolongation import symmetry_residual


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        output = args.run(args)
    except (LiepdeError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output.decode())
    return 0


def _build_parser():
    top = argparse.ArgumentParser(
        prog="liepde",
        description="Exact Lie point symmetry analysis of polynomial PDE systems",
    )
    top.add_argument("--ansatz-degree", type=int, default=1,
                     help="polynomial degree of the symmetry ansatz (default 1)")
    top.add_argument("--report", choices=("text", "json"), default="text")
    top.add_argument("--out", help="write the report to a file instead of stdout")
    top.add_argument(
        "--reference", choices=("auto", "on", "off"), default="auto",
        help="compare against the bundled boundary-layer baseline "
             "(auto: only for the shipped fixture)",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, run, needs_system=True, **extra):
        p = sub.add_parser(name)
        if needs_system:
            p.add_argument("system", nargs="?",
                           help="system-definition file (defaults to the "
                                "shipped boundary-layer fixture)")
        for flag, kwargs in extra.items():
            p.add_argument(flag, **kwargs)
        p.set_defaults(run=run)
        return p

    add("symmetries", _cmd_full_report)
    p = add("structure", _cmd_structure)
    p.add_argument("--constants", help="structure-constants JSON document")
    add("adjoint", _cmd_full_report)
    add("flows", _cmd_full_report)
    p = add("invariants", _cmd_invariants)
    p.add_argument("--order", type=int, default=1)
    p = add("check-generator", _cmd_check_generator)
    p.add_argument("--field", required=True,
                   help="semicolon-separated coefficients, xi first then phi")
    p = add("normal-form", _cmd_normal_form)
    p.add_argument("--vector", required=True,
                   help="comma-separated rational coordinates")
    p.add_argument("--constants", help="structure-constants JSON document")
    p = add("verify-optimal", _cmd_verify_optimal)
    p.add_argument("--file", required=True,
                   help="JSON table of subalgebra entries")
    p.add_argument("--constants", help="structure-constants JSON document")
    return top


def _load_document(args):
    path = getattr(args, "system", None)
    if path:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = reference.fixture_text()
    return parser.parse_system(text)


def _use_reference(args):
    return {"auto": None, "on": True, "off": False}[args.reference]


def _run(args, invariant_order=1):
    doc = _load_document(args)
    return pipeline.run_pipeline(
        doc,
        ansatz_degree=args.ansatz_degree,
        invariant_order=invariant_order,
        use_reference=_use_reference(args),
    )


def _cmd_full_report(args):
    report = _run(args)
    return pipeline.emit(report, args.report)


def _cmd_invariants(args):
    report = _run(args, invariant_order=args.order)
    return pipeline.emit(report, args.report)


def _cmd_structure(args):
    if getattr(args, "constants", None):
        with open(args.constants, encoding="utf-8") as fh:
            doc = json.load(fh)
        L = structure.algebra_from_json(doc)
        out = {
            "schema": pipeline.SCHEMA_VERSION,
            "labels": list(L.labels),
            "commutators_pretty": [
                [
                    L.format_vector(
                        L.bracket_coords(
                            pipeline._unit(L.n, i), pipeline._unit(L.n, j)
                        )
                    )
                    for j in range(L.n)
                ]
                for i in range(L.n)
            ],
            "killing": [
                [pipeline.jfrac(c) for c in row]
                for row in structure.killing_form(L)
            ],
            "solvable": structure.is_solvable(L),
            "semisimple": structure.is_semisimple(L),
            "derived_dimensions": [
                s.dim for s in structure.derived_series(L)
            ],
        }
        if args.report == "json":
            return (json.dumps(out, indent=2) + "\n").encode()
        lines = [f"algebra on {', '.join(out['labels'])}"]
        for label, row in zip(out["labels"], out["commutators_pretty"]):
            lines.append(f"  {label}: " + "  ".join(row))
        lines.append(f"solvable: {out['solvable']}  semisimple: {out['semisimple']}")
        lines.append("derived dims: " + " > ".join(map(str, out["derived_dimensions"])))
        return ("\n".join(lines) + "\n").encode()
    return _cmd_full_report(args)


def _cmd_check_generator(args):
    doc = _load_document(args)
    space, system = parser.build_system(doc)
    pieces = [p.strip() for p in args.field.split(";")]
    expected = space.p + space.q
    if len(pieces) != expected:
        raise LiepdeError(
            f"--field needs {expected} coefficients "
            f"({space.p} xi then {space.q} phi), got {len(pieces)}"
        )
    coeffs = [parser.parse_expression(p, doc) for p in pieces]
    vf = VectorField(space, tuple(coeffs[: space.p]), tuple(coeffs[space.p:]))
    residuals = symmetry_residual(vf, system)
    ok = all(expr.is_zero(r) for r in residuals)
    out = {
        "schema": pipeline.SCHEMA_VERSION,
        "field": pipeline.field_json(vf, space),
        "residuals": [expr.render(r) for r in residuals],
        "is_symmetry": ok,
    }
    if args.report == "json":
        return (json.dumps(out, indent=2) + "\n").encode()
    lines = [f"field: {vf}"]
    for eq, r in zip(system.equations, residuals):
        lines.append(f"  residual of [{expr.render(eq)} = 0]: {r}")
    lines.append(f"symmetry: {ok}")
    return ("\n".join(lines) + "\n").encode()


def _algebra_for(args):
    if getattr(args, "constants", None):
        with open(args.constants, encoding="utf-8") as fh:
            return structure.algebra_from_json(json.load(fh))
    doc = _load_document(args)
    report_ref = _use_reference(args)
    if report_ref is None:
        report_ref = pipeline.detect_reference(doc)
    space, system = parser.build_system(doc)
    if report_ref:
        gens = reference.generators(space)
        return structure.structure_constants(
            gens, labels=[f"v{i + 1}" for i in range(5)]
        )
    from .prolongation import build_determining, solve_determining

    basis = solve_determining(build_determining(system, args.ansatz_degree))
    return structure.structure_constants(
        basis, labels=[f"g{i + 1}" for i in range(len(basis))]
    )


def _cmd_normal_form(args):
    L = _algebra_for(args)
    vec = [Fraction(x.strip()) for x in args.vector.split(",")]
    if len(vec) != L.n:
        raise LiepdeError(f"vector needs {L.n} coordinates, got {len(vec)}")
    r = optimal.normal_form_1d(L, vec)
    out = {
        "schema": pipeline.SCHEMA_VERSION,
        "input": [pipeline.jfrac(x) for x in r.input],
        "output": [pipeline.jfrac(x) for x in r.output],
        "output_pretty": L.format_vector(r.output),
        "negated": r.negated,
        "fingerprint_components": [L.labels[j] for j in r.fingerprint_indices],
        "fingerprint": [pipeline.jfrac(x) for x in r.fingerprint()],
        "steps": [
            {
                "kind": s.kind,
                "direction": L.labels[s.index],
                "parameter": pipeline.jfrac(s.parameter),
                "after": [pipeline.jfrac(x) for x in s.after],
            }
            for s in r.steps
        ],
    }
    if args.report == "json":
        return (json.dumps(out, indent=2) + "\n").encode()
    lines = [
        f"input:  {L.format_vector(r.input)}",
        f"output: {out['output_pretty']}" + ("  (negated)" if r.negated else ""),
        f"fingerprint ({', '.join(out['fingerprint_components'])}): "
        f"({', '.join(out['fingerprint'])})",
    ]
    for s in r.steps:
        lines.append(f"  step: {s.describe(L)} -> {L.format_vector(s.after)}")
    return ("\n".join(lines) + "\n").encode()


def _cmd_verify_optimal(args):
    L = _algebra_for(args)
    with open(args.file, encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = []
    for item in doc["entries"]:
        vectors = [
            [Fraction(x) for x in vec] for vec in item["vectors"]
        ]
        entries.append((item["label"], vectors))
    results, collisions = optimal.verify_optimal_table(L, entries)
    out = {
        "schema": pipeline.SCHEMA_VERSION,
        "entries": [
            {
                "label": r.label,
                "dimension": r.dim,
                "closed": r.closed,
                "abelian": r.abelian,
                "ideal": r.ideal,
                "derived_intersection_dim": r.derived_intersection_dim,
            }
            for r in results
        ],
        "fingerprint_collisions": collisions,
    }
    if args.report == "json":
        return (json.dumps(out, indent=2) + "\n").encode()
    lines = []
    for r in results:
        flags = ["closed" if r.closed else "NOT CLOSED"]
        if r.abelian:
            flags.append("abelian")
        if r.ideal:
            flags.append("ideal")
        lines.append(f"{r.label}: dim {r.dim} [{', '.join(flags)}]")
    return ("\n".join(lines) + "\n").encode()


if __name__ == "__main__":
    sys.exit(main())
