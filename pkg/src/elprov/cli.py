"""Command line front end.

Subcommands: normalize, saturate, entail, relevant, query, model,
rewrite. Exit codes: 0 entailed/success, 1 not entailed, 2 usage or
parse error, 3 resource cap exceeded. ``--json`` switches every
subcommand to machine-readable output validating against the schemas
shipped in ``elprov/schemas``. The environment variable
``ELPROV_MAX_AXIOMS`` overrides the derived-axiom cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .canonical import build_canonical_model, compute_rewriting, render_rewriting
from .completion import (
    CA,
    Limits,
    ResourceCapExceeded,
    entails_assertion,
    entails_gci,
    entails_iq,
    entails_ri,
    entails_rr,
    saturate,
)
from .interpretation import (
    QueryError,
    enumerate_matches,
    parse_query,
    provenance_of_matches,
)
from .ontology import (
    GCI,
    RA,
    RI,
    RR,
    AnnotatedOntology,
    ParseError,
    normalize,
    parse_axiom,
    parse_iq_target,
    parse_ontology,
    render_annotated,
)
from .provenance import parse_monomial, parse_polynomial, poly_contains
from .relevance import (
    merged_saturate,
    relevant_variables,
    relevant_variables_for_axiom,
    relevant_variables_for_iq,
)

EXIT_ENTAILED = 0
EXIT_NOT_ENTAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCES = 3


def _limits(args) -> Limits:
    cap = os.environ.get("ELPROV_MAX_AXIOMS")
    max_axioms = int(cap) if cap else 1_000_000
    return Limits(max_axioms=max_axioms)


def _load_ontology(path: str) -> AnnotatedOntology:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ontology(fh.read())


def _load_query(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_query(fh.read())


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _cmd_normalize(args) -> int:
    ontology = normalize(_load_ontology(args.input))
    lines = sorted(render_annotated(ann) for ann in ontology.axioms)
    if args.json:
        _emit_json(args, {"axioms": lines})
    else:
        _emit(args, "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_ENTAILED


def _cmd_saturate(args) -> int:
    ontology = normalize(_load_ontology(args.input))
    sat = saturate(ontology, k=args.k, limits=_limits(args), track_derivations=args.json)
    if args.json:
        _emit_json(args, sat.dump_json_obj())
    else:
        lines = sat.dump_lines()
        _emit(args, "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_ENTAILED


def _cmd_entail(args) -> int:
    ontology = _load_ontology(args.input)
    mon = parse_monomial(args.prov)
    limits = _limits(args)
    kind = args.kind
    if kind == "assertion":
        axiom = parse_axiom(args.axiom)
        if not isinstance(axiom, (CA, RA)):
            raise ValueError("--kind assertion expects a 'ca' or 'ra' axiom")
        entailed = entails_assertion(ontology, axiom, mon, limits)
    elif kind == "gci":
        axiom = parse_axiom(args.axiom)
        if not isinstance(axiom, GCI):
            raise ValueError("--kind gci expects a 'gci' axiom")
        entailed = entails_gci(ontology, axiom.lhs, axiom.rhs, mon, limits)
    elif kind == "ri":
        axiom = parse_axiom(args.axiom)
        if not isinstance(axiom, RI):
            raise ValueError("--kind ri expects an 'ri' axiom")
        entailed = entails_ri(ontology, axiom.sub, axiom.sup, mon, limits)
    elif kind == "rr":
        axiom = parse_axiom(args.axiom)
        if not isinstance(axiom, RR):
            raise ValueError("--kind rr expects an 'rr' axiom")
        entailed = entails_rr(ontology, axiom.role, axiom.filler, mon, limits)
    else:  # iq
        concept, ind = parse_iq_target(args.axiom)
        entailed = entails_iq(ontology, concept, ind, mon, limits)
    if args.json:
        _emit_json(
            args,
            {"kind": kind, "axiom": args.axiom, "prov": str(mon), "entailed": entailed},
        )
    else:
        _emit(args, ("entailed" if entailed else "not entailed") + "\n")
    return EXIT_ENTAILED if entailed else EXIT_NOT_ENTAILED


def _cmd_relevant(args) -> int:
    ontology = _load_ontology(args.input)
    text = args.axiom.strip()
    merged_annotation = None
    if text.startswith("iq"):
        concept, ind = parse_iq_target(text)
        variables = relevant_variables_for_iq(ontology, concept, ind)
    else:
        axiom = parse_axiom(text)
        if isinstance(axiom, (CA, RA)):
            variables = relevant_variables(ontology, axiom)
            merged = merged_saturate(normalize(ontology)).monomial(axiom)
            merged_annotation = str(merged) if merged is not None else None
        else:
            variables = relevant_variables_for_axiom(ontology, axiom)
    names = sorted(v.name for v in variables)
    if args.json:
        _emit_json(
            args,
            {"axiom": text, "relevant": names, "merged_annotation": merged_annotation},
        )
    else:
        _emit(args, "\n".join(names) + ("\n" if names else ""))
    return EXIT_ENTAILED


def _cmd_query(args) -> int:
    ontology = _load_ontology(args.input)
    query = _load_query(args.query)
    prov = parse_polynomial(args.prov)
    limits = _limits(args)
    interp = build_canonical_model(ontology, limits)
    conditions = compute_rewriting(query)
    ontology_vars = set(ontology.variables)
    foreign = any(v not in ontology_vars for v in prov.variables())
    matches = enumerate_matches(interp, query, conditions)
    provenance = provenance_of_matches(query, matches)
    entailed = bool(matches) and not foreign and poly_contains(prov, provenance)
    if args.json:
        _emit_json(
            args,
            {
                "query": str(query),
                "prov": str(prov),
                "entailed": entailed,
                "matches": len(matches),
                "query_provenance": str(provenance),
            },
        )
    else:
        _emit(args, ("entailed" if entailed else "not entailed") + "\n")
    return EXIT_ENTAILED if entailed else EXIT_NOT_ENTAILED


def _cmd_model(args) -> int:
    ontology = _load_ontology(args.input)
    interp = build_canonical_model(ontology, _limits(args))
    _emit_json(args, interp.to_json_obj())
    return EXIT_ENTAILED


def _cmd_rewrite(args) -> int:
    query = _load_query(args.query)
    conditions = compute_rewriting(query)
    if args.json:
        _emit_json(
            args,
            {
                "atoms": [str(a) for a in query.atoms],
                "classes": [sorted(str(t) for t in cls) for cls in conditions.classes],
                "cyc": sorted(str(v) for v in conditions.cyc),
                "forks": [
                    {
                        "pre": [str(t) for t in fork.pre],
                        "class": sorted(str(t) for t in fork.cls),
                        "representative": str(fork.representative),
                    }
                    for fork in conditions.forks
                ],
            },
        )
    else:
        _emit(args, render_rewriting(query, conditions))
    return EXIT_ENTAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elprov",
        description="Reasoner for ELHr ontologies annotated with semiring provenance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("-i", "--input", required=True, help="ontology file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("-o", "--output", help="write output to a file")

    p = sub.add_parser("normalize", help="print the normal form of an ontology")
    common(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("saturate", help="print the saturated axiom set")
    common(p)
    p.add_argument("--k", type=int, default=None, help="bound derived monomials to k variables")
    p.set_defaults(func=_cmd_saturate)

    p = sub.add_parser("entail", help="decide entailment of an annotated axiom")
    common(p)
    p.add_argument("--kind", required=True, choices=("assertion", "gci", "ri", "rr", "iq"))
    p.add_argument("--axiom", required=True, help="axiom in the ontology grammar, without '@'")
    p.add_argument("--prov", required=True, help="monomial, e.g. 'v1*v2' or '1'")
    p.set_defaults(func=_cmd_entail)

    p = sub.add_parser("relevant", help="relevant provenance variables of a consequence")
    common(p)
    p.add_argument("--axiom", required=True, help="target axiom (ca/ra/gci/ri/rr/iq form)")
    p.set_defaults(func=_cmd_relevant)

    p = sub.add_parser("query", help="decide entailment of an annotated Boolean query")
    common(p)
    p.add_argument("-q", "--query", required=True, help="query file")
    p.add_argument("--prov", required=True, help="polynomial, e.g. 'v1*v2 + 2 v1*v3' or '0'")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("model", help="dump the canonical model as JSON")
    common(p)
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("rewrite", help="print the rewritten query with side conditions")
    p.add_argument("-q", "--query", required=True, help="query file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-o", "--output", help="write output to a file")
    p.set_defaults(func=_cmd_rewrite)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_ENTAILED
    try:
        return args.func(args)
    except ParseError as exc:
        source = getattr(args, "input", None) or "<input>"
        print(f"{source}:{exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCES
    except (QueryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
