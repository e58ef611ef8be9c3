"""Relevant provenance variables via merged-monomial saturation.

Instead of keeping every derived monomial apart, the relevance algorithm
keeps a single monomial per axiom and unions in the variables of every
new derivation. A variable is relevant for an atomic assertion exactly
when it occurs in that assertion's merged monomial, and the merged set
is computed in polynomial time because each axiom's monomial can only
grow towards the full variable set of the ontology.

Relevance for inclusion axioms and instance queries goes through the
same probe reductions as the entailment operations; the probes' reserved
helper variables are stripped from the reported sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .completion import (
    FreshVarSupply,
    Limits,
    build_concept_probe,
    merged_saturation_store,
)
from .ontology import (
    CA,
    GCI,
    RA,
    RI,
    RR,
    AnnotatedAxiom,
    AnnotatedOntology,
    Atomic,
    Axiom,
    Concept,
    Exists,
    ExistsQ,
    FreshNames,
    TOP,
    normalize,
    render_axiom,
)
from .provenance import ONE, Monomial, Variable

__all__ = [
    "MergedSet",
    "merged_saturate",
    "relevant_variables",
    "relevant_for_axiom",
    "relevant_variables_for_axiom",
    "relevant_for_iq",
    "relevant_variables_for_iq",
]


@dataclass(frozen=True)
class MergedSet:
    """Saturated axiom -> merged monomial mapping, plus update statistics."""

    entries: dict[Axiom, Monomial]
    merge_updates: int

    def monomial(self, axiom: Axiom) -> Monomial | None:
        return self.entries.get(axiom)

    def __len__(self) -> int:
        return len(self.entries)

    def dump_json_obj(self) -> dict:
        rows = [
            {"axiom": render_axiom(ax), "merged": str(mon)}
            for ax, mon in sorted(self.entries.items(), key=lambda kv: render_axiom(kv[0]))
        ]
        return {"size": len(rows), "entries": rows, "merge_updates": self.merge_updates}


def merged_saturate(
    ontology: AnnotatedOntology,
    *,
    limits: Limits | None = None,
    disabled_rules=(),
) -> MergedSet:
    """Saturate a normal-form ontology under the merge-update policy.

    Initialization already merges multiple annotations of one axiom into
    a single monomial; every rule application then either inserts a new
    axiom or grows an existing axiom's monomial.
    """
    entries, stats = merged_saturation_store(
        ontology, disabled_rules=disabled_rules, limits=limits
    )
    return MergedSet(entries=entries, merge_updates=stats.merge_updates)


def _strip_helpers(variables) -> frozenset[Variable]:
    return frozenset(v for v in variables if not v.name.startswith("__"))


def relevant_variables(ontology: AnnotatedOntology, assertion: Axiom) -> frozenset[Variable]:
    """Variables relevant for an atomic assertion (empty if underivable)."""
    if not isinstance(assertion, (CA, RA)):
        raise TypeError(f"expected an atomic assertion, got {assertion!r}")
    merged = merged_saturate(normalize(ontology))
    mon = merged.monomial(assertion)
    return frozenset(mon.vars) if mon is not None else frozenset()


def _merged_entry_vars(
    ontology: AnnotatedOntology,
    extra: list[AnnotatedAxiom],
    target: Axiom,
    required: Variable | None = None,
) -> frozenset[Variable]:
    merged = merged_saturate(normalize(ontology.extended(extra)))
    mon = merged.monomial(target)
    if mon is None:
        return frozenset()
    if required is not None and not mon.mentions(required):
        return frozenset()
    return _strip_helpers(mon.vars)


def relevant_variables_for_axiom(
    ontology: AnnotatedOntology, axiom: Axiom
) -> frozenset[Variable]:
    """Relevant variables for a GCI, role inclusion or range restriction."""
    fresh = FreshNames(ontology.all_names())
    if isinstance(axiom, GCI):
        target = Atomic(fresh.named("__e"))
        rhs = axiom.rhs
        rhs_probe: Concept = ExistsQ(rhs.role, TOP) if isinstance(rhs, Exists) else rhs
        extra = [AnnotatedAxiom(GCI(rhs_probe, target), ONE)]
        supply = FreshVarSupply(ontology.all_names() | {target.name})
        root = fresh.named("__a")
        facts = build_concept_probe(axiom.lhs, root, supply)
        if not facts:
            facts = [AnnotatedAxiom(CA(TOP, root), ONE)]
        extra.extend(facts)
        return _merged_entry_vars(ontology, extra, CA(target, root))
    if isinstance(axiom, RI):
        a, b = fresh.individual(), fresh.individual()
        extra = [AnnotatedAxiom(RA(axiom.sub, a, b), ONE)]
        return _merged_entry_vars(ontology, extra, RA(axiom.sup, a, b))
    if isinstance(axiom, RR):
        a, b = fresh.individual(), fresh.individual()
        w = fresh.variable()
        extra = [AnnotatedAxiom(RA(axiom.role, a, b), Monomial((w,)))]
        return _merged_entry_vars(
            ontology, extra, CA(Atomic(axiom.filler), b), required=w
        )
    raise TypeError(f"expected a GCI, RI or RR, got {axiom!r}")


def relevant_for_axiom(ontology: AnnotatedOntology, axiom: Axiom, v: Variable) -> bool:
    return v in relevant_variables_for_axiom(ontology, axiom)


def relevant_variables_for_iq(
    ontology: AnnotatedOntology, concept: Concept, ind: str
) -> frozenset[Variable]:
    """Relevant variables for an instance query concept(ind)."""
    if ind not in ontology.individuals:
        return frozenset()
    fresh = FreshNames(ontology.all_names())
    target = Atomic(fresh.named("__iq"))
    extra = [AnnotatedAxiom(GCI(concept, target), ONE)]
    return _merged_entry_vars(ontology, extra, CA(target, ind))


def relevant_for_iq(
    ontology: AnnotatedOntology, concept: Concept, ind: str, v: Variable
) -> bool:
    return v in relevant_variables_for_iq(ontology, concept, ind)
