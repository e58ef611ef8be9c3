"""Independent ground-chase oracle for annotated assertion entailment.

Builds the least annotated model of an ontology directly from its
assertions by forward-applying the axioms as model-construction rules;
no completion rules are involved, so this is a second, independent route
to the set of entailed assertions: a concept or role fact over named
individuals holds in the chased structure iff it is entailed.

Existential axioms attach anonymous successors; an anonymous element is
keyed by the role and monomial of the edge that creates it, and reused
for every parent needing the same kind of successor, which keeps the
chase finite without changing any fact about named individuals.

General (non-normalized, restricted-syntax) left-hand sides are
supported by evaluating them over the current structure, so the oracle
also checks that normalization preserves entailment.
"""

from __future__ import annotations

from dataclasses import dataclass

from elprov.ontology import (
    CA,
    GCI,
    RA,
    RI,
    RR,
    AnnotatedOntology,
    Atomic,
    Concept,
    Conj,
    Exists,
    ExistsQ,
    Top,
)
from elprov.provenance import ONE, Monomial


@dataclass(frozen=True)
class ChaseAux:
    role: str
    monomial: Monomial


class ChaseResult:
    def __init__(self, concept_facts, role_facts, individuals):
        # named facts only: (concept_name, ind, monomial) / (role, a, b, monomial)
        self.concept_facts = frozenset(concept_facts)
        self.role_facts = frozenset(role_facts)
        self.individuals = frozenset(individuals)

    def holds_ca(self, concept: str, ind: str, mon: Monomial) -> bool:
        return (concept, ind, mon) in self.concept_facts

    def holds_ra(self, role: str, a: str, b: str, mon: Monomial) -> bool:
        return (role, a, b, mon) in self.role_facts


def chase(ontology: AnnotatedOntology, max_rounds: int = 10_000) -> ChaseResult:
    individuals = set(ontology.individuals)
    domain: set = set(individuals)
    concepts: dict[str, set] = {}
    roles: dict[str, set] = {}

    def cpairs(name):
        return concepts.setdefault(name, set())

    def rtriples(name):
        return roles.setdefault(name, set())

    def eval_concept(c: Concept) -> set:
        if isinstance(c, Top):
            return {(d, ONE) for d in domain}
        if isinstance(c, Atomic):
            return set(cpairs(c.name))
        if isinstance(c, Exists):
            return {(d, m) for d, _, m in rtriples(c.role)}
        if isinstance(c, Conj):
            left = eval_concept(c.left)
            right = eval_concept(c.right)
            by_el: dict = {}
            for d, n in right:
                by_el.setdefault(d, []).append(n)
            return {(d, m * n) for d, m in left for n in by_el.get(d, ())}
        if isinstance(c, ExistsQ):
            filler = eval_concept(c.filler)
            by_el: dict = {}
            for e, n in filler:
                by_el.setdefault(e, []).append(n)
            return {
                (d, m * n)
                for d, e, m in rtriples(c.role)
                for n in by_el.get(e, ())
            }
        raise TypeError(f"unexpected concept {c!r}")

    for ann in ontology.axioms:
        ax = ann.axiom
        if isinstance(ax, CA) and isinstance(ax.concept, Atomic):
            cpairs(ax.concept.name).add((ax.ind, ann.annotation))
        elif isinstance(ax, RA):
            rtriples(ax.role).add((ax.a, ax.b, ann.annotation))

    tbox = [ann for ann in ontology.axioms if isinstance(ann.axiom, (GCI, RI, RR))]

    for _ in range(max_rounds):
        changed = False
        for ann in tbox:
            ax, v = ann.axiom, ann.annotation
            if isinstance(ax, RI):
                sup = rtriples(ax.sup)
                for d, e, m in list(rtriples(ax.sub)):
                    t = (d, e, v * m)
                    if t not in sup:
                        sup.add(t)
                        changed = True
            elif isinstance(ax, RR):
                target = cpairs(ax.filler)
                for _, e, m in list(rtriples(ax.role)):
                    p = (e, v * m)
                    if p not in target:
                        target.add(p)
                        changed = True
            elif isinstance(ax, GCI) and isinstance(ax.rhs, Atomic):
                target = cpairs(ax.rhs.name)
                for d, m in eval_concept(ax.lhs):
                    p = (d, v * m)
                    if p not in target:
                        target.add(p)
                        changed = True
            elif isinstance(ax, GCI) and isinstance(ax.rhs, Exists):
                triples = rtriples(ax.rhs.role)
                for d, m in eval_concept(ax.lhs):
                    vm = v * m
                    if any(dd == d and mm == vm for dd, _, mm in triples):
                        continue
                    succ = ChaseAux(ax.rhs.role, vm)
                    domain.add(succ)
                    triples.add((d, succ, vm))
                    changed = True
        if not changed:
            break
    else:
        raise RuntimeError("chase did not stabilize")

    concept_facts = {
        (name, d, m)
        for name, pairs in concepts.items()
        for d, m in pairs
        if d in individuals
    }
    role_facts = {
        (name, a, b, m)
        for name, triples in roles.items()
        for a, b, m in triples
        if a in individuals and b in individuals
    }
    return ChaseResult(concept_facts, role_facts, individuals)
