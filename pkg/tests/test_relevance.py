import random

import pytest

from elprov.completion import saturate
from elprov.ontology import (
    CA,
    GCI,
    RA,
    RI,
    RR,
    AnnotatedAxiom,
    Atomic,
    ExistsQ,
    normalize,
    parse_ontology,
)
from elprov.provenance import Monomial, Variable, parse_monomial
from elprov.relevance import (
    merged_saturate,
    relevant_for_axiom,
    relevant_for_iq,
    relevant_variables,
    relevant_variables_for_axiom,
    relevant_variables_for_iq,
)

from generators import random_normalized_ontology

MAYOR = """
ra mayor(Venice, Orsoni) @ v1
ra predecessor(Brugnaro, Orsoni) @ v2
gci some(predecessor, Mayor) <= Mayor @ v3
rr ran(mayor) <= Mayor @ v4
"""


def vset(*names):
    return frozenset(Variable(n) for n in names)


def blowup_ontology(n):
    lines = [f"gci A <= A{i} @ v{i}\ngci A{i} <= B @ u{i}" for i in range(1, n + 1)]
    lines.append("gci B <= A @ u")
    return parse_ontology("\n".join(lines))


class TestMergedSaturate:
    def test_initial_merge_of_same_axiom(self):
        merged = merged_saturate(parse_ontology("ca A(a) @ v1\nca A(a) @ v2"))
        assert merged.monomial(CA(Atomic("A"), "a")) == parse_monomial("v1*v2")

    def test_single_assertion(self):
        merged = merged_saturate(parse_ontology("ca A(a) @ v"))
        assert merged.monomial(CA(Atomic("A"), "a")) == parse_monomial("v")
        assert merged.monomial(GCI(Atomic("A"), Atomic("A"))) == Monomial()

    def test_blowup_every_entry_collapses(self):
        merged = merged_saturate(normalize(blowup_ontology(2)))
        m = parse_monomial("u*u1*u2*v1*v2")
        # every inclusion among the names carries the full merged monomial
        assert merged.entries
        for ax, mon in merged.entries.items():
            assert isinstance(ax, GCI)
            assert mon == m, f"{ax} carries {mon}"

    def test_update_counter_bound(self):
        rng = random.Random(3)
        for _ in range(40):
            o = normalize(random_normalized_ontology(rng))
            merged = merged_saturate(o)
            bound = len(merged.entries) * max(1, len(o.variables))
            assert merged.merge_updates <= bound


class TestRelevantVariables:
    def test_single_derivation(self):
        o = parse_ontology("ca A(a) @ u\ngci A <= B @ v")
        assert relevant_variables(o, CA(Atomic("B"), "a")) == vset("u", "v")

    def test_underivable_is_empty(self):
        o = parse_ontology("ca A(a) @ u")
        assert relevant_variables(o, CA(Atomic("B"), "a")) == frozenset()

    def test_mayor(self):
        o = parse_ontology(MAYOR)
        assert relevant_variables(o, CA(Atomic("Mayor"), "Brugnaro")) == vset(
            "v1", "v2", "v3", "v4"
        )

    def test_role_assertion_target(self):
        o = parse_ontology("ra R(a, b) @ v1\nri R <= S @ v2")
        assert relevant_variables(o, RA("S", "a", "b")) == vset("v1", "v2")

    def test_equals_union_over_full_saturation(self):
        rng = random.Random(9)
        for _ in range(60):
            o = normalize(random_normalized_ontology(rng))
            merged = merged_saturate(o)
            sat = saturate(o)
            assertions = {ann.axiom for ann in sat.assertions()}
            for axiom in assertions:
                union = frozenset(
                    v for mon in sat.monomials(axiom) for v in mon.vars
                )
                entry = merged.monomial(axiom)
                assert entry is not None
                assert frozenset(entry.vars) == union

    def test_monotone_under_axiom_addition(self):
        rng = random.Random(10)
        for _ in range(30):
            o1 = random_normalized_ontology(rng)
            o2 = o1.extended(random_normalized_ontology(rng).axioms)
            m1 = merged_saturate(normalize(o1))
            m2 = merged_saturate(normalize(o2))
            for ax, mon in m1.entries.items():
                grown = m2.monomial(ax)
                assert grown is not None
                assert set(mon.vars) <= set(grown.vars)


class TestRelevantForAxiom:
    def test_cycle_members_are_relevant(self):
        o = parse_ontology("gci A <= B @ v1\ngci B <= C @ v2\ngci C <= B @ v3")
        target = GCI(Atomic("A"), Atomic("B"))
        assert relevant_for_axiom(o, target, Variable("v2"))
        assert relevant_for_axiom(o, target, Variable("v3"))
        assert relevant_for_axiom(o, target, Variable("v1"))
        assert relevant_variables_for_axiom(o, target) == vset("v1", "v2", "v3")

    def test_disconnected_axiom_irrelevant(self):
        o = parse_ontology("gci A <= B @ v1\ngci C <= D @ v2")
        assert not relevant_for_axiom(o, GCI(Atomic("A"), Atomic("B")), Variable("v2"))

    def test_ri_relevance(self):
        o = parse_ontology("ri R <= S @ v1\nri S <= T @ v2")
        assert relevant_variables_for_axiom(o, RI("R", "T")) == vset("v1", "v2")
        assert relevant_variables_for_axiom(o, RI("T", "R")) == frozenset()

    def test_rr_relevance(self):
        o = parse_ontology("ri R <= S @ v1\nrr ran(S) <= A @ v2")
        assert relevant_variables_for_axiom(o, RR("R", "A")) == vset("v1", "v2")

    def test_rr_relevance_requires_range_route(self):
        o = parse_ontology("gci Top <= A @ v\nra R(a, b) @ u")
        assert relevant_variables_for_axiom(o, RR("R", "A")) == frozenset()

    def test_helper_variables_stripped(self):
        o = parse_ontology("gci A <= B @ v1")
        got = relevant_variables_for_axiom(o, GCI(Atomic("A"), Atomic("B")))
        assert got == vset("v1")


class TestRelevantForIq:
    def test_instance_query(self):
        o = parse_ontology(MAYOR)
        got = relevant_variables_for_iq(
            normalize(o), ExistsQ("predecessor", Atomic("Mayor")), "Brugnaro"
        )
        assert got == vset("v1", "v2", "v4")
        assert relevant_for_iq(normalize(o), ExistsQ("predecessor", Atomic("Mayor")), "Brugnaro", Variable("v2"))

    def test_unknown_individual(self):
        o = parse_ontology("ca A(a) @ v")
        assert relevant_variables_for_iq(o, Atomic("A"), "zz") == frozenset()
