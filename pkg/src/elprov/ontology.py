"""Annotated ELHr ontologies: AST, parser, printer and normalizer.

The ontology language is a restricted ELHr: left-hand sides of concept
inclusions follow ``C ::= A | some(R, C) | and(C, C) | Top`` while
right-hand sides are atomic or unqualified existentials
(``D ::= A | some(R)``). Role inclusions, range restrictions and atomic
assertions complete the axiom sorts. Every axiom carries a provenance
annotation; in input files the annotation is a single variable or ``1``,
while derived axiom sets may carry arbitrary monomials.

File grammar (UTF-8, line oriented, ``#`` comments):

    concept := 'Top' | NAME | 'and(' concept ',' concept ')'
             | 'some(' NAME ',' concept ')' | 'some(' NAME ')'
    line    := 'gci' concept '<=' concept '@' annot
             | 'ri' NAME '<=' NAME '@' annot
             | 'rr ran(' NAME ') <=' NAME '@' annot
             | 'ca' NAME '(' NAME ')' '@' annot
             | 'ra' NAME '(' NAME ',' NAME ')' '@' annot
    annot   := NAME | '1'

Names beginning with ``__`` are reserved for internally generated
symbols and rejected in user input.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .provenance import ONE, Monomial, Variable

__all__ = [
    "Concept",
    "Top",
    "TOP",
    "Atomic",
    "Conj",
    "Exists",
    "ExistsQ",
    "Ran",
    "Axiom",
    "GCI",
    "RI",
    "RR",
    "CA",
    "RA",
    "AnnotatedAxiom",
    "AnnotatedOntology",
    "Signature",
    "FreshNames",
    "ParseError",
    "NamespaceError",
    "parse_ontology",
    "parse_axiom",
    "parse_iq_target",
    "normalize",
    "translate_general_gci",
    "signature",
    "render_concept",
    "render_axiom",
    "render_annotated",
    "is_atomic_or_top",
]

RESERVED_PREFIX = "__"


class ParseError(ValueError):
    """Syntax or well-formedness error with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class NamespaceError(ValueError):
    """A name is used in more than one of the disjoint namespaces."""


# --- concepts -------------------------------------------------------------


class Concept:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Concept):
    def __str__(self) -> str:
        return "Top"


TOP = Top()


@dataclass(frozen=True)
class Atomic(Concept):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Conj(Concept):
    left: Concept
    right: Concept

    def __str__(self) -> str:
        return f"and({self.left}, {self.right})"


@dataclass(frozen=True)
class Exists(Concept):
    role: str

    def __str__(self) -> str:
        return f"some({self.role})"


@dataclass(frozen=True)
class ExistsQ(Concept):
    role: str
    filler: Concept

    def __str__(self) -> str:
        return f"some({self.role}, {self.filler})"


@dataclass(frozen=True)
class Ran(Concept):
    """Range of a role; usable as an evaluable concept, not in GCIs."""

    role: str

    def __str__(self) -> str:
        return f"ran({self.role})"


def is_atomic_or_top(c: Concept) -> bool:
    return isinstance(c, (Atomic, Top))


def _check_lhs_grammar(c: Concept) -> bool:
    if isinstance(c, (Atomic, Top)):
        return True
    if isinstance(c, Conj):
        return _check_lhs_grammar(c.left) and _check_lhs_grammar(c.right)
    if isinstance(c, ExistsQ):
        return _check_lhs_grammar(c.filler)
    return False


def _check_rhs_grammar(c: Concept) -> bool:
    return isinstance(c, (Atomic, Exists))


# --- axioms ---------------------------------------------------------------


class Axiom:
    __slots__ = ()


@dataclass(frozen=True)
class GCI(Axiom):
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True)
class RI(Axiom):
    sub: str
    sup: str


@dataclass(frozen=True)
class RR(Axiom):
    role: str
    filler: str


@dataclass(frozen=True)
class CA(Axiom):
    concept: Concept  # Atomic, or Top in derived sets
    ind: str


@dataclass(frozen=True)
class RA(Axiom):
    role: str
    a: str
    b: str


@dataclass(frozen=True)
class AnnotatedAxiom:
    axiom: Axiom
    annotation: Monomial

    def __str__(self) -> str:
        return render_annotated(self)


def render_concept(c: Concept) -> str:
    return str(c)


def render_axiom(ax: Axiom) -> str:
    if isinstance(ax, GCI):
        return f"gci {ax.lhs} <= {ax.rhs}"
    if isinstance(ax, RI):
        return f"ri {ax.sub} <= {ax.sup}"
    if isinstance(ax, RR):
        return f"rr ran({ax.role}) <= {ax.filler}"
    if isinstance(ax, CA):
        return f"ca {ax.concept}({ax.ind})"
    if isinstance(ax, RA):
        return f"ra {ax.role}({ax.a}, {ax.b})"
    raise TypeError(f"not an axiom: {ax!r}")


def render_annotated(ann: AnnotatedAxiom) -> str:
    return f"{render_axiom(ann.axiom)} @ {ann.annotation}"


def _concept_names(c: Concept) -> Iterator[str]:
    if isinstance(c, Atomic):
        yield c.name
    elif isinstance(c, Conj):
        yield from _concept_names(c.left)
        yield from _concept_names(c.right)
    elif isinstance(c, ExistsQ):
        yield from _concept_names(c.filler)


def _role_names(c: Concept) -> Iterator[str]:
    if isinstance(c, (Exists, Ran)):
        yield c.role
    elif isinstance(c, ExistsQ):
        yield c.role
        yield from _role_names(c.filler)
    elif isinstance(c, Conj):
        yield from _role_names(c.left)
        yield from _role_names(c.right)


def _mentions_top(c: Concept) -> bool:
    if isinstance(c, Top):
        return True
    if isinstance(c, Conj):
        return _mentions_top(c.left) or _mentions_top(c.right)
    if isinstance(c, ExistsQ):
        return _mentions_top(c.filler)
    return False


@dataclass(frozen=True)
class Signature:
    concepts: tuple[str, ...]
    roles: tuple[str, ...]
    individuals: tuple[str, ...]
    variables: tuple[Variable, ...]


class AnnotatedOntology:
    """An immutable, deduplicated set of annotated axioms.

    Construction validates the GCI grammar (restricted right-hand sides)
    and the mutual disjointness of the concept/role/individual/variable
    namespaces.
    """

    __slots__ = ("axioms", "_sig", "_top_occurs", "_axiom_set")

    def __init__(self, axioms: Iterable[AnnotatedAxiom]):
        seen: dict[AnnotatedAxiom, None] = {}
        for ann in axioms:
            if not isinstance(ann, AnnotatedAxiom):
                raise TypeError(f"expected AnnotatedAxiom, got {ann!r}")
            seen.setdefault(ann, None)
        self.axioms: tuple[AnnotatedAxiom, ...] = tuple(seen)
        self._axiom_set = frozenset(self.axioms)
        self._sig, self._top_occurs = self._validate()

    def _validate(self) -> tuple[Signature, bool]:
        kinds: dict[str, str] = {}
        concepts: set[str] = set()
        roles: set[str] = set()
        inds: set[str] = set()
        variables: set[Variable] = set()
        top = False

        def claim(name: str, kind: str) -> None:
            prev = kinds.setdefault(name, kind)
            if prev != kind:
                raise NamespaceError(f"name {name!r} used both as {prev} and as {kind}")
            {"concept": concepts, "role": roles, "individual": inds}[kind].add(name)

        for ann in self.axioms:
            ax = ann.axiom
            if isinstance(ax, GCI):
                if not _check_lhs_grammar(ax.lhs):
                    raise ValueError(f"GCI left-hand side violates the concept grammar: {ax.lhs}")
                if not _check_rhs_grammar(ax.rhs):
                    raise ValueError(
                        f"GCI right-hand side must be atomic or some(R): {ax.rhs}"
                    )
                for side in (ax.lhs, ax.rhs):
                    for n in _concept_names(side):
                        claim(n, "concept")
                    for n in _role_names(side):
                        claim(n, "role")
                    top = top or _mentions_top(side)
            elif isinstance(ax, RI):
                claim(ax.sub, "role")
                claim(ax.sup, "role")
            elif isinstance(ax, RR):
                claim(ax.role, "role")
                claim(ax.filler, "concept")
            elif isinstance(ax, CA):
                if isinstance(ax.concept, Atomic):
                    claim(ax.concept.name, "concept")
                elif isinstance(ax.concept, Top):
                    top = True
                else:
                    raise ValueError(f"assertions must use atomic concepts: {ax.concept}")
                claim(ax.ind, "individual")
            elif isinstance(ax, RA):
                claim(ax.role, "role")
                claim(ax.a, "individual")
                claim(ax.b, "individual")
            else:
                raise TypeError(f"unknown axiom kind: {ax!r}")
            variables.update(ann.annotation.vars)

        for v in variables:
            if v.name in kinds:
                raise NamespaceError(
                    f"name {v.name!r} used both as {kinds[v.name]} and as provenance variable"
                )
        sig = Signature(
            concepts=tuple(sorted(concepts)),
            roles=tuple(sorted(roles)),
            individuals=tuple(sorted(inds)),
            variables=tuple(sorted(variables)),
        )
        return sig, top

    # -- views ------------------------------------------------------------

    @property
    def concept_names(self) -> tuple[str, ...]:
        return self._sig.concepts

    @property
    def role_names(self) -> tuple[str, ...]:
        return self._sig.roles

    @property
    def individuals(self) -> tuple[str, ...]:
        return self._sig.individuals

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._sig.variables

    @property
    def top_occurs(self) -> bool:
        return self._top_occurs

    def all_names(self) -> set[str]:
        out = set(self._sig.concepts) | set(self._sig.roles) | set(self._sig.individuals)
        out.update(v.name for v in self._sig.variables)
        return out

    def __iter__(self) -> Iterator[AnnotatedAxiom]:
        return iter(self.axioms)

    def __len__(self) -> int:
        return len(self.axioms)

    def __contains__(self, ann: AnnotatedAxiom) -> bool:
        return ann in self._axiom_set

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AnnotatedOntology) and self._axiom_set == other._axiom_set

    def __hash__(self) -> int:
        return hash(self._axiom_set)

    def extended(self, extra: Iterable[AnnotatedAxiom]) -> "AnnotatedOntology":
        return AnnotatedOntology(list(self.axioms) + list(extra))

    def is_normal_form(self) -> bool:
        return all(
            _is_normal_gci(ann.axiom) for ann in self.axioms if isinstance(ann.axiom, GCI)
        )

    def render(self) -> str:
        return "\n".join(render_annotated(ann) for ann in self.axioms) + ("\n" if self.axioms else "")

    def __repr__(self) -> str:
        return f"AnnotatedOntology({len(self.axioms)} axioms)"


def signature(ontology: AnnotatedOntology) -> Signature:
    return ontology._sig


def _is_normal_gci(ax: GCI) -> bool:
    lhs, rhs = ax.lhs, ax.rhs
    if isinstance(rhs, Atomic):
        if is_atomic_or_top(lhs):
            return True
        if isinstance(lhs, Conj):
            return is_atomic_or_top(lhs.left) and is_atomic_or_top(lhs.right)
        if isinstance(lhs, ExistsQ):
            return is_atomic_or_top(lhs.filler)
        return False
    if isinstance(rhs, Exists):
        return is_atomic_or_top(lhs)
    return False


# --- fresh names ----------------------------------------------------------


class FreshNames:
    """Deterministic supply of reserved (``__``-prefixed) fresh names."""

    def __init__(self, used: Iterable[str] = ()):
        self._used = set(used)
        self._counters: dict[str, int] = {}

    @classmethod
    def for_ontology(cls, ontology: AnnotatedOntology) -> "FreshNames":
        return cls(ontology.all_names())

    def _next(self, prefix: str) -> str:
        n = self._counters.get(prefix, 0)
        while True:
            name = f"{prefix}{n}"
            n += 1
            if name not in self._used:
                self._counters[prefix] = n
                self._used.add(name)
                return name

    def named(self, prefix: str) -> str:
        """Fresh name with a caller-chosen reserved prefix."""
        if not prefix.startswith(RESERVED_PREFIX):
            raise ValueError(f"fresh names must use the {RESERVED_PREFIX!r} prefix")
        return self._next(prefix)

    def concept(self) -> str:
        return self._next("__nf")

    def role(self) -> str:
        return self._next("__role")

    def individual(self) -> str:
        return self._next("__ind")

    def variable(self) -> Variable:
        return Variable(self._next("__var"))


# --- normalization --------------------------------------------------------


def normalize(ontology: AnnotatedOntology, fresh: FreshNames | None = None) -> AnnotatedOntology:
    """Rewrite all GCIs into normal form.

    The three rewrite steps replace a non-atomic conjunct, a non-atomic
    existential filler, or a non-atomic lhs of an unqualified existential
    by a fresh concept name defined with annotation 1. Fresh names are
    memoized per concept structure so repeated subconcepts share one
    definition, and already-normal ontologies pass through unchanged.
    """
    fresh = fresh or FreshNames.for_ontology(ontology)
    memo: dict[Concept, Atomic] = {}
    out: list[AnnotatedAxiom] = []
    work: deque[AnnotatedAxiom] = deque(ontology.axioms)

    def name_for(c: Concept) -> Atomic:
        a = memo.get(c)
        if a is None:
            a = Atomic(fresh.concept())
            memo[c] = a
            work.append(AnnotatedAxiom(GCI(c, a), ONE))
        return a

    while work:
        ann = work.popleft()
        ax = ann.axiom
        if not isinstance(ax, GCI):
            out.append(ann)
            continue
        lhs, rhs = ax.lhs, ax.rhs
        if is_atomic_or_top(lhs):
            out.append(ann)
        elif isinstance(lhs, Conj):
            if not is_atomic_or_top(lhs.right):
                replaced = Conj(lhs.left, name_for(lhs.right))
                work.append(AnnotatedAxiom(GCI(replaced, rhs), ann.annotation))
            elif not is_atomic_or_top(lhs.left):
                replaced = Conj(name_for(lhs.left), lhs.right)
                work.append(AnnotatedAxiom(GCI(replaced, rhs), ann.annotation))
            elif isinstance(rhs, Exists):
                work.append(AnnotatedAxiom(GCI(name_for(lhs), rhs), ann.annotation))
            else:
                out.append(ann)
        elif isinstance(lhs, ExistsQ):
            if not is_atomic_or_top(lhs.filler):
                replaced = ExistsQ(lhs.role, name_for(lhs.filler))
                work.append(AnnotatedAxiom(GCI(replaced, rhs), ann.annotation))
            elif isinstance(rhs, Exists):
                work.append(AnnotatedAxiom(GCI(name_for(lhs), rhs), ann.annotation))
            else:
                out.append(ann)
        else:
            raise ValueError(f"cannot normalize GCI with left-hand side {lhs}")
    return AnnotatedOntology(out)


def _strip_top(c: Concept) -> Concept:
    """Drop redundant Top conjuncts/fillers; preserves annotated extensions."""
    if isinstance(c, Conj):
        left, right = _strip_top(c.left), _strip_top(c.right)
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return Conj(left, right)
    if isinstance(c, ExistsQ):
        filler = _strip_top(c.filler)
        return Exists(c.role) if isinstance(filler, Top) else ExistsQ(c.role, filler)
    return c


def translate_general_gci(
    lhs: Concept,
    rhs: Concept,
    annotation: Monomial,
    fresh: FreshNames,
) -> list[AnnotatedAxiom]:
    """Translate a GCI with an unrestricted right-hand side.

    Conjunctions on the right are split (same annotation on every part);
    a qualified existential ``some(R, C)`` becomes ``some(S)`` for a fresh
    subrole ``S`` of ``R`` whose range is bounded by ``C``. A non-atomic
    range bound goes through a fresh concept name so the result stays in
    the restricted syntax. ``Top`` as (part of) the right-hand side is
    dropped where it is extensionally redundant and rejected otherwise,
    since an annotated inclusion into Top constrains annotations to 1.
    """
    if not _check_lhs_grammar(lhs):
        raise ValueError(f"left-hand side violates the concept grammar: {lhs}")
    out: list[AnnotatedAxiom] = []
    seen: set[AnnotatedAxiom] = set()

    def emit(ann: AnnotatedAxiom) -> None:
        if ann not in seen:
            seen.add(ann)
            out.append(ann)

    def walk(left: Concept, right: Concept) -> None:
        right = _strip_top(right)
        if isinstance(right, Top):
            raise ValueError(
                "Top on the right-hand side of an annotated GCI is not translatable"
            )
        if isinstance(right, Conj):
            walk(left, right.left)
            walk(left, right.right)
        elif isinstance(right, ExistsQ):
            s = fresh.role()
            emit(AnnotatedAxiom(GCI(left, Exists(s)), annotation))
            emit(AnnotatedAxiom(RI(s, right.role), annotation))
            filler = right.filler
            if isinstance(filler, Atomic):
                emit(AnnotatedAxiom(RR(s, filler.name), annotation))
            else:
                bridge = fresh.concept()
                emit(AnnotatedAxiom(RR(s, bridge), annotation))
                walk(Atomic(bridge), filler)
        else:
            emit(AnnotatedAxiom(GCI(left, right), annotation))

    walk(lhs, rhs)
    return out


# --- parser ---------------------------------------------------------------

_LINE_TOKEN = re.compile(r"[ \t]*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<one>1)|(?P<le><=)|(?P<punct>[(),@*]))")

_CONCEPT_KEYWORDS = {"Top", "and", "some", "ran"}


class _LineParser:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.lineno = lineno
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(line):
            m = _LINE_TOKEN.match(line, pos)
            if not m:
                rest = line[pos:].strip()
                if not rest:
                    break
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                raise ParseError(f"unexpected character {rest[0]!r}", lineno, col)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def error(self, message: str) -> ParseError:
        col = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.line) + 1
        return ParseError(message, self.lineno, col)

    def peek(self) -> tuple[str, str] | None:
        if self.i < len(self.tokens):
            kind, value, _ = self.tokens[self.i]
            return kind, value
        return None

    def take(self, kind: str, value: str | None = None) -> str:
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] if tok else "end of line"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok[1]

    def name(self, what: str, allow_keywords: bool = True) -> str:
        tok = self.peek()
        if tok is None or tok[0] != "name":
            got = tok[1] if tok else "end of line"
            raise self.error(f"expected {what}, got {got!r}")
        if not allow_keywords and tok[1] in _CONCEPT_KEYWORDS:
            raise self.error(f"expected {what}, got keyword {tok[1]!r}")
        if tok[1].startswith(RESERVED_PREFIX):
            raise self.error(f"names starting with {RESERVED_PREFIX!r} are reserved: {tok[1]!r}")
        self.i += 1
        return tok[1]

    def concept(self) -> Concept:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a concept")
        kind, value = tok
        if kind != "name":
            raise self.error(f"expected a concept, got {value!r}")
        if value == "Top":
            self.i += 1
            return TOP
        if value == "and":
            self.i += 1
            self.take("punct", "(")
            left = self.concept()
            self.take("punct", ",")
            right = self.concept()
            self.take("punct", ")")
            return Conj(left, right)
        if value == "some":
            self.i += 1
            self.take("punct", "(")
            role = self.name("a role name", allow_keywords=False)
            nxt = self.peek()
            if nxt == ("punct", ","):
                self.i += 1
                filler = self.concept()
                self.take("punct", ")")
                return ExistsQ(role, filler)
            self.take("punct", ")")
            return Exists(role)
        if value == "ran":
            raise self.error("'ran' is only allowed in 'rr' lines")
        return Atomic(self.name("a concept name"))

    def annotation(self) -> Monomial:
        self.take("punct", "@")
        tok = self.peek()
        if tok == ("one", "1"):
            self.i += 1
            mon = ONE
        elif tok is not None and tok[0] == "name":
            mon = Monomial((Variable(self.name("a provenance variable", allow_keywords=False)),))
        else:
            got = tok[1] if tok else "end of line"
            raise self.error(
                f"annotation must be a single variable or 1, got {got!r}"
            )
        if self.i != len(self.tokens):
            raise self.error("annotation must be a single variable or 1")
        return mon

    def finish_without_annotation(self) -> None:
        if self.i != len(self.tokens):
            raise self.error("trailing input after axiom")


def _parse_axiom_body(p: _LineParser, keyword: str) -> Axiom:
    if keyword == "gci":
        lhs = p.concept()
        p.take("le")
        rhs = p.concept()
        if not _check_lhs_grammar(lhs):
            raise p.error(f"left-hand side violates the concept grammar: {lhs}")
        if not _check_rhs_grammar(rhs):
            raise p.error(f"right-hand side must be a concept name or some(R): {rhs}")
        return GCI(lhs, rhs)
    if keyword == "ri":
        sub = p.name("a role name", allow_keywords=False)
        p.take("le")
        sup = p.name("a role name", allow_keywords=False)
        return RI(sub, sup)
    if keyword == "rr":
        p.take("name", "ran")
        p.take("punct", "(")
        role = p.name("a role name", allow_keywords=False)
        p.take("punct", ")")
        p.take("le")
        filler = p.name("a concept name", allow_keywords=False)
        return RR(role, filler)
    if keyword == "ca":
        tok = p.peek()
        if tok == ("name", "Top"):
            p.i += 1
            concept: Concept = TOP
        else:
            concept = Atomic(p.name("a concept name", allow_keywords=False))
        p.take("punct", "(")
        ind = p.name("an individual name", allow_keywords=False)
        p.take("punct", ")")
        return CA(concept, ind)
    if keyword == "ra":
        role = p.name("a role name", allow_keywords=False)
        p.take("punct", "(")
        a = p.name("an individual name", allow_keywords=False)
        p.take("punct", ",")
        b = p.name("an individual name", allow_keywords=False)
        p.take("punct", ")")
        return RA(role, a, b)
    raise p.error(f"unknown axiom keyword {keyword!r}")


def parse_ontology(text: str) -> AnnotatedOntology:
    """Parse an ontology file; raises ParseError with line:column info."""
    axioms: list[AnnotatedAxiom] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        p = _LineParser(line, lineno)
        tok = p.peek()
        if tok is None or tok[0] != "name" or tok[1] not in ("gci", "ri", "rr", "ca", "ra"):
            got = tok[1] if tok else "end of line"
            raise p.error(f"expected one of gci/ri/rr/ca/ra, got {got!r}")
        p.i += 1
        axiom = _parse_axiom_body(p, tok[1])
        annotation = p.annotation()
        axioms.append(AnnotatedAxiom(axiom, annotation))
    try:
        return AnnotatedOntology(axioms)
    except (NamespaceError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), 0, 0) from exc


def parse_axiom(text: str) -> Axiom:
    """Parse a single un-annotated axiom, e.g. for CLI --axiom arguments."""
    p = _LineParser(text.strip(), 1)
    tok = p.peek()
    if tok is None or tok[0] != "name" or tok[1] not in ("gci", "ri", "rr", "ca", "ra"):
        got = tok[1] if tok else "end of input"
        raise p.error(f"expected one of gci/ri/rr/ca/ra, got {got!r}")
    p.i += 1
    axiom = _parse_axiom_body(p, tok[1])
    p.finish_without_annotation()
    return axiom


def parse_iq_target(text: str) -> tuple[Concept, str]:
    """Parse an instance-query target of the form ``iq CONCEPT(IND)``."""
    p = _LineParser(text.strip(), 1)
    p.take("name", "iq")
    concept = p.concept()
    p.take("punct", "(")
    ind = p.name("an individual name", allow_keywords=False)
    p.take("punct", ")")
    p.finish_without_annotation()
    return concept, ind
