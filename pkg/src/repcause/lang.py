"""Input language: facts, denial constraints, conjunctive queries and
inclusion dependencies, plus their evaluation under null semantics.

The null semantics is enforced in one place: repeated variables and embedded
constants are rewritten to fresh variables plus explicit equality built-ins
before evaluation, and every built-in with a null operand is false. A
variable occurring in a single atom position may still bind null; the atom
matches and the position is simply irrelevant to the query.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .model import NULL, Constant, Instance, ModelError, PositionRef, num, sym


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class LangError(ValueError):
    """Semantic error: unsafe rule, arity conflict, bad query use."""


class CrossTypeComparisonError(LangError):
    """Order comparison between a symbol and an integer."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str

    def render(self) -> str:
        return self.name


Term = Union[Var, Constant]

BUILTIN_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class BodyAtom:
    relation: str
    terms: Tuple[Term, ...]

    def render(self) -> str:
        return f"{self.relation}({', '.join(_render_term(t) for t in self.terms)})"

    def variables(self) -> List[Var]:
        return [t for t in self.terms if isinstance(t, Var)]


@dataclass(frozen=True)
class BuiltinAtom:
    op: str
    left: Term
    right: Term

    def render(self) -> str:
        return f"{_render_term(self.left)} {self.op} {_render_term(self.right)}"

    def variables(self) -> List[Var]:
        return [t for t in (self.left, self.right) if isinstance(t, Var)]


@dataclass(frozen=True)
class ConjunctiveBody:
    atoms: Tuple[BodyAtom, ...]
    builtins: Tuple[BuiltinAtom, ...] = ()

    def render(self) -> str:
        parts = [a.render() for a in self.atoms] + [b.render() for b in self.builtins]
        return ", ".join(parts)

    def variables(self) -> Set[Var]:
        out: Set[Var] = set()
        for a in self.atoms:
            out.update(a.variables())
        for b in self.builtins:
            out.update(b.variables())
        return out


@dataclass(frozen=True)
class DenialConstraint:
    body: ConjunctiveBody

    def render(self) -> str:
        return f":- {self.body.render()}."


@dataclass(frozen=True)
class QuerySpec:
    """A UCQ; a single disjunct with no head variables is a BCQ."""

    name: str
    head_vars: Tuple[Var, ...]
    disjuncts: Tuple[ConjunctiveBody, ...]

    def is_boolean(self) -> bool:
        return not self.head_vars

    def render(self) -> str:
        head = self.name
        if self.head_vars:
            head += "(" + ", ".join(v.name for v in self.head_vars) + ")"
        return "\n".join(f"{head} :- {d.render()}?" for d in self.disjuncts)


@dataclass(frozen=True)
class InclusionDependency:
    premise: BodyAtom
    conclusion: BodyAtom

    def shared_vars(self) -> Set[Var]:
        return set(self.premise.variables()) & set(self.conclusion.variables())

    def render(self) -> str:
        return f"{self.premise.render()} -> {self.conclusion.render()}."


@dataclass(frozen=True)
class ViolationWitness:
    """One satisfying assignment of a DC body over an instance."""

    dc_index: int
    tids: FrozenSet[int]
    # variable name -> (bound value, positions where the variable is read)
    binding: Dict[str, Tuple[Constant, FrozenSet[PositionRef]]] = field(hash=False)
    # positions whose nulling falsifies this assignment: slots read by a
    # variable with >= 2 occurrences, by a built-in variable, or holding a
    # constant of the constraint body
    candidate_positions: FrozenSet[PositionRef] = frozenset()


@dataclass
class Problem:
    instance: Instance
    dcs: List[DenialConstraint]
    queries: List[QuerySpec]
    ids: List[InclusionDependency]

    def query(self, name: Optional[str] = None) -> QuerySpec:
        if name is None:
            if len(self.queries) != 1:
                raise LangError(
                    f"expected exactly one query, found {len(self.queries)}; name one"
                )
            return self.queries[0]
        for q in self.queries:
            if q.name == name:
                return q
        raise LangError(f"unknown query {name!r}")


def _render_term(t: Term) -> str:
    return t.name if isinstance(t, Var) else t.render()


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<arrow>->)
    | (?P<implies>:-)
    | (?P<op><=|>=|!=|=|<|>)
    | (?P<int>-?\d+)
    | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<punct>[();,.?])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)

    # -- statements --------------------------------------------------------

    def parse_problem(self) -> Problem:
        instance = Instance()
        dcs: List[DenialConstraint] = []
        ids: List[InclusionDependency] = []
        query_parts: Dict[str, Tuple[Tuple[Var, ...], List[ConjunctiveBody]]] = {}
        query_order: List[str] = []

        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.text == ":-":
                dcs.append(self._parse_dc())
            elif tok.kind == "name":
                self._parse_named_statement(instance, ids, query_parts, query_order)
            else:
                self.fail(f"unexpected token {tok.text!r}")

        queries = [
            QuerySpec(name, query_parts[name][0], tuple(query_parts[name][1]))
            for name in query_order
        ]
        for q in queries:
            _check_query(q, instance)
        for dc in dcs:
            _check_body(dc.body, instance)
        for dep in ids:
            _check_id(dep, instance)
        return Problem(instance, dcs, queries, ids)

    def _parse_dc(self) -> DenialConstraint:
        self.expect(":-")
        body = self._parse_body()
        self.expect(".")
        return DenialConstraint(body)

    def _parse_named_statement(self, instance, ids, query_parts, query_order) -> None:
        name = self.next().text
        if self.peek().text == ":-":  # Boolean query head without parentheses
            self.next()
            body = self._parse_body()
            self.expect("?")
            self._record_query(name, (), body, query_parts, query_order)
            return
        self.expect("(")
        # disambiguate: a fact holds only constants (with an optional leading
        # "tid;"); a query head holds only variables; an ID premise is a
        # general atom followed by "->"
        first = self.peek()
        if first.kind == "int" and self.peek(1).text == ";":
            tid = int(self.next().text)
            self.expect(";")
            values = self._parse_constant_list()
            self.expect(")")
            self.expect(".")
            self._add_fact(instance, name, values, tid)
            return
        terms = self._parse_term_list()
        self.expect(")")
        closer = self.next()
        if closer.text == ".":
            values = [t for t in terms if isinstance(t, Constant)]
            if len(values) != len(terms):
                raise ParseError("facts must be ground", closer.line, closer.column)
            self._add_fact(instance, name, values, None)
        elif closer.text == ":-":
            head_vars = tuple(t for t in terms if isinstance(t, Var))
            if len(head_vars) != len(terms):
                raise ParseError(
                    "query head must hold variables only", closer.line, closer.column
                )
            body = self._parse_body()
            self.expect("?")
            self._record_query(name, head_vars, body, query_parts, query_order)
        elif closer.text == "->":
            conclusion = self._parse_atom()
            self.expect(".")
            ids.append(InclusionDependency(BodyAtom(name, tuple(terms)), conclusion))
        else:
            raise ParseError(
                f"expected '.', ':-' or '->', found {closer.text!r}",
                closer.line,
                closer.column,
            )

    def _record_query(self, name, head_vars, body, query_parts, query_order) -> None:
        if name in query_parts:
            known_head, bodies = query_parts[name]
            if known_head != tuple(head_vars):
                tok = self.peek()
                raise ParseError(
                    f"query {name} redeclared with different head", tok.line, tok.column
                )
            bodies.append(body)
        else:
            query_parts[name] = (tuple(head_vars), [body])
            query_order.append(name)

    def _add_fact(self, instance: Instance, name, values, tid) -> None:
        try:
            instance.add_fact(name, values, tid=tid)
        except ModelError as exc:
            tok = self.peek()
            raise ParseError(str(exc), tok.line, tok.column) from exc

    # -- pieces ------------------------------------------------------------

    def _parse_body(self) -> ConjunctiveBody:
        atoms: List[BodyAtom] = []
        builtins: List[BuiltinAtom] = []
        while True:
            if self.peek().kind == "name" and self.peek(1).text == "(":
                name = self.next().text
                self.expect("(")
                terms = self._parse_term_list()
                self.expect(")")
                atoms.append(BodyAtom(name, tuple(terms)))
            else:
                left = self._parse_term()
                op_tok = self.next()
                if op_tok.text not in BUILTIN_OPS:
                    raise ParseError(
                        f"unknown builtin {op_tok.text!r}", op_tok.line, op_tok.column
                    )
                right = self._parse_term()
                builtins.append(BuiltinAtom(op_tok.text, left, right))
            if self.peek().text == ",":
                self.next()
                continue
            break
        if not atoms:
            self.fail("a body needs at least one relational atom")
        return ConjunctiveBody(tuple(atoms), tuple(builtins))

    def _parse_atom(self) -> BodyAtom:
        name_tok = self.next()
        if name_tok.kind != "name":
            raise ParseError("expected relation name", name_tok.line, name_tok.column)
        self.expect("(")
        terms = self._parse_term_list()
        self.expect(")")
        return BodyAtom(name_tok.text, tuple(terms))

    def _parse_term_list(self) -> List[Term]:
        terms = [self._parse_term()]
        while self.peek().text == ",":
            self.next()
            terms.append(self._parse_term())
        return terms

    def _parse_constant_list(self) -> List[Constant]:
        out = []
        for t in self._parse_term_list():
            if isinstance(t, Var):
                self.fail("facts must be ground")
            out.append(t)
        return out

    def _parse_term(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return num(int(tok.text))
        if tok.kind == "name":
            if tok.text == "null":
                return NULL
            if tok.text[0].isupper():
                return Var(tok.text)
            return sym(tok.text)
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.column)


def _check_body(body: ConjunctiveBody, instance: Instance) -> None:
    atom_vars: Set[Var] = set()
    for atom in body.atoms:
        instance.declare(atom.relation, len(atom.terms))
        atom_vars.update(atom.variables())
    for b in body.builtins:
        for v in b.variables():
            if v not in atom_vars:
                raise LangError(f"unsafe builtin: variable {v.name} occurs in no atom")


def _check_query(query: QuerySpec, instance: Instance) -> None:
    for body in query.disjuncts:
        _check_body(body, instance)
        missing = set(query.head_vars) - {v for a in body.atoms for v in a.variables()}
        if missing:
            names = ", ".join(sorted(v.name for v in missing))
            raise LangError(f"query {query.name}: head variable(s) {names} unsafe")


def _check_id(dep: InclusionDependency, instance: Instance) -> None:
    instance.declare(dep.premise.relation, len(dep.premise.terms))
    instance.declare(dep.conclusion.relation, len(dep.conclusion.terms))


def parse_problem(text: str) -> Problem:
    return _Parser(text).parse_problem()


def render_problem(problem: Problem) -> str:
    lines = [t.render().replace(";", "; ") + "." for t in problem.instance.tuples()]
    lines += [dc.render() for dc in problem.dcs]
    lines += [q.render() for q in problem.queries]
    lines += [dep.render() for dep in problem.ids]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Evaluation

_FRESH_PREFIX = "_v"


@dataclass(frozen=True)
class _NormalBody:
    """A body with every atom slot holding a distinct fresh variable; joins,
    constants and the original built-ins all live in `builtins`."""

    atoms: Tuple[Tuple[str, Tuple[str, ...]], ...]  # (relation, slot var names)
    builtins: Tuple[BuiltinAtom, ...]
    # fresh slot var -> (atom index, 1-based position)
    slots: Dict[str, Tuple[int, int]] = field(hash=False)
    # fresh slot var -> original variable name, for slots bound to a variable
    origin: Dict[str, str] = field(hash=False)


def _normalize(body: ConjunctiveBody) -> _NormalBody:
    counter = 0
    first_seen: Dict[str, str] = {}
    atoms = []
    builtins: List[BuiltinAtom] = []
    slots: Dict[str, Tuple[int, int]] = {}
    origin: Dict[str, str] = {}
    for i, atom in enumerate(body.atoms):
        slot_names = []
        for j, term in enumerate(atom.terms, start=1):
            counter += 1
            fresh = f"{_FRESH_PREFIX}{counter}"
            slot_names.append(fresh)
            slots[fresh] = (i, j)
            if isinstance(term, Var):
                origin[fresh] = term.name
                if term.name in first_seen:
                    builtins.append(BuiltinAtom("=", Var(first_seen[term.name]), Var(fresh)))
                else:
                    first_seen[term.name] = fresh
            else:
                builtins.append(BuiltinAtom("=", Var(fresh), term))
        atoms.append((atom.relation, tuple(slot_names)))
    for b in body.builtins:
        left = Var(first_seen[b.left.name]) if isinstance(b.left, Var) else b.left
        right = Var(first_seen[b.right.name]) if isinstance(b.right, Var) else b.right
        builtins.append(BuiltinAtom(b.op, left, right))
    return _NormalBody(tuple(atoms), tuple(builtins), slots, origin)


def eval_builtin(op: str, left: Constant, right: Constant) -> bool:
    """Built-in comparison under null semantics: any null operand makes the
    comparison false, whatever the operator."""
    if left.is_null() or right.is_null():
        return False
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if left.kind != right.kind:
        raise CrossTypeComparisonError(
            f"cannot order-compare {left.render()} ({left.kind}) "
            f"with {right.render()} ({right.kind})"
        )
    a, b = left.payload, right.payload
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise LangError(f"unknown builtin {op}")


def _term_value(term: Term, binding: Dict[str, Constant]) -> Optional[Constant]:
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def _match_body(
    instance: Instance, normal: _NormalBody
) -> Iterator[Tuple[Tuple[int, ...], Dict[str, Constant]]]:
    """All satisfying assignments, yielded as (tids per atom, slot binding).

    Naive nested-loop join with early built-in pruning; tuples are visited in
    tid order so the output order is deterministic.
    """
    by_rel: Dict[str, List] = {}
    for rel, _ in normal.atoms:
        if rel not in by_rel:
            by_rel[rel] = sorted(instance.tuples_of(rel), key=lambda t: t.tid)

    n = len(normal.atoms)
    chosen: List[int] = []
    binding: Dict[str, Constant] = {}

    def pending_ok() -> bool:
        for b in normal.builtins:
            left = _term_value(b.left, binding)
            right = _term_value(b.right, binding)
            if left is None or right is None:
                continue
            if not eval_builtin(b.op, left, right):
                return False
        return True

    def walk(i: int) -> Iterator[Tuple[Tuple[int, ...], Dict[str, Constant]]]:
        if i == n:
            yield tuple(chosen), dict(binding)
            return
        rel, slot_names = normal.atoms[i]
        for tup in by_rel[rel]:
            for name, value in zip(slot_names, tup.values):
                binding[name] = value
            chosen.append(tup.tid)
            if pending_ok():
                yield from walk(i + 1)
            chosen.pop()
            for name in slot_names:
                del binding[name]

    yield from walk(0)


def eval_bcq(instance: Instance, query: QuerySpec) -> bool:
    if not query.is_boolean():
        raise LangError(f"query {query.name} is open; eval_bcq needs a Boolean query")
    for body in query.disjuncts:
        normal = _normalize(body)
        for _ in _match_body(instance, normal):
            return True
    return False


def eval_open(instance: Instance, query: QuerySpec) -> Set[Tuple[Constant, ...]]:
    """Answers to an open UCQ; nulls can reach an answer only through
    single-occurrence variables."""
    answers: Set[Tuple[Constant, ...]] = set()
    for body in query.disjuncts:
        normal = _normalize(body)
        head_slots = []
        for v in query.head_vars:
            slot = next(s for s, o in normal.origin.items() if o == v.name)
            head_slots.append(slot)
        for _, binding in _match_body(instance, normal):
            answers.add(tuple(binding[s] for s in head_slots))
    return answers


def substitute_answer(query: QuerySpec, answer: Sequence[Constant]) -> QuerySpec:
    """Ground the head variables of an open query, yielding a BCQ."""
    if len(answer) != len(query.head_vars):
        raise LangError(
            f"query {query.name} expects {len(query.head_vars)} answer value(s)"
        )
    mapping = {v.name: c for v, c in zip(query.head_vars, answer)}

    def subst_term(t: Term) -> Term:
        if isinstance(t, Var) and t.name in mapping:
            return mapping[t.name]
        return t

    disjuncts = []
    for body in query.disjuncts:
        atoms = tuple(
            BodyAtom(a.relation, tuple(subst_term(t) for t in a.terms))
            for a in body.atoms
        )
        builtins = tuple(
            BuiltinAtom(b.op, subst_term(b.left), subst_term(b.right))
            for b in body.builtins
        )
        disjuncts.append(ConjunctiveBody(atoms, builtins))
    return QuerySpec(query.name, (), tuple(disjuncts))


def negate_query_to_dc(query: QuerySpec) -> List[DenialConstraint]:
    """The denial constraints equivalent to the negation of a Boolean UCQ:
    one DC per disjunct, body copied verbatim."""
    if not query.is_boolean():
        raise LangError(f"query {query.name} is open; negate a Boolean query")
    return [DenialConstraint(body) for body in query.disjuncts]


def violations(
    instance: Instance, dcs: Sequence[DenialConstraint]
) -> List[ViolationWitness]:
    """All satisfying assignments of each DC body, with their tid hyperedges,
    per-variable read positions and nullable candidate positions."""
    out: List[ViolationWitness] = []
    for index, dc in enumerate(dcs):
        normal = _normalize(dc.body)
        builtin_vars = {
            t.name for b in normal.builtins for t in (b.left, b.right) if isinstance(t, Var)
        }
        for tids, slot_binding in _match_body(instance, normal):
            binding: Dict[str, Tuple[Constant, Set[PositionRef]]] = {}
            candidates: Set[PositionRef] = set()
            for slot, (atom_idx, position) in normal.slots.items():
                rel = normal.atoms[atom_idx][0]
                ref = PositionRef(rel, tids[atom_idx], position)
                if slot in normal.origin:
                    name = normal.origin[slot]
                    value, refs = binding.get(name, (slot_binding[slot], set()))
                    refs.add(ref)
                    binding[name] = (value, refs)
                if slot in builtin_vars and not slot_binding[slot].is_null():
                    candidates.add(ref)
            out.append(
                ViolationWitness(
                    dc_index=index,
                    tids=frozenset(tids),
                    binding={k: (v, frozenset(r)) for k, (v, r) in binding.items()},
                    candidate_positions=frozenset(candidates),
                )
            )
    return out


def is_consistent(instance: Instance, dcs: Sequence[DenialConstraint]) -> bool:
    for dc in dcs:
        normal = _normalize(dc.body)
        for _ in _match_body(instance, normal):
            return False
    return True


def unsupported_premises(
    instance: Instance, ids: Sequence[InclusionDependency]
) -> Set[int]:
    """Tids of premise tuples with no witnessing conclusion tuple.

    A shared variable must match through equal non-null values: null never
    witnesses a join, so a premise holding null at a shared position counts
    as unsupported.
    """
    bad: Set[int] = set()
    for dep in ids:
        shared = dep.shared_vars()
        prem_positions = {
            t.name: j
            for j, t in enumerate(dep.premise.terms)
            if isinstance(t, Var) and t in shared
        }
        concl_positions = {
            t.name: j
            for j, t in enumerate(dep.conclusion.terms)
            if isinstance(t, Var) and t in shared
        }
        for tup in instance.tuples_of(dep.premise.relation):
            if len(tup.values) != len(dep.premise.terms):
                raise LangError(
                    f"arity mismatch for {dep.premise.relation} in inclusion dependency"
                )
            required = {
                name: tup.values[j] for name, j in prem_positions.items()
            }
            if any(v.is_null() for v in required.values()):
                bad.add(tup.tid)
                continue
            witnessed = False
            for cand in instance.tuples_of(dep.conclusion.relation):
                ok = True
                for name, j in concl_positions.items():
                    v = cand.values[j]
                    if v.is_null() or v != required[name]:
                        ok = False
                        break
                if ok:
                    witnessed = True
                    break
            if not witnessed:
                bad.add(tup.tid)
    return bad


def satisfies_ids(instance: Instance, ids: Sequence[InclusionDependency]) -> bool:
    return not unsupported_premises(instance, ids)
