"""Generation of answer-set repair programs in DLV / DLV-Complex surface
syntax, plus verification of solver output against this engine.

Two program families are produced: tuple-deletion programs (predicates get a
primed copy `P_a` whose last argument carries the annotation `d`/`s` for
deleted/stays, optionally extended with cause, contingency-set,
responsibility and weak-constraint blocks) and null-update programs (with
annotations `u`/`fu`/`t`/`s` tracking the update fixpoint). The engine never
runs a solver; `verify_model_correspondence` checks externally produced
stable models against the brute-force repairs.

Program equality for golden tests goes through `canonical_program`, which is
insensitive to whitespace, statement order, body-literal and head-disjunct
order, and variable naming.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .lang import BodyAtom, BuiltinAtom, ConjunctiveBody, DenialConstraint, Var
from .model import Constant, Instance, NULL, num, sym


class EmitError(ValueError):
    """Invalid emission option combination."""


VALID_INCLUDES = {"causes", "cau_cont", "contingency_sets", "pre_rho", "weak_constraints"}


@dataclass(frozen=True)
class EmitOptions:
    flavor: str = "non-disjunctive"  # or "disjunctive"
    include: FrozenSet[str] = frozenset()
    maxint: int = 100
    semantics: str = "tuple"  # or "null"

    def validate(self, instance: Instance) -> None:
        if self.flavor not in ("disjunctive", "non-disjunctive"):
            raise EmitError(f"unknown flavor {self.flavor!r}")
        bad = set(self.include) - VALID_INCLUDES
        if bad:
            raise EmitError(f"unknown include option(s): {', '.join(sorted(bad))}")
        if "contingency_sets" in self.include and "cau_cont" not in self.include:
            raise EmitError("contingency_sets requires cau_cont")
        if "pre_rho" in self.include:
            if "cau_cont" not in self.include:
                raise EmitError("pre_rho requires cau_cont")
            if self.maxint < len(instance) + 1:
                raise EmitError(
                    f"maxint {self.maxint} too small for {len(instance)} tuples"
                )


@dataclass(frozen=True)
class ProgramText:
    text: str
    dialect: str  # "core-asp" | "set-extended-asp"


_VAR_LETTERS = ["X", "Y", "Z", "U", "V", "W"]


def _fresh_vars(n: int, start: int = 0) -> List[str]:
    out = []
    for i in range(start, start + n):
        out.append(_VAR_LETTERS[i] if i < len(_VAR_LETTERS) else f"X{i + 1}")
    return out


def _fact_line(instance: Instance) -> List[str]:
    return [
        "{}({},{}).".format(t.relation, t.tid, ",".join(v.render() for v in t.values))
        if t.values
        else f"{t.relation}({t.tid})."
        for t in instance.tuples()
    ]


def _term_str(term) -> str:
    return term.name if isinstance(term, Var) else term.render()


def _atom_args(atom: BodyAtom) -> str:
    return ",".join(_term_str(t) for t in atom.terms)


def _dc_predicates(dcs: Sequence[DenialConstraint]) -> List[Tuple[str, int]]:
    seen: Dict[str, int] = {}
    for dc in dcs:
        for atom in dc.body.atoms:
            seen.setdefault(atom.relation, len(atom.terms))
    return sorted(seen.items())


# ---------------------------------------------------------------------------
# Tuple-deletion programs


def _repair_rules(dc: DenialConstraint, flavor: str) -> List[str]:
    atoms = dc.body.atoms
    builtins = [b.render() for b in dc.body.builtins]
    if flavor == "disjunctive":
        tids = [f"T{i + 1}" for i in range(len(atoms))]
        head = " v ".join(
            f"{a.relation}_a({tids[i]},{_atom_args(a)},d)" for i, a in enumerate(atoms)
        )
        body = [f"{a.relation}({tids[i]},{_atom_args(a)})" for i, a in enumerate(atoms)]
        body += builtins
        return [f"{head} :- {', '.join(body)}."]
    rules = []
    for i, chosen in enumerate(atoms):
        tid_of = {}
        nxt = 2
        for j in range(len(atoms)):
            if j == i:
                tid_of[j] = "T"
            else:
                tid_of[j] = f"T{nxt}"
                nxt += 1
        body = [f"{chosen.relation}({tid_of[i]},{_atom_args(chosen)})"]
        body += [
            f"{a.relation}({tid_of[j]},{_atom_args(a)})"
            for j, a in enumerate(atoms)
            if j != i
        ]
        body += builtins
        body += [
            f"not {a.relation}_a({tid_of[j]},{_atom_args(a)},d)"
            for j, a in enumerate(atoms)
            if j != i
        ]
        rules.append(
            f"{chosen.relation}_a(T,{_atom_args(chosen)},d) :- {', '.join(body)}."
        )
    return rules


_CONTINGENCY_BLOCK = [
    "preCont(T,{TC}) :- cauCont(T,TC).",
    "preCont(T,#union(C,{TC})) :- cauCont(T,TC), preCont(T,C), not #member(TC,C).",
    "cont(T,C) :- preCont(T,C), not HoleIn(T,C).",
    "HoleIn(T,C) :- preCont(T,C), cauCont(T,TC), not #member(TC,C).",
    "tmpCont(T) :- cont(T,C), not #card(C,0).",
    "cont(T,{}) :- cause(T), not tmpCont(T).",
]


def emit_tuple_repair_program(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    options: EmitOptions = EmitOptions(),
) -> ProgramText:
    options.validate(instance)
    lines = _fact_line(instance)
    lines.append("")
    for dc in dcs:
        lines.extend(_repair_rules(dc, options.flavor))
    preds = _dc_predicates(dcs)
    for name, arity in preds:
        vs = ",".join(_fresh_vars(arity))
        lines.append(f"{name}_a(T,{vs},s) :- {name}(T,{vs}), not {name}_a(T,{vs},d).")
    if "causes" in options.include:
        lines.append("")
        for name, arity in preds:
            vs = ",".join(_fresh_vars(arity))
            lines.append(f"cause(T) :- {name}_a(T,{vs},d).")
    if "cau_cont" in options.include:
        lines.append("")
        for name, arity in preds:
            for name2, arity2 in preds:
                left = ",".join(_fresh_vars(arity))
                right = ",".join(_fresh_vars(arity2, start=arity))
                guard = ", T != TC" if name == name2 else ""
                lines.append(
                    f"cauCont(T,TC) :- {name}_a(T,{left},d), "
                    f"{name2}_a(TC,{right},d){guard}."
                )
    if "contingency_sets" in options.include:
        lines.append("")
        lines.extend(_CONTINGENCY_BLOCK)
    if "pre_rho" in options.include:
        lines.append("")
        lines.append(f"#maxint = {options.maxint}.")
        lines.append(
            "preRho(T,N + 1) :- cause(T), #int(N), #count{TC: cauCont(T,TC)} = N."
        )
    if "weak_constraints" in options.include:
        lines.append("")
        for name, arity in preds:
            vs = ",".join(_fresh_vars(arity))
            lines.append(f":~ {name}_a(T,{vs},d).")
    dialect = (
        "set-extended-asp"
        if options.include & {"contingency_sets", "pre_rho"}
        else "core-asp"
    )
    return ProgramText("\n".join(lines).strip() + "\n", dialect)


# ---------------------------------------------------------------------------
# Null-update programs


def _dc_candidates(dc: DenialConstraint) -> List[Tuple[int, int]]:
    """(occurrence index, 1-based position) pairs whose nulling can falsify
    the constraint body: join-variable slots, builtin-variable slots, and
    constant slots."""
    counts: Dict[str, int] = {}
    for atom in dc.body.atoms:
        for t in atom.terms:
            if isinstance(t, Var):
                counts[t.name] = counts.get(t.name, 0) + 1
    builtin_vars = {
        t.name for b in dc.body.builtins for t in (b.left, b.right) if isinstance(t, Var)
    }
    out = []
    for i, atom in enumerate(dc.body.atoms):
        for j, t in enumerate(atom.terms, start=1):
            if isinstance(t, Var):
                if counts[t.name] >= 2 or t.name in builtin_vars:
                    out.append((i, j))
            elif not t.is_null():
                out.append((i, j))
    return out


def _nulled_args(atom: BodyAtom, position: int) -> str:
    parts = []
    for j, t in enumerate(atom.terms, start=1):
        parts.append("null" if j == position else _term_str(t))
    return ",".join(parts)


def _null_update_rules(dc: DenialConstraint) -> List[str]:
    atoms = dc.body.atoms
    candidates = _dc_candidates(dc)
    rules = []
    for (i, j) in candidates:
        chosen = atoms[i]
        tid_of = {}
        nxt = 2
        for k in range(len(atoms)):
            if k == i:
                tid_of[k] = "T"
            else:
                tid_of[k] = f"T{nxt}"
                nxt += 1
        body = [f"{chosen.relation}_a(T,{_atom_args(chosen)},t)"]
        body += [
            f"{a.relation}_a({tid_of[k]},{_atom_args(a)},t)"
            for k, a in enumerate(atoms)
            if k != i
        ]
        body += [b.render() for b in dc.body.builtins]
        term = chosen.terms[j - 1]
        if isinstance(term, Var):
            body.append(f"{term.name} != null")
        for (i2, j2) in candidates:
            if (i2, j2) == (i, j):
                continue
            other = atoms[i2]
            body.append(
                f"not {other.relation}_a({tid_of[i2]},{_nulled_args(other, j2)},u)"
            )
        rules.append(
            f"{chosen.relation}_a(T,{_nulled_args(chosen, j)},u) :- {', '.join(body)}."
        )
    return rules


def emit_null_repair_program(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    options: EmitOptions = EmitOptions(semantics="null"),
) -> ProgramText:
    options.validate(instance)
    lines = _fact_line(instance)
    lines.append("")
    preds = _dc_predicates(dcs)
    for name, arity in preds:
        vs = ",".join(_fresh_vars(arity))
        lines.append(f"{name}_a(T,{vs},t) :- {name}(T,{vs}).")
        lines.append(f"{name}_a(T,{vs},t) :- {name}_a(T,{vs},u).")
    lines.append("")
    for dc in dcs:
        lines.extend(_null_update_rules(dc))
    for name, arity in preds:
        lines.append("")
        vs = _fresh_vars(arity)
        joined = ",".join(vs)
        negs = ", ".join(f"not aux{name}{j}(T,{joined})" for j in range(1, arity + 1))
        lines.append(f"{name}_a(T,{joined},fu) :- {name}_a(T,{joined},u), {negs}.")
        for j in range(1, arity + 1):
            nulled = ",".join("null" if k == j else vs[k - 1] for k in range(1, arity + 1))
            lines.append(
                f"aux{name}{j}(T,{joined}) :- {name}(T,{joined}), "
                f"{name}_a(T,{nulled},u), {vs[j - 1]} != null."
            )
    for name, arity in preds:
        lines.append("")
        joined = ",".join(_fresh_vars(arity))
        lines.append(f"{name}_a(T,{joined},s) :- {name}_a(T,{joined},fu).")
        lines.append(f"{name}_a(T,{joined},s) :- {name}(T,{joined}), not aux{name}(T).")
        lines.append(f"aux{name}(T) :- {name}_a(T,{joined},u).")
    if "causes" in options.include:
        lines.append("")
        for name, arity in preds:
            vs = _fresh_vars(arity)
            for j in range(1, arity + 1):
                nulled = ",".join(
                    "null" if k == j else vs[k - 1] for k in range(1, arity + 1)
                )
                fresh = [
                    vs[j - 1] if k == j else f"{vs[k - 1]}2"
                    for k in range(1, arity + 1)
                ]
                lines.append(
                    f"cause(T,{j},{vs[j - 1]}) :- {name}_a(T,{nulled},s), "
                    f"{name}(T,{','.join(fresh)})."
                )
    return ProgramText("\n".join(lines).strip() + "\n", "core-asp")


# ---------------------------------------------------------------------------
# Canonical normalization for golden comparison

_TOKEN = re.compile(
    r"#?[A-Za-z_][A-Za-z0-9_]*|\d+|:-|:~|!=|<=|>=|[(){}\[\],=<>+;:]|\S"
)

_MAX_PERMUTED = 8


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def _tokenize_stmt(stmt: str) -> List[str]:
    return _TOKEN.findall(stmt)


def _split_top(tokens: List[str], sep: str) -> List[List[str]]:
    parts: List[List[str]] = [[]]
    depth = 0
    for tok in tokens:
        if tok in "({[":
            depth += 1
        elif tok in ")}]":
            depth -= 1
        if tok == sep and depth == 0:
            parts.append([])
        else:
            parts[-1].append(tok)
    return [p for p in parts if p]


def _is_variable(tok: str, nxt: Optional[str]) -> bool:
    return bool(re.match(r"[A-Z]", tok)) and nxt != "("


def _render_normalized(groups: List[List[str]], joiners: List[str]) -> str:
    """Join token groups with the given separators, renaming variables in
    first-appearance order."""
    mapping: Dict[str, str] = {}
    out: List[str] = []
    for gi, group in enumerate(groups):
        if gi:
            out.append(joiners[gi - 1])
        for k, tok in enumerate(group):
            nxt = group[k + 1] if k + 1 < len(group) else None
            if _is_variable(tok, nxt):
                if tok not in mapping:
                    mapping[tok] = f"V{len(mapping) + 1}"
                out.append(mapping[tok])
            else:
                out.append(tok)
    return " ".join(out)


def _canonical_statement(tokens: List[str]) -> str:
    sep = None
    sep_index = None
    depth = 0
    for idx, tok in enumerate(tokens):
        if tok in "({[":
            depth += 1
        elif tok in ")}]":
            depth -= 1
        elif tok in (":-", ":~") and depth == 0:
            sep, sep_index = tok, idx
            break
    if sep is None:
        return _render_normalized([tokens], [])
    head = tokens[:sep_index]
    body = tokens[sep_index + 1 :]
    head_parts = _split_top(head, "v") if head else []
    body_parts = _split_top(body, ",")

    def perms(parts: List[List[str]]):
        if len(parts) <= 1 or len(parts) > _MAX_PERMUTED:
            return [parts]
        return [list(p) for p in permutations(parts)]

    best = None
    for hp in perms(head_parts):
        for bp in perms(body_parts):
            groups = hp + [[sep]] + bp
            # between head parts "v", around the separator a bar, between
            # body parts ","
            joins: List[str] = []
            for gi in range(1, len(groups)):
                prev_is_sep = groups[gi - 1] == [sep]
                cur_is_sep = groups[gi] == [sep]
                if prev_is_sep or cur_is_sep:
                    joins.append("|")
                elif gi <= len(hp) - 1:
                    joins.append("v")
                else:
                    joins.append(",")
            rendered = _render_normalized(groups, joins)
            if best is None or rendered < best:
                best = rendered
    assert best is not None
    return best


def canonical_program(text: str) -> str:
    """A normal form for a program: statement order, literal order, variable
    names and whitespace are all abstracted away."""
    stripped = _strip_comments(text)
    statements = []
    for raw in stripped.split("."):
        tokens = _tokenize_stmt(raw)
        if tokens:
            statements.append(_canonical_statement(tokens))
    return "\n".join(sorted(statements))


def programs_equivalent(a: str, b: str) -> bool:
    return canonical_program(a) == canonical_program(b)


# ---------------------------------------------------------------------------
# Solver-output parsing and model/repair correspondence


@dataclass(frozen=True)
class ModelAtom:
    predicate: str
    args: Tuple[str, ...]


def parse_models(text: str) -> List[List[ModelAtom]]:
    """Models in the solver's brace-list output format; `Best model:`
    prefixes and `Cost ...` trailers are ignored."""
    models: List[List[ModelAtom]] = []
    depth = 0
    start = None
    for idx, ch in enumerate(text):
        if ch == "{":
            if depth == 0:
                start = idx
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise EmitError("unbalanced braces in model text")
            if depth == 0 and start is not None:
                models.append(_parse_model_body(text[start + 1 : idx]))
                start = None
    if depth != 0:
        raise EmitError("unbalanced braces in model text")
    return models


def _parse_model_body(body: str) -> List[ModelAtom]:
    atoms = []
    for chunk in _split_chunks(body):
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$", chunk, re.S)
        if not m:
            if chunk.strip():
                raise EmitError(f"cannot parse model atom {chunk.strip()!r}")
            continue
        args = tuple(a.strip() for a in _split_chunks(m.group(2)))
        atoms.append(ModelAtom(m.group(1), args))
    return atoms


def _split_chunks(text: str) -> List[str]:
    parts = [""]
    depth = 0
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("")
        else:
            parts[-1] += ch
    return [p for p in parts if p.strip()]


def _const_of(text: str) -> Constant:
    if re.fullmatch(r"-?\d+", text):
        return num(int(text))
    if text == "null":
        return NULL
    return sym(text)


def _model_repair_key(atoms: Sequence[ModelAtom]) -> FrozenSet:
    """The repair encoded by a model: the s-annotated primed atoms, as
    (relation, tid, values) triples."""
    out = set()
    for atom in atoms:
        if not atom.predicate.endswith("_a") or not atom.args:
            continue
        if atom.args[-1] != "s":
            continue
        relation = atom.predicate[:-2]
        tid = int(atom.args[0])
        values = tuple(_const_of(a) for a in atom.args[1:-1])
        out.add((relation, tid, values))
    return frozenset(out)


def _instance_key(instance: Instance) -> FrozenSet:
    return frozenset((t.relation, t.tid, t.values) for t in instance.tuples())


@dataclass
class CorrespondenceReport:
    matches: List[Tuple[int, int]] = field(default_factory=list)
    unmatched_models: List[int] = field(default_factory=list)
    unmatched_repairs: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unmatched_models and not self.unmatched_repairs

    def render(self) -> str:
        lines = [
            f"model {m} <-> repair {r}" for m, r in self.matches
        ]
        lines += [f"model {m} matches no repair" for m in self.unmatched_models]
        lines += [f"repair {r} matches no model" for r in self.unmatched_repairs]
        lines.append("correspondence: " + ("bijective" if self.ok else "MISMATCH"))
        return "\n".join(lines)


def verify_model_correspondence(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    models_text: str,
    semantics: str = "tuple",
) -> CorrespondenceReport:
    """Check that the solver's stable models encode exactly this engine's
    repairs, one for one."""
    from .null_repairs import null_repairs
    from .tuple_repairs import s_repairs

    if semantics == "tuple":
        repairs = [r.repair for r in s_repairs(instance, dcs)]
    elif semantics == "null":
        repairs = [r.repair for r in null_repairs(instance, dcs)]
    else:
        raise EmitError(f"unknown semantics {semantics!r}")
    repair_keys = [_instance_key(r) for r in repairs]
    model_keys = [_model_repair_key(m) for m in parse_models(models_text)]

    report = CorrespondenceReport()
    used: Set[int] = set()
    for mi, mk in enumerate(model_keys):
        hit = None
        for ri, rk in enumerate(repair_keys):
            if ri not in used and rk == mk:
                hit = ri
                break
        if hit is None:
            report.unmatched_models.append(mi)
        else:
            used.add(hit)
            report.matches.append((mi, hit))
    report.unmatched_repairs = [i for i in range(len(repair_keys)) if i not in used]
    return report
