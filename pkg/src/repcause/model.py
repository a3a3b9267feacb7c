"""Relational data model: tid-keyed tuples, a SQL-style null, deletions and
value-to-null updates.

All values are immutable after construction. `Instance.add_fact` is the one
mutating entry point, meant for building an instance; every other operation
returns a fresh instance and never touches its input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple


class ModelError(ValueError):
    """Violation of a structural constraint of the data model."""


@dataclass(frozen=True)
class Constant:
    """A database constant: a symbol, an integer, or the null value."""

    kind: str  # "symbol" | "integer" | "null"
    payload: object = ""

    def is_null(self) -> bool:
        return self.kind == "null"

    def render(self) -> str:
        if self.kind == "null":
            return "null"
        return str(self.payload)

    def sort_key(self) -> Tuple[str, object]:
        return (self.kind, self.payload)

    def __repr__(self) -> str:  # keeps test diffs readable
        return f"Constant({self.render()})"


NULL = Constant("null")


def sym(text: str) -> Constant:
    if text == "null":
        return NULL
    return Constant("symbol", text)


def num(value: int) -> Constant:
    return Constant("integer", int(value))


@dataclass(frozen=True)
class DbTuple:
    """A ground tuple with a globally unique tid (occupying position 0)."""

    relation: str
    tid: int
    values: Tuple[Constant, ...]
    endogenous: bool = True

    def render(self) -> str:
        vals = ",".join(v.render() for v in self.values)
        return f"{self.relation}({self.tid};{vals})"


@dataclass(frozen=True)
class PositionRef:
    """A positioned value R[i;j]: attribute j of the tuple with tid i."""

    relation: str
    tid: int
    position: int  # 1-based; the tid itself (position 0) is never referenced

    def render(self) -> str:
        return f"{self.relation}[{self.tid};{self.position}]"

    def sort_key(self) -> Tuple[str, int, int]:
        return (self.relation, self.tid, self.position)


def sorted_positions(refs: Iterable[PositionRef]) -> List[PositionRef]:
    return sorted(refs, key=PositionRef.sort_key)


class Instance:
    """A schema plus a set of tid-keyed tuples.

    Tuples are kept in a tid-keyed map; iteration order is always canonical:
    (relation name, tid).
    """

    def __init__(self) -> None:
        self._schema: Dict[str, int] = {}
        self._tuples: Dict[int, DbTuple] = {}

    # -- construction -----------------------------------------------------

    def declare(self, relation: str, arity: int) -> None:
        known = self._schema.get(relation)
        if known is not None and known != arity:
            raise ModelError(
                f"arity conflict for {relation}: declared {known}, got {arity}"
            )
        self._schema[relation] = arity

    def add_fact(
        self,
        relation: str,
        values: Sequence[Constant],
        tid: Optional[int] = None,
        endogenous: bool = True,
    ) -> int:
        """Insert a tuple, auto-assigning the smallest free tid if none given."""
        values = tuple(values)
        self.declare(relation, len(values))
        if tid is None:
            tid = 1
            while tid in self._tuples:
                tid += 1
        elif tid in self._tuples:
            raise ModelError(f"duplicate tid {tid}")
        elif tid < 1:
            raise ModelError(f"tid must be positive, got {tid}")
        self._tuples[tid] = DbTuple(relation, tid, values, endogenous)
        return tid

    # -- access -----------------------------------------------------------

    @property
    def schema(self) -> Dict[str, int]:
        return dict(self._schema)

    def arity(self, relation: str) -> int:
        if relation not in self._schema:
            raise ModelError(f"unknown relation {relation}")
        return self._schema[relation]

    def __len__(self) -> int:
        return len(self._tuples)

    def __contains__(self, tid: int) -> bool:
        return tid in self._tuples

    def get(self, tid: int) -> DbTuple:
        if tid not in self._tuples:
            raise ModelError(f"unknown tid {tid}")
        return self._tuples[tid]

    def tids(self) -> List[int]:
        return sorted(self._tuples)

    def endogenous_tids(self) -> List[int]:
        return sorted(t for t, tup in self._tuples.items() if tup.endogenous)

    def tuples(self) -> List[DbTuple]:
        """All tuples in canonical (relation, tid) order."""
        return sorted(self._tuples.values(), key=lambda t: (t.relation, t.tid))

    def tuples_of(self, relation: str) -> List[DbTuple]:
        return [t for t in self.tuples() if t.relation == relation]

    def value_at(self, ref: PositionRef) -> Constant:
        tup = self.get(ref.tid)
        if tup.relation != ref.relation:
            raise ModelError(f"tid {ref.tid} belongs to {tup.relation}, not {ref.relation}")
        if not 1 <= ref.position <= len(tup.values):
            raise ModelError(f"position {ref.position} out of range for {ref.render()}")
        return tup.values[ref.position - 1]

    def non_null_positions(self) -> List[PositionRef]:
        refs = []
        for tup in self.tuples():
            for j, v in enumerate(tup.values, start=1):
                if not v.is_null():
                    refs.append(PositionRef(tup.relation, tup.tid, j))
        return refs

    # -- pure operations ---------------------------------------------------

    def _clone_schema(self) -> "Instance":
        out = Instance()
        out._schema = dict(self._schema)
        return out

    def delete_tuples(self, tids: Iterable[int]) -> "Instance":
        """Return D minus the given tuples; the input instance is unchanged."""
        tids = set(tids)
        for tid in tids:
            if tid not in self._tuples:
                raise ModelError(f"unknown tid {tid}")
        out = self._clone_schema()
        out._tuples = {t: tup for t, tup in self._tuples.items() if t not in tids}
        return out

    def apply_update(self, changes: Iterable[PositionRef]) -> "Instance":
        """Return the instance with every referenced position replaced by null.

        Tids are preserved: updates never create or destroy tuples.
        """
        by_tid: Dict[int, List[PositionRef]] = {}
        for ref in changes:
            self.value_at(ref)  # validates tid, relation and position
            by_tid.setdefault(ref.tid, []).append(ref)
        out = self._clone_schema()
        out._tuples = dict(self._tuples)
        for tid, refs in by_tid.items():
            tup = self._tuples[tid]
            values = list(tup.values)
            for ref in refs:
                values[ref.position - 1] = NULL
            out._tuples[tid] = DbTuple(tup.relation, tid, tuple(values), tup.endogenous)
        return out

    # -- equality ----------------------------------------------------------

    def _key(self) -> FrozenSet[Tuple[int, str, Tuple[Constant, ...], bool]]:
        return frozenset(
            (t, tup.relation, tup.values, tup.endogenous)
            for t, tup in self._tuples.items()
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def render(self) -> str:
        return "{" + ", ".join(t.render() for t in self.tuples()) + "}"


def delta_null(before: Instance, after: Instance) -> FrozenSet[PositionRef]:
    """The set of positions whose value was non-null in `before` and is null
    in `after`.

    Both instances must share tids and schema, and may differ only by
    null-replacements; anything else is an error.
    """
    if set(before.tids()) != set(after.tids()):
        raise ModelError("instances do not share the same tids")
    changed = set()
    for tid in before.tids():
        old = before.get(tid)
        new = after.get(tid)
        if old.relation != new.relation or len(old.values) != len(new.values):
            raise ModelError(f"tuple {tid} changed relation or arity")
        for j, (a, b) in enumerate(zip(old.values, new.values), start=1):
            if a == b:
                continue
            if not b.is_null():
                raise ModelError(
                    f"illegal change at {old.relation}[{tid};{j}]: "
                    f"{a.render()} -> {b.render()} is not a null-replacement"
                )
            if not a.is_null():
                changed.add(PositionRef(old.relation, tid, j))
    return frozenset(changed)
