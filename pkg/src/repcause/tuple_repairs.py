"""Tuple-deletion repairs for denial constraints.

Subset-maximal consistent subinstances are the complements of the minimal
hitting sets (transversals) of the conflict hypergraph, whose hyperedges are
the tid-sets of constraint violations. Cardinality-minimal repairs are the
hitting sets of minimum size. Hard inclusion dependencies are handled by
cascading deletions of unwitnessed premise tuples.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .lang import (
    DenialConstraint,
    InclusionDependency,
    LangError,
    is_consistent,
    unsupported_premises,
    violations,
)
from .model import Instance


@dataclass(frozen=True)
class ConflictHypergraph:
    vertices: FrozenSet[int]
    edges: FrozenSet[FrozenSet[int]]


def conflict_hypergraph(
    instance: Instance, dcs: Sequence[DenialConstraint]
) -> ConflictHypergraph:
    edges = frozenset(w.tids for w in violations(instance, dcs))
    vertices = frozenset(t for e in edges for t in e)
    return ConflictHypergraph(vertices, edges)


def minimal_hitting_sets(
    edges: Iterable[FrozenSet[int]],
    allowed: Optional[Set[int]] = None,
) -> List[FrozenSet[int]]:
    """All subset-minimal sets intersecting every edge.

    Branch on the elements of some yet-unhit edge; the candidates collected
    this way cover every minimal transversal, and a final pairwise subset
    filter removes the non-minimal ones. With `allowed` given, only those
    vertices may be picked; an edge with no allowed vertex makes the result
    empty.
    """
    edge_list = sorted({e for e in edges}, key=lambda e: (len(e), sorted(e)))
    if allowed is not None:
        edge_list = [e & frozenset(allowed) for e in edge_list]
        if any(not e for e in edge_list):
            return []

    found: Set[FrozenSet[int]] = set()

    def search(chosen: FrozenSet[int]) -> None:
        for edge in edge_list:
            if not (edge & chosen):
                for v in sorted(edge):
                    search(chosen | {v})
                return
        found.add(chosen)

    search(frozenset())
    minimal = [
        h for h in found if not any(other < h for other in found)
    ]
    return sorted(minimal, key=lambda h: (len(h), sorted(h)))


@dataclass(frozen=True)
class RepairRecord:
    repair: Instance
    removed: FrozenSet[int]
    kind: str  # "subset-minimal" | "cardinality-minimal"


def _records(
    instance: Instance, hitting_sets: Sequence[FrozenSet[int]], kind: str
) -> List[RepairRecord]:
    return [
        RepairRecord(instance.delete_tuples(h), h, kind)
        for h in sorted(hitting_sets, key=lambda h: (len(h), sorted(h)))
    ]


def s_repairs(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    endogenous_only: bool = False,
) -> List[RepairRecord]:
    """All subset-maximal consistent subinstances, as (repair, removed) pairs.

    With `endogenous_only`, removed-sets avoid exogenous tuples; a violation
    made entirely of exogenous tuples then admits no repair.
    """
    graph = conflict_hypergraph(instance, dcs)
    allowed = set(instance.endogenous_tids()) if endogenous_only else None
    hits = minimal_hitting_sets(graph.edges, allowed=allowed)
    if not graph.edges:
        hits = [frozenset()]
    return _records(instance, hits, "subset-minimal")


def c_repairs(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    endogenous_only: bool = False,
) -> List[RepairRecord]:
    subs = s_repairs(instance, dcs, endogenous_only=endogenous_only)
    if not subs:
        return []
    best = min(len(r.removed) for r in subs)
    return [
        RepairRecord(r.repair, r.removed, "cardinality-minimal")
        for r in subs
        if len(r.removed) == best
    ]


def diff_sets(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    tid: int,
    mode: str = "subset",
) -> List[FrozenSet[int]]:
    """Removed-sets of the repairs (subset- or cardinality-minimal ones,
    by `mode`) that delete the given tuple."""
    if mode == "subset":
        records = s_repairs(instance, dcs)
    elif mode == "cardinality":
        records = c_repairs(instance, dcs)
    else:
        raise LangError(f"unknown diff mode {mode!r}")
    return [r.removed for r in records if tid in r.removed]


def _cascade_ids(
    instance: Instance, ids: Sequence[InclusionDependency]
) -> Instance:
    """Delete premise tuples with no conclusion witness, to a fixpoint."""
    current = instance
    while True:
        bad = unsupported_premises(current, ids)
        if not bad:
            return current
        current = current.delete_tuples(bad)


def s_repairs_under_hard_ics(
    instance: Instance,
    dcs: Sequence[DenialConstraint],
    ids: Sequence[InclusionDependency],
) -> List[RepairRecord]:
    """Subset-maximal D' ⊆ D satisfying both the DCs and the inclusion
    dependencies, deletion-only.

    Every such D' is contained in some DC-only repair, and deleting tuples
    never introduces a DC violation, so cascading the unwitnessed premises
    out of each DC-only repair reaches every candidate; a maximality filter
    finishes the job.
    """
    if not ids:
        return s_repairs(instance, dcs)
    candidates: Set[FrozenSet[int]] = set()
    for rec in s_repairs(instance, dcs):
        settled = _cascade_ids(rec.repair, ids)
        candidates.add(frozenset(set(instance.tids()) - set(settled.tids())))
    removed_sets = [
        r for r in candidates if not any(other < r for other in candidates)
    ]
    return _records(
        instance,
        sorted(removed_sets, key=lambda h: (len(h), sorted(h))),
        "subset-minimal",
    )


def verify_repair(
    instance: Instance, record: RepairRecord, dcs: Sequence[DenialConstraint]
) -> bool:
    """The repair is consistent and adding back any removed tuple is not."""
    if not is_consistent(record.repair, dcs):
        return False
    for tid in record.removed:
        grown = instance.delete_tuples(record.removed - {tid})
        if is_consistent(grown, dcs):
            return False
    return True
