import pytest

from repcause import (
    PositionRef,
    cardinality_null_repairs,
    is_consistent,
    negate_query_to_dc,
    null_repairs,
    null_repairs_oracle,
    parse_problem,
)


def deltas(records):
    return {r.delta for r in records}


def refs(*specs):
    return frozenset(PositionRef(rel, tid, pos) for rel, tid, pos in specs)


class TestNullRepairs:
    def test_two_tuple_chain(self, load):
        problem = load("example12.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        assert deltas(null_repairs(problem.instance, dcs)) == {
            refs(("P", 8, 2)),
            refs(("R", 9, 1)),
        }

    def test_chain_repairs_by_content(self, load):
        problem = load("example12.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        rendered = {r.repair.render() for r in null_repairs(problem.instance, dcs)}
        assert rendered == {
            "{P(8;1,null), R(9;2,1)}",
            "{P(8;1,2), R(9;null,1)}",
        }

    def test_three_change_candidate_is_not_minimal(self, load):
        problem = load("example12.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        big = refs(("P", 8, 1), ("P", 8, 2), ("R", 9, 1))
        assert is_consistent(problem.instance.apply_update(big), dcs)
        assert big not in deltas(null_repairs(problem.instance, dcs))

    def test_fan_out_instance(self, load):
        problem = load("example7.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        assert deltas(null_repairs(problem.instance, dcs)) == {
            refs(("S", 2, 1)),
            refs(("R", 3, 1), ("R", 4, 1), ("R", 5, 1)),
        }

    def test_triangle_instance_change_sets(self, load):
        problem = load("example6.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        assert deltas(null_repairs(problem.instance, dcs)) == {
            refs(("S", 5, 1)),
            refs(("R", 2, 1), ("R", 3, 2)),
            refs(("R", 2, 2), ("R", 3, 2)),
            refs(("R", 2, 1), ("R", 3, 1)),
            refs(("R", 2, 2), ("R", 3, 1)),
            refs(("R", 2, 1), ("S", 6, 1)),
            refs(("R", 2, 2), ("S", 6, 1)),
        }

    def test_consistent_instance_needs_no_change(self):
        problem = parse_problem("S(a).\nq :- S(X), R(X, Y)?")
        dcs = negate_query_to_dc(problem.query("q"))
        records = null_repairs(problem.instance, dcs)
        assert len(records) == 1 and records[0].delta == frozenset()

    def test_every_repair_is_consistent_and_minimal(self, load):
        problem = load("example6.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        for rec in null_repairs(problem.instance, dcs):
            assert is_consistent(rec.repair, dcs)
            for ref in rec.delta:
                smaller = problem.instance.apply_update(rec.delta - {ref})
                assert not is_consistent(smaller, dcs)


class TestCardinalityNullRepairs:
    def test_unique_minimum_change(self, load):
        problem = load("example6.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        records = cardinality_null_repairs(problem.instance, dcs)
        assert deltas(records) == {refs(("S", 5, 1))}
        assert records[0].kind == "cardinality-minimal"

    def test_singleton_beats_triple(self, load):
        problem = load("example7.cdl")
        dcs = negate_query_to_dc(problem.query("q"))
        assert deltas(cardinality_null_repairs(problem.instance, dcs)) == {
            refs(("S", 2, 1))
        }


class TestOracleAgreement:
    @pytest.mark.parametrize(
        "fixture", ["example6.cdl", "example7.cdl", "example12.cdl"]
    )
    def test_pruned_search_equals_exhaustive(self, load, fixture):
        problem = load(fixture)
        dcs = negate_query_to_dc(problem.query("q"))
        assert deltas(null_repairs(problem.instance, dcs)) == deltas(
            null_repairs_oracle(problem.instance, dcs)
        )
