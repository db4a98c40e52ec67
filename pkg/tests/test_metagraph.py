from __future__ import annotations

import random

import pytest

from custweave.errors import (
    DomainMismatch,
    DuplicateEdgeId,
    EmptyEdge,
    NotInVertex,
    UnknownEdge,
    UnknownElement,
)
from custweave.metagraph import (
    Triple,
    adjacency_column,
    adjacency_row,
    build_adjacency,
    closure,
    coinput,
    cooutput,
    edge,
    is_independent,
    is_input_independent,
    is_metapath,
    is_output_independent,
    is_simple_path,
    is_submetagraph,
    new_metagraph,
    sum_adjacency,
)
from oracles import enumerate_simple_paths, random_metagraph


def t(ci, co, *path) -> Triple:
    return Triple(frozenset(ci), frozenset(co), tuple(path))


CHAIN6_ADJACENCY = {
    ("x1", "x3"): {t({"x2"}, {"x4"}, "e1")},
    ("x1", "x4"): {t({"x2"}, {"x3"}, "e1")},
    ("x2", "x3"): {t({"x1"}, {"x4"}, "e1")},
    ("x2", "x4"): {t({"x1"}, {"x3"}, "e1")},
    ("x2", "x5"): {t((), (), "e2")},
    ("x4", "x6"): {t({"x5"}, (), "e3")},
    ("x5", "x6"): {t({"x4"}, (), "e3")},
}

CHAIN6_CLOSURE_EXTRA = {
    ("x1", "x6"): {t({"x2", "x5"}, {"x3", "x4"}, "e1", "e3")},
    ("x2", "x6"): {
        t({"x1", "x5"}, {"x3", "x4"}, "e1", "e3"),
        t({"x4"}, {"x5"}, "e2", "e3"),
    },
}


class TestConstruction:
    def test_worked_example_is_valid(self, chain6):
        assert chain6.elements == frozenset({"x1", "x2", "x3", "x4", "x5", "x6"})
        assert chain6.edge_ids == ("e1", "e2", "e3")

    def test_empty_metagraph(self):
        s = new_metagraph(set(), [])
        assert s.elements == frozenset()
        assert build_adjacency(s).cells == {}

    def test_empty_edge_rejected(self):
        with pytest.raises(EmptyEdge):
            new_metagraph({"a"}, [edge("e", (), ())])

    def test_unknown_element_rejected(self):
        with pytest.raises(UnknownElement):
            new_metagraph({"a"}, [edge("e", {"a"}, {"b"})])

    def test_duplicate_edge_id_rejected(self):
        with pytest.raises(DuplicateEdgeId):
            new_metagraph({"a", "b"}, [edge("e", {"a"}, {"b"}), edge("e", {"b"}, {"a"})])


class TestCoinputCooutput:
    def test_coinput(self, chain6):
        assert coinput("x1", chain6.edge("e1")) == {"x2"}

    def test_cooutput(self, chain6):
        assert cooutput("x3", chain6.edge("e1")) == {"x4"}

    def test_singleton_invertex(self):
        e = edge("e", {"a"}, {"b"})
        assert coinput("a", e) == frozenset()

    def test_not_in_vertex(self, chain6):
        with pytest.raises(NotInVertex):
            coinput("x3", chain6.edge("e1"))
        with pytest.raises(NotInVertex):
            cooutput("x1", chain6.edge("e1"))


class TestAdjacency:
    def test_worked_example_cells(self, chain6):
        assert dict(build_adjacency(chain6).cells) == CHAIN6_ADJACENCY

    def test_edgeless(self):
        s = new_metagraph({"a", "b"}, [])
        assert build_adjacency(s).cells == {}

    def test_single_edge_two_sources(self):
        s = new_metagraph({"a", "b", "c"}, [edge("e", {"a", "b"}, {"c"})])
        adj = build_adjacency(s)
        assert set(adj.cells) == {("a", "c"), ("b", "c")}
        assert adj.cell("a", "c") == {t({"b"}, (), "e")}

    def test_triple_count_matches_vertex_products(self):
        rng = random.Random(7)
        for _ in range(50):
            s = random_metagraph(rng)
            adj = build_adjacency(s)
            assert adj.triple_count() == sum(
                len(e.invertex) * len(e.outvertex) for e in s.edges
            )

    def test_overlapping_vertex_sets_yield_self_cell(self):
        s = new_metagraph({"a", "b"}, [edge("e", {"a"}, {"a", "b"})])
        adj = build_adjacency(s)
        assert adj.cell("a", "a") == {t((), {"b"}, "e")}
        assert adj.cell("a", "b") == {t((), {"a"}, "e")}

    def test_column_and_row(self, chain6):
        col = adjacency_column(chain6, "x6")
        assert col == {
            ("x4", "x6"): frozenset({t({"x5"}, (), "e3")}),
            ("x5", "x6"): frozenset({t({"x4"}, (), "e3")}),
        }
        assert adjacency_row(chain6, "x3") == {}
        assert adjacency_column(chain6, "x1") == {}

    def test_column_unknown_element(self, chain6):
        with pytest.raises(UnknownElement):
            adjacency_column(chain6, "nope")

    def test_row_column_agree_with_full_matrix(self):
        rng = random.Random(11)
        for _ in range(25):
            s = random_metagraph(rng)
            adj = build_adjacency(s)
            for x in s.elements:
                col = adjacency_column(s, x)
                assert col == {k: v for k, v in adj.cells.items() if k[1] == x}
                row = adjacency_row(s, x)
                assert row == {k: v for k, v in adj.cells.items() if k[0] == x}


class TestSum:
    def test_identity(self, chain6):
        adj = build_adjacency(chain6)
        empty = build_adjacency(new_metagraph(chain6.elements, []))
        assert sum_adjacency(adj, empty) == adj

    def test_split_reassembles(self, chain6):
        part1 = new_metagraph(chain6.elements, [chain6.edge("e1")])
        part2 = new_metagraph(chain6.elements, [chain6.edge("e2"), chain6.edge("e3")])
        combined = sum_adjacency(build_adjacency(part1), build_adjacency(part2))
        assert combined == build_adjacency(chain6)

    def test_commutes(self, chain6):
        a = build_adjacency(new_metagraph(chain6.elements, [chain6.edge("e1")]))
        b = build_adjacency(new_metagraph(chain6.elements, [chain6.edge("e3")]))
        assert sum_adjacency(a, b) == sum_adjacency(b, a)

    def test_union_split_property(self):
        rng = random.Random(13)
        for _ in range(25):
            s = random_metagraph(rng)
            cut = rng.randint(0, len(s.edges))
            s1 = new_metagraph(s.elements, s.edges[:cut])
            s2 = new_metagraph(s.elements, s.edges[cut:])
            assert sum_adjacency(build_adjacency(s1), build_adjacency(s2)) == build_adjacency(s)

    def test_domain_mismatch(self, chain6):
        other = build_adjacency(new_metagraph({"a"}, []))
        with pytest.raises(DomainMismatch):
            sum_adjacency(build_adjacency(chain6), other)


class TestClosure:
    def test_worked_example(self, chain6):
        expected = {k: frozenset(v) for k, v in CHAIN6_ADJACENCY.items()}
        for key, extra in CHAIN6_CLOSURE_EXTRA.items():
            expected[key] = expected.get(key, frozenset()) | frozenset(extra)
        got = closure(chain6)
        assert dict(got.cells) == expected
        assert not got.truncated

    def test_edgeless(self):
        assert closure(new_metagraph({"a"}, [])).cells == {}

    def test_contains_adjacency(self):
        rng = random.Random(17)
        for _ in range(25):
            s = random_metagraph(rng)
            adj = build_adjacency(s)
            clo = closure(s)
            for key, cell in adj.cells.items():
                assert cell <= clo.cell(*key)

    def test_matches_bruteforce_enumeration(self):
        rng = random.Random(19)
        for _ in range(60):
            s = random_metagraph(rng)
            expected = {k: frozenset(v) for k, v in enumerate_simple_paths(s).items()}
            assert dict(closure(s).cells) == expected

    def test_every_triple_is_a_simple_path(self):
        rng = random.Random(23)
        for _ in range(25):
            s = random_metagraph(rng)
            for source, target, triple in closure(s).iter_triples():
                assert is_simple_path(s, triple.path, source, target).holds

    def test_metapath_consistency(self):
        rng = random.Random(29)
        for _ in range(15):
            s = random_metagraph(rng)
            for source, target, triple in closure(s).iter_triples():
                assert is_metapath(s, triple.path, {source} | triple.coinput, {target})

    def test_truncation_flag(self, chain6):
        capped = closure(chain6, max_path_len=1)
        assert capped.truncated
        assert dict(capped.cells) == dict(build_adjacency(chain6).cells)
        assert not closure(chain6, max_path_len=2).truncated

    def test_cap_at_longest_path_not_truncated(self):
        s = new_metagraph(
            {"a", "b", "c", "d"},
            [edge("e1", {"a"}, {"b"}), edge("e2", {"b"}, {"c"}), edge("e3", {"c"}, {"d"})],
        )
        assert not closure(s, max_path_len=3).truncated
        assert closure(s, max_path_len=2).truncated

    def test_cycle_terminates(self):
        s = new_metagraph({"a", "b"}, [edge("e1", {"a"}, {"b"}), edge("e2", {"b"}, {"a"})])
        clo = closure(s)
        assert t((), {"b"}, "e1", "e2") in clo.cell("a", "a")
        expected = {k: frozenset(v) for k, v in enumerate_simple_paths(s).items()}
        assert dict(clo.cells) == expected


class TestSimplePath:
    def test_worked_example_path(self, chain6):
        check = is_simple_path(chain6, ["e1", "e3"], "x2", "x6")
        assert check.holds
        assert check.length == 2
        assert check.coinput == {"x1", "x5"}
        assert check.cooutput == {"x3", "x4"}

    def test_target_not_in_last_outvertex(self, chain6):
        assert not is_simple_path(chain6, ["e2"], "x2", "x6").holds

    def test_disconnected_consecutive_edges(self, chain6):
        # outvertex of e1 and invertex of e2 do not overlap
        assert not is_simple_path(chain6, ["e1", "e2"], "x1", "x5").holds

    def test_repeated_edge_not_simple(self, chain6):
        assert not is_simple_path(chain6, ["e1", "e1"], "x1", "x4").holds

    def test_empty_sequence(self, chain6):
        assert not is_simple_path(chain6, [], "x1", "x1").holds

    def test_unknown_edge(self, chain6):
        with pytest.raises(UnknownEdge):
            is_simple_path(chain6, ["zap"], "x1", "x6")


class TestMetapath:
    def test_worked_example(self, chain6):
        assert is_metapath(chain6, {"e1", "e2", "e3"}, {"x1", "x2"}, {"x6"})

    def test_target_not_covered(self, chain6):
        assert not is_metapath(chain6, {"e1"}, {"x1", "x2"}, {"x6"})

    def test_net_inputs_exceed_sources(self, chain6):
        # x5 is consumed by e3 but never produced inside {e1, e3}
        assert not is_metapath(chain6, {"e1", "e3"}, {"x1", "x2"}, {"x6"})

    def test_unknown_ids(self, chain6):
        with pytest.raises(UnknownEdge):
            is_metapath(chain6, {"zap"}, {"x1"}, {"x6"})
        with pytest.raises(UnknownElement):
            is_metapath(chain6, {"e1"}, {"zap"}, {"x6"})


class TestIndependence:
    def test_inner_edge_subgraph(self, chain6):
        s1 = new_metagraph({"x2", "x5"}, [chain6.edge("e2")])
        assert is_submetagraph(s1, chain6)
        assert is_input_independent(s1, chain6)
        assert not is_output_independent(s1, chain6)
        assert not is_independent(s1, chain6)

    def test_reflexive(self, chain6):
        assert is_independent(chain6, chain6)

    def test_produced_element_without_its_edge(self, chain6):
        s1 = new_metagraph({"x3"}, [])
        assert not is_input_independent(s1, chain6)

    def test_not_a_submetagraph(self, chain6):
        s1 = new_metagraph({"zz"}, [])
        assert not is_submetagraph(s1, chain6)
        assert not is_independent(s1, chain6)
