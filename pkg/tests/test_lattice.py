from __future__ import annotations

from itertools import combinations

import pytest

from allenkit.lattice import EDGES, adjacency_text, conceptual_distance, is_connected, neighbors
from allenkit.relations import (
    B, BI, COMPOSITION_TABLE, D, DI, E, EMPTY, F, FI, M, MI, NAMED_UNIONS, ORDER, OV, OVI, S, SI,
    RelationSet,
)


def test_edge_count_and_symmetry():
    assert len(EDGES) == 16
    for r in ORDER:
        for n in neighbors(r):
            assert r in neighbors(n)
            assert r not in neighbors(r)


@pytest.mark.parametrize("r,expected", [
    (E, "fi s si f"),
    (B, "m"),
    (OV, "m fi s"),
    (D, "s f"),
    (OVI, "si f mi"),
])
def test_neighbors(r, expected):
    assert str(neighbors(r)) == expected


def test_converse_is_an_automorphism():
    for r in ORDER:
        assert neighbors(r.converse) == neighbors(r).converse


def test_distances():
    assert conceptual_distance(B, B) == 0
    assert conceptual_distance(B, M) == 1
    assert conceptual_distance(B, BI) == 8
    assert conceptual_distance(S, F) == 2
    for a, b in combinations(ORDER, 2):
        assert conceptual_distance(a, b) == conceptual_distance(b, a)


def test_connectivity():
    assert is_connected(EMPTY)
    assert is_connected(RelationSet.of(D))
    assert not is_connected(RelationSet.of(B, BI))
    assert not is_connected(RelationSet.of(B, OV))
    assert is_connected(RelationSet.of(B, M, OV))


def test_named_unions_and_table_entries_are_connected():
    assert all(is_connected(rs) for rs in NAMED_UNIONS.values())
    assert all(is_connected(rs) for rs in COMPOSITION_TABLE.values())


def test_adjacency_text():
    lines = adjacency_text().splitlines()
    assert len(lines) == 13
    assert lines[0] == "b: m"
    assert "e: fi s si f" in lines
