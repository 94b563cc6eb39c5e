"""Conceptual-neighbourhood lattice of the 13 basic relations."""

from __future__ import annotations

from collections import deque

from .relations import B, BI, D, DI, E, F, FI, M, MI, OV, OVI, ORDER, S, SI, BasicRelation, RelationSet

# Drawn as two chains plus the four edges through e.
_CHAINS = (
    (B, M, OV, FI, DI, SI, OVI),
    (OV, S, D, F, OVI, MI, BI),
    (S, E, SI),
    (FI, E, F),
)

EDGES: frozenset[frozenset[BasicRelation]] = frozenset(
    frozenset(pair) for chain in _CHAINS for pair in zip(chain, chain[1:])
)

_ADJ: dict[BasicRelation, RelationSet] = {
    r: RelationSet(other for edge in EDGES if r in edge for other in edge if other != r)
    for r in ORDER
}


def neighbors(r: BasicRelation) -> RelationSet:
    return _ADJ[r]


def is_connected(rs: RelationSet) -> bool:
    """Whether ``rs`` induces a connected subgraph; empty and singleton sets are."""
    members = list(rs)
    if len(members) <= 1:
        return True
    seen = {members[0]}
    queue = deque([members[0]])
    while queue:
        r = queue.popleft()
        for n in _ADJ[r]:
            if n in rs and n not in seen:
                seen.add(n)
                queue.append(n)
    return len(seen) == len(members)


def conceptual_distance(r1: BasicRelation, r2: BasicRelation) -> int:
    """Number of lattice edges on a shortest path from ``r1`` to ``r2``."""
    dist = {r1: 0}
    queue = deque([r1])
    while queue:
        r = queue.popleft()
        if r == r2:
            return dist[r]
        for n in _ADJ[r]:
            if n not in dist:
                dist[n] = dist[r] + 1
                queue.append(n)
    raise AssertionError("lattice is connected")


def adjacency_text() -> str:
    return "".join(f"{r}: {neighbors(r)}\n" for r in ORDER)
