"""Qualitative constraint networks: algebraic closure, backtracking, realization."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .endpoints import RatInterval, enumerate_configs
from .relations import FULL, BasicRelation, ParseError, RelationSet, compose_sets

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class RealizationError(RuntimeError):
    """The precedence graph of a scenario has a cycle, so it was not consistent."""


@dataclass
class Network:
    """Constraints between named interval variables.

    Edges are stored once, for ``i < j`` in variable order; the reverse view
    is the converse set. Universal edges are implicit and never stored.
    """

    variables: list[str] = field(default_factory=list)
    constraints: dict[tuple[int, int], RelationSet] = field(default_factory=dict)

    def copy(self) -> Network:
        return Network(list(self.variables), dict(self.constraints))

    def index(self, name: str, create: bool = False) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            if not create:
                raise KeyError(name) from None
            if not _NAME.match(name):
                raise ParseError(f"bad variable name {name!r}")
            self.variables.append(name)
            return len(self.variables) - 1

    def get(self, i: int, j: int) -> RelationSet:
        if i == j:
            raise ValueError("no self edges")
        if i < j:
            return self.constraints.get((i, j), FULL)
        return self.constraints.get((j, i), FULL).converse

    def set(self, i: int, j: int, rs: RelationSet) -> None:
        if i == j:
            raise ValueError("no self edges")
        if i > j:
            i, j, rs = j, i, rs.converse
        if rs.is_full:
            self.constraints.pop((i, j), None)
        else:
            self.constraints[i, j] = rs

    def constrain(self, a: str, b: str, rs: RelationSet) -> None:
        """Intersect the edge ``a -> b`` with ``rs``, declaring variables on first use."""
        i, j = self.index(a, create=True), self.index(b, create=True)
        if i == j:
            raise ParseError(f"self edge on {a}")
        self.set(i, j, self.get(i, j) & rs)

    def relation(self, a: str, b: str) -> RelationSet:
        return self.get(self.index(a), self.index(b))

    def pairs(self) -> Iterable[tuple[int, int]]:
        n = len(self.variables)
        return ((i, j) for i in range(n) for j in range(i + 1, n))

    def is_atomic(self) -> bool:
        return all(len(self.get(i, j)) == 1 for i, j in self.pairs())

    def refines(self, other: Network) -> bool:
        """Every edge of ``self`` is contained in ``other``'s (same variables)."""
        return all(self.get(i, j) <= other.get(i, j) for i, j in self.pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self.variables == other.variables and self.constraints == other.constraints

    def to_text(self, include_universal: bool = False) -> str:
        lines = []
        for i, j in self.pairs():
            rs = self.get(i, j)
            if rs.is_full and not include_universal:
                continue
            lines.append(f"{self.variables[i]} {self.variables[j]} : {rs}")
        return "\n".join(lines) + ("\n" if lines else "")


def parse_network(text: str) -> Network:
    net = Network()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rels = line.partition(":")
        names = head.split()
        tokens = rels.split()
        if not sep or len(names) != 2 or not tokens:
            raise ParseError(f"line {lineno}: expected '<var> <var> : <rel> ...', got {raw!r}")
        for name in names:
            if not _NAME.match(name):
                raise ParseError(f"line {lineno}: bad variable name {name!r}")
        try:
            rs = RelationSet.parse(tokens)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        try:
            net.constrain(names[0], names[1], rs)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return net


def path_consistency(net: Network) -> Network | None:
    """Algebraic closure of ``net``; ``None`` when some edge becomes empty."""
    out = net.copy()
    n = len(out.variables)
    queue = deque((i, j) for i in range(n) for j in range(n) if i != j)
    queued = set(queue)
    while queue:
        i, j = queue.popleft()
        queued.discard((i, j))
        for k in range(n):
            if k in (i, j):
                continue
            # refine (i, k) through j and (k, j) through i
            for a, b, via in ((i, k, j), (k, j, i)):
                old = out.get(a, b)
                new = old & compose_sets(out.get(a, via), out.get(via, b))
                if new != old:
                    if not new:
                        return None
                    out.set(a, b, new)
                    for edge in ((a, b), (b, a)):
                        if edge not in queued:
                            queued.add(edge)
                            queue.append(edge)
    return out


def solve(net: Network) -> Network | None:
    """A closed atomic refinement of ``net``, or ``None`` if there is none.

    Branches on the undecided edge with the fewest options (earliest pair on
    ties), trying relations in display order.
    """
    closed = path_consistency(net)
    if closed is None:
        return None
    open_edges = [(len(closed.get(i, j)), i, j) for i, j in closed.pairs()
                  if len(closed.get(i, j)) > 1]
    if not open_edges:
        return closed
    _, i, j = min(open_edges)
    for r in closed.get(i, j):
        trial = closed.copy()
        trial.set(i, j, RelationSet.of(r))
        found = solve(trial)
        if found is not None:
            return found
    return None


def _cmp(a: int, b: int) -> str:
    return "<" if a < b else ("=" if a == b else ">")


# Endpoint order per basic relation between p and q, as the comparisons
# (p.start, q.start), (p.start, q.end), (p.end, q.start), (p.end, q.end).
_ENDPOINT_ORDER: dict[BasicRelation, tuple[str, str, str, str]] = {
    cfg.relation(0, 1): (_cmp(cfg.ranks[0], cfg.ranks[2]), _cmp(cfg.ranks[0], cfg.ranks[3]),
                         _cmp(cfg.ranks[1], cfg.ranks[2]), _cmp(cfg.ranks[1], cfg.ranks[3]))
    for cfg in enumerate_configs(2)
}


def realize(scenario: Network) -> dict[str, RatInterval]:
    """Integer endpoints reproducing every edge of an atomic scenario."""
    n = len(scenario.variables)
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    less: list[tuple[int, int]] = [(2 * i, 2 * i + 1) for i in range(n)]
    for i, j in scenario.pairs():
        r = scenario.get(i, j).single()
        pts_i, pts_j = (2 * i, 2 * i + 1), (2 * j, 2 * j + 1)
        pairs = ((pts_i[0], pts_j[0]), (pts_i[0], pts_j[1]), (pts_i[1], pts_j[0]), (pts_i[1], pts_j[1]))
        for (a, b), c in zip(pairs, _ENDPOINT_ORDER[r]):
            if c == "=":
                parent[find(a)] = find(b)
            elif c == "<":
                less.append((a, b))
            else:
                less.append((b, a))
    succ: dict[int, set[int]] = {}
    indeg: dict[int, int] = {find(x): 0 for x in range(2 * n)}
    for a, b in less:
        a, b = find(a), find(b)
        if a == b:
            raise RealizationError("endpoint forced before itself")
        if b not in succ.setdefault(a, set()):
            succ[a].add(b)
            indeg[b] += 1
    # longest-path layering
    rank = {x: 0 for x, d in indeg.items() if d == 0}
    queue = deque(sorted(rank))
    done = 0
    while queue:
        x = queue.popleft()
        done += 1
        for y in sorted(succ.get(x, ())):
            rank[y] = max(rank.get(y, 0), rank[x] + 1)
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    if done != len(indeg):
        raise RealizationError("cycle in endpoint precedence graph")
    return {
        name: RatInterval(rank[find(2 * i)], rank[find(2 * i + 1)])
        for i, name in enumerate(scenario.variables)
    }


def format_realization(assignment: dict[str, RatInterval]) -> str:
    return "".join(f"{name} = [{iv.start}, {iv.end}]\n" for name, iv in assignment.items())

