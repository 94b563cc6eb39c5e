"""Meets-axiom saturation over interval variables.

Facts are kept as point classes: every variable owns a start point and an end
point, ``x || y`` asserts ``end(x) == start(y)`` and equal points are merged in
a union-find. Under that encoding M1 holds by construction and M4 is the merge
of two variables sharing both point classes. A state is contradictory when the
start-before-end precedence graph over point classes has a cycle.

Besides the class structure, the state remembers which meets literals were
asserted explicitly (by a schema, M2 case, M3 or M5). Any other literal that
holds is an M1 consequence, and is recorded as such when a proof uses it.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from .relations import B, D, E, F, M, OV, S, BasicRelation


class DerivationFailure(RuntimeError):
    """The engine could not close a goal; indicates an engine or strategy bug."""


class Origin(enum.Enum):
    GIVEN = "given"
    SCHEMA = "schema-bound"
    M3 = "m3-fresh"
    M5 = "m5-sum"
    M2 = "m2-witness"


@dataclass(frozen=True)
class IntervalVar:
    id: int
    name: str
    origin: Origin = Origin.GIVEN

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Meets:
    x: IntervalVar
    y: IntervalVar

    def __str__(self) -> str:
        return f"{self.x}||{self.y}"


@dataclass(frozen=True)
class Eq:
    x: IntervalVar
    y: IntervalVar

    def __str__(self) -> str:
        return f"{self.x}={self.y}"


Literal = Meets | Eq


@dataclass(frozen=True)
class RuleApp:
    """One applied rule instance, rendered like ``M1: [a||b; a||c; d||b] => d||c``."""

    rule: str
    premises: tuple[Literal, ...] = ()
    conclusions: tuple[Literal, ...] = ()
    note: str = ""

    def __str__(self) -> str:
        text = self.rule
        if self.premises or self.conclusions:
            prem = "; ".join(map(str, self.premises))
            concl = ", ".join(map(str, self.conclusions))
            if not self.premises:
                text += f": {concl}"
            elif not self.conclusions:
                text += f": [{prem}]"
            else:
                text += f": [{prem}] => {concl}"
        if self.note:
            text += f" ({self.note})"
        return text


START, END = "start", "end"


class DerivationState:
    def __init__(self) -> None:
        self.vars: list[IntervalVar] = []
        self._points: list[int] = []      # point union-find; var i owns 2i and 2i+1
        self._var_parent: list[int] = []  # equality union-find over var ids
        self.explicit: list[tuple[int, int]] = []
        self.m1_derived: set[tuple[int, int]] = set()
        self.trace: list[RuleApp] = []
        self.contradiction: RuleApp | None = None
        self._names: set[str] = set()
        self._reach: dict[int, set[int]] | None = None

    # -- construction -------------------------------------------------------

    def copy(self) -> DerivationState:
        other = copy.copy(self)
        other.vars = list(self.vars)
        other._points = list(self._points)
        other._var_parent = list(self._var_parent)
        other.explicit = list(self.explicit)
        other.m1_derived = set(self.m1_derived)
        other.trace = list(self.trace)
        other._names = set(self._names)
        other._reach = None
        return other

    def new_var(self, base: str, origin: Origin = Origin.GIVEN) -> IntervalVar:
        name, n = base, 0
        while name in self._names:
            n += 1
            name = f"{base}{n}"
        var = IntervalVar(len(self.vars), name, origin)
        self.vars.append(var)
        self._names.add(name)
        self._points.extend((2 * var.id, 2 * var.id + 1))
        self._var_parent.append(var.id)
        self._reach = None
        return var

    def var(self, name: str) -> IntervalVar:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    def add_meets(self, x: IntervalVar, y: IntervalVar) -> Meets:
        self._union(self.point(x, END), self.point(y, START))
        self.explicit.append((x.id, y.id))
        return Meets(x, y)

    def add_eq(self, x: IntervalVar, y: IntervalVar) -> None:
        a, b = self.rep(x).id, self.rep(y).id
        if a != b:
            lo, hi = min(a, b), max(a, b)
            self._var_parent[hi] = lo
        self._union(self.point(x, START), self.point(y, START))
        self._union(self.point(x, END), self.point(y, END))

    # -- queries ------------------------------------------------------------

    def point(self, x: IntervalVar, side: str) -> int:
        return self._find(2 * x.id + (side == END))

    def rep(self, x: IntervalVar) -> IntervalVar:
        i = x.id
        while self._var_parent[i] != i:
            i = self._var_parent[i]
        return self.vars[i]

    def reps(self) -> list[IntervalVar]:
        return [v for v in self.vars if self._var_parent[v.id] == v.id]

    def holds(self, lit: Literal) -> bool:
        if isinstance(lit, Meets):
            return self.point(lit.x, END) == self.point(lit.y, START)
        return self.rep(lit.x) == self.rep(lit.y)

    def meets_literals(self) -> set[tuple[str, str]]:
        """Every meets fact between representatives, by name."""
        reps = self.reps()
        return {
            (x.name, y.name)
            for x in reps
            for y in reps
            if self.point(x, END) == self.point(y, START)
        }

    def is_explicit(self, lit: Meets) -> bool:
        key = (self.rep(lit.x).id, self.rep(lit.y).id)
        return any((self.rep(self.vars[a]).id, self.rep(self.vars[b]).id) == key
                   for a, b in self.explicit)

    def is_asserted(self, lit: Meets) -> bool:
        """Explicit without appeal to any variable equality."""
        return (lit.x.id, lit.y.id) in self.explicit

    def explicit_literals(self) -> list[Meets]:
        return [Meets(self.vars[a], self.vars[b]) for a, b in self.explicit]

    def ending_at(self, point: int) -> list[IntervalVar]:
        return [v for v in self.reps() if self.point(v, END) == point]

    def starting_at(self, point: int) -> list[IntervalVar]:
        return [v for v in self.reps() if self.point(v, START) == point]

    def precedes(self, a: int, b: int) -> bool:
        """Whether point ``a`` strictly precedes point ``b`` (a chain of intervals joins them)."""
        return self._find(b) in self._reachable()[self._find(a)]

    def compare(self, a: int, b: int) -> str | None:
        a, b = self._find(a), self._find(b)
        if a == b:
            return "="
        if self.precedes(a, b):
            return "<"
        if self.precedes(b, a):
            return ">"
        return None

    def chain(self, a: int, b: int) -> list[IntervalVar] | None:
        """Shortest meeting chain of intervals from point ``a`` to point ``b``."""
        a, b = self._find(a), self._find(b)
        edges = self._edges()
        prev: dict[int, tuple[int, IntervalVar]] = {}
        frontier, seen = [a], {a}
        while frontier:
            nxt = []
            for node in frontier:
                for v, target in edges.get(node, []):
                    if target in seen:
                        continue
                    seen.add(target)
                    prev[target] = (node, v)
                    nxt.append(target)
            frontier = nxt
        if b not in prev:
            return None
        out, node = [], b
        while node != a:
            node, v = prev[node]
            out.append(v)
        return out[::-1]

    # -- rules --------------------------------------------------------------

    def saturate(self) -> DerivationState:
        """Close under M4 and flag any irrefl/asym/atrans violation."""
        changed = True
        while changed:
            changed = False
            seen: dict[tuple[int, int], IntervalVar] = {}
            for v in self.reps():
                key = (self.point(v, START), self.point(v, END))
                if key in seen:
                    self._apply_m4(seen[key], v)
                    changed = True
                    break
                seen[key] = v
        self._reach = None
        if self.contradiction is None:
            self.contradiction = self._find_violation()
            if self.contradiction is not None:
                self.trace.append(self.contradiction)
        return self

    def _apply_m4(self, q: IntervalVar, r: IntervalVar) -> None:
        before = self.ending_at(self.point(q, START))
        after = self.starting_at(self.point(q, END))
        premises: tuple[Meets, ...] = ()
        best = None
        for p, s in product(before, after):
            lits = (Meets(p, q), Meets(q, s), Meets(p, r), Meets(r, s))
            score = (sum(not self.is_explicit(lit) for lit in lits), p.id, s.id)
            if best is None or score < best[0]:
                best = (score, lits)
        if best is not None:
            premises = best[1]
            for lit in premises:
                if not self.is_explicit(lit):
                    self.derive_m1(lit)
        self.add_eq(q, r)
        self.trace.append(RuleApp("M4", premises, (Eq(q, r),)))

    def derive_m1(self, lit: Meets) -> RuleApp:
        """Record ``lit`` (which must hold) as an M1 consequence of explicit literals."""
        if not self.holds(lit):
            raise DerivationFailure(f"{lit} does not follow")
        exp = self.explicit_literals()
        r, s = lit.x, lit.y
        for pq in exp:
            p, q = pq.x, pq.y
            if not self.holds(Meets(r, q)) or not self.holds(Meets(p, s)):
                continue
            ps, rq = Meets(p, s), Meets(r, q)
            if self.is_explicit(ps) and self.is_explicit(rq):
                app = RuleApp("M1", (pq, ps, rq), (lit,))
                break
        else:
            app = RuleApp("M1", (), (lit,), "by meeting-point chain")
        self.explicit.append((r.id, s.id))
        self.m1_derived.add((r.id, s.id))
        self.trace.append(app)
        return app

    def _find_violation(self) -> RuleApp | None:
        reps = self.reps()
        for v in reps:
            if self.point(v, START) == self.point(v, END):
                return self._self_loop(v)
        for x in reps:
            for y in reps:
                if x.id < y.id and self.holds(Meets(x, y)) and self.holds(Meets(y, x)):
                    return RuleApp("meets_asym", (Meets(x, y), Meets(y, x)), (),
                                   "violated")
        cycle = self._cycle()
        if cycle:
            names = ", ".join(v.name for v in cycle[:-1])
            return RuleApp(
                "meets_asym",
                (Meets(cycle[-2], cycle[-1]), Meets(cycle[-1], cycle[0])),
                (),
                f"violated after M5 sums of {names}",
            )
        return None

    def _self_loop(self, v: IntervalVar) -> RuleApp:
        point = self.point(v, START)
        befores = [x for x in self.ending_at(point) if x != v]
        afters = [y for y in self.starting_at(point) if y != v]
        best = None
        for x, y in product(befores, afters):
            lits = (Meets(x, v), Meets(v, y), Meets(x, y))
            score = (sum(not self.is_explicit(lit) for lit in lits), x.id, y.id)
            if best is None or score < best[0]:
                best = (score, lits)
        if best is None:
            return RuleApp("meets_irrefl", (Meets(v, v),), (), "violated")
        lits = best[1]
        for lit in lits:
            if not self.is_explicit(lit):
                self.derive_m1(lit)
        return RuleApp("meets_atrans", lits, (), "violated")

    def _cycle(self) -> list[IntervalVar] | None:
        for v in self.reps():
            path = self.chain(self.point(v, END), self.point(v, START))
            if path is not None:
                return [v] + path
        return None

    # -- internals ----------------------------------------------------------

    def _find(self, i: int) -> int:
        root = i
        while self._points[root] != root:
            root = self._points[root]
        while self._points[i] != root:
            self._points[i], i = root, self._points[i]
        return root

    def _union(self, a: int, b: int) -> None:
        a, b = self._find(a), self._find(b)
        if a != b:
            self._points[max(a, b)] = min(a, b)
            self._reach = None

    def _edges(self) -> dict[int, list[tuple[IntervalVar, int]]]:
        edges: dict[int, list[tuple[IntervalVar, int]]] = {}
        for v in self.reps():
            edges.setdefault(self.point(v, START), []).append((v, self.point(v, END)))
        return edges

    def _reachable(self) -> dict[int, set[int]]:
        if self._reach is None:
            edges = self._edges()
            nodes = {self._find(i) for i in range(len(self._points))}
            reach = {}
            for n in nodes:
                seen: set[int] = set()
                stack = [t for _, t in edges.get(n, [])]
                while stack:
                    t = stack.pop()
                    if t in seen:
                        continue
                    seen.add(t)
                    stack.extend(u for _, u in edges.get(t, []))
                reach[n] = seen
            self._reach = reach
        return self._reach


# ---------------------------------------------------------------------------
# Relation schemas: (p, q) in r  iff  the literals hold for some bound vars.


@dataclass(frozen=True)
class RelationSchema:
    relation: BasicRelation
    bound: tuple[str, ...]
    literals: tuple[tuple[str, str], ...]
    equal: bool = False  # e is p = q rather than a meets conjunction

    def ports(self) -> dict[tuple[str, str], int]:
        """Group the start/end ports of p, q and bound vars into equal points."""
        names = ("p", "q") + self.bound
        parent = {(n, side): (n, side) for n in names for side in (START, END)}

        def find(k):
            while parent[k] != k:
                k = parent[k]
            return k

        for x, y in self.literals:
            parent[find((x, END))] = find((y, START))
        if self.equal:
            parent[find(("p", START))] = find(("q", START))
            parent[find(("p", END))] = find(("q", END))
        groups: dict[tuple[str, str], int] = {}
        out = {}
        for k in parent:
            out[k] = groups.setdefault(find(k), len(groups))
        return out


_BASE_SCHEMAS = {
    E: RelationSchema(E, (), (), equal=True),
    M: RelationSchema(M, (), (("p", "q"),)),
    B: RelationSchema(B, ("t",), (("p", "t"), ("t", "q"))),
    OV: RelationSchema(OV, ("k", "l", "u", "v", "t"), (
        ("k", "p"), ("p", "u"), ("u", "v"),
        ("k", "l"), ("l", "q"), ("q", "v"),
        ("l", "t"), ("t", "u"),
    )),
    S: RelationSchema(S, ("k", "u", "v"), (
        ("k", "p"), ("p", "u"), ("u", "v"), ("k", "q"), ("q", "v"),
    )),
    F: RelationSchema(F, ("k", "l", "u"), (
        ("k", "l"), ("l", "p"), ("p", "u"), ("k", "q"), ("q", "u"),
    )),
    D: RelationSchema(D, ("k", "l", "u", "v"), (
        ("k", "l"), ("l", "p"), ("p", "u"), ("u", "v"), ("k", "q"), ("q", "v"),
    )),
}


def _swapped(schema: RelationSchema) -> RelationSchema:
    swap = {"p": "q", "q": "p"}
    lits = tuple((swap.get(x, x), swap.get(y, y)) for x, y in schema.literals)
    return RelationSchema(schema.relation.converse, schema.bound, lits, schema.equal)


SCHEMAS: dict[BasicRelation, RelationSchema] = dict(_BASE_SCHEMAS)
for _r in (B, M, OV, S, F, D):
    SCHEMAS[_r.converse] = _swapped(_BASE_SCHEMAS[_r])


def proof_slice(steps: list[RuleApp], goals: Iterable[Literal]) -> list[RuleApp]:
    """The steps that ``goals`` depend on, found by walking premises backwards.

    A literal no step concludes verbatim holds only through a variable
    equality; every M4 step (and what it rests on) is then kept.
    """
    producer: dict[Literal, int] = {}
    for i, app in enumerate(steps):
        for lit in app.conclusions:
            producer.setdefault(lit, i)
    keep: set[int] = set()
    pending = list(goals)
    seen: set[Literal] = set()
    uses_eq = False
    while pending:
        lit = pending.pop()
        if lit in seen:
            continue
        seen.add(lit)
        i = producer.get(lit)
        if i is None:
            if not uses_eq:
                uses_eq = True
                m4 = [j for j, app in enumerate(steps) if app.rule == "M4"]
                keep.update(m4)
                for j in m4:
                    pending.extend(steps[j].premises)
            continue
        if i not in keep:
            keep.add(i)
            pending.extend(steps[i].premises)
    return [app for i, app in enumerate(steps) if i in keep]


def instantiate_schema(state: DerivationState, r: BasicRelation,
                       p: IntervalVar, q: IntervalVar) -> DerivationState:
    """Add ``L_r(p, q)`` to ``state`` with fresh bound variables."""
    schema = SCHEMAS[r]
    env = {"p": p, "q": q}
    for name in schema.bound:
        env[name] = state.new_var(name, Origin.SCHEMA)
    if schema.equal:
        state.add_eq(p, q)
        added: tuple[Literal, ...] = (Eq(p, q),)
    else:
        added = tuple(state.add_meets(env[x], env[y]) for x, y in schema.literals)
    state.trace.append(RuleApp(f"L_{r}({p},{q})", (), added))
    return state


def add_m3_neighbor(state: DerivationState, x: IntervalVar, side: str,
                    base: str = "c") -> tuple[DerivationState, IntervalVar]:
    """M3: a fresh ``c`` with ``c||x`` (side=start) or ``x||c`` (side=end)."""
    c = state.new_var(base, Origin.M3)
    lit = state.add_meets(c, x) if side == START else state.add_meets(x, c)
    state.trace.append(RuleApp("M3", (), (lit,)))
    return state, c


def add_m5_sum(state: DerivationState, x: IntervalVar,
               y: IntervalVar) -> tuple[DerivationState, IntervalVar]:
    """M5: a fresh interval spanning ``x`` then ``y``.

    One axiom instance is recorded, using the lowest-id explicit neighbours
    ``w||x`` and ``y||w'``; other neighbours follow by M1 when needed.
    """
    if not state.holds(Meets(x, y)):
        raise ValueError(f"M5 needs {x}||{y}")
    if not state.is_explicit(Meets(x, y)):
        state.derive_m1(Meets(x, y))
    s = state.new_var(x.name + y.name, Origin.M5)
    state._union(state.point(s, START), state.point(x, START))
    state._union(state.point(s, END), state.point(y, END))
    exp = state.explicit_literals()
    left = sorted((lit.x for lit in exp if state.rep(lit.y) == state.rep(x)), key=lambda v: v.id)
    right = sorted((lit.y for lit in exp if state.rep(lit.x) == state.rep(y)), key=lambda v: v.id)
    premises: list[Literal] = [Meets(x, y)]
    conclusions: list[Literal] = []
    if left:
        premises.insert(0, Meets(left[0], x))
        conclusions.append(state.add_meets(left[0], s))
    if right:
        premises.append(Meets(y, right[0]))
        conclusions.append(state.add_meets(s, right[0]))
    state.trace.append(RuleApp("M5", tuple(premises), tuple(conclusions)))
    return state, s


def split_m2(state: DerivationState, l1: Meets, l2: Meets
             ) -> list[tuple[str, DerivationState]]:
    """M2 on ``x||p1`` and ``y||q1``: equal meeting points, first earlier, second earlier."""
    if not (state.holds(l1) and state.holds(l2)):
        raise ValueError(f"M2 literals must hold: {l1}, {l2}")
    if state.rep(l1.x) == state.rep(l2.x) and state.rep(l1.y) == state.rep(l2.y):
        raise ValueError(f"M2 needs two distinct meets pairs, got {l1} twice")
    x, p1, y, q1 = l1.x, l1.y, l2.x, l2.y

    equal = state.copy()
    lit = equal.add_meets(x, q1)
    equal.trace.append(RuleApp("M2=", (l1, l2), (lit,)))

    first = state.copy()
    t = first.new_var("t", Origin.M2)
    concl = (first.add_meets(x, t), first.add_meets(t, q1))
    first.trace.append(RuleApp("M2<", (l1, l2), concl))

    second = state.copy()
    t = second.new_var("t", Origin.M2)
    concl = (second.add_meets(y, t), second.add_meets(t, p1))
    second.trace.append(RuleApp("M2>", (l1, l2), concl))

    return [("=", equal.saturate()), ("<", first.saturate()), (">", second.saturate())]


def match_schema(state: DerivationState, r: BasicRelation, p: IntervalVar,
                 q: IntervalVar) -> dict[str, IntervalVar] | None:
    """Assign existing variables to the bound variables of ``L_r(p, q)``.

    Among all assignments making every literal hold, prefers the one needing
    the fewest new M1 consequences, then the fewest earlier M1 consequences,
    then the fewest appeals to equalities, then the lowest variable ids.
    """
    schema = SCHEMAS[r]
    if schema.equal:
        return {} if state.rep(p) == state.rep(q) else None
    if state.contradiction is not None:
        return None
    groups = schema.ports()
    fixed: dict[int, int] = {}
    for name, var in (("p", p), ("q", q)):
        for side in (START, END):
            g = groups[name, side]
            pt = state.point(var, side)
            if fixed.setdefault(g, pt) != pt:
                return None
    reps = state.reps()
    options = []
    for name in schema.bound:
        gs, ge = groups[name, START], groups[name, END]
        cands = [v for v in reps
                 if fixed.get(gs, state.point(v, START)) == state.point(v, START)
                 and fixed.get(ge, state.point(v, END)) == state.point(v, END)]
        if not cands:
            return None
        options.append(cands)
    best = None
    for combo in product(*options):
        env = {"p": p, "q": q, **dict(zip(schema.bound, combo))}
        lits = [Meets(env[x], env[y]) for x, y in schema.literals]
        if not all(state.holds(lit) for lit in lits):
            continue
        score = (
            sum(not state.is_explicit(lit) for lit in lits),
            sum((lit.x.id, lit.y.id) in state.m1_derived for lit in lits),
            sum(not state.is_asserted(lit) for lit in lits),
            [v.id for v in combo],
        )
        if best is None or score < best[0]:
            best = (score, dict(zip(schema.bound, combo)))
    return None if best is None else best[1]


def construct_schema(state: DerivationState, r: BasicRelation, p: IntervalVar,
                     q: IntervalVar) -> dict[str, IntervalVar] | None:
    """Build missing witnesses for ``L_r(p, q)`` with M3/M5, then match it.

    Mutates ``state`` only when it succeeds; M1 consequences used by the
    match are recorded in the trace.
    """
    schema = SCHEMAS[r]
    if schema.equal:
        return match_schema(state, r, p, q)
    groups = schema.ports()
    fixed: dict[int, int] = {}
    for name, var in (("p", p), ("q", q)):
        for side in (START, END):
            pt = state.point(var, side)
            if fixed.setdefault(groups[name, side], pt) != pt:
                return None
    work = state.copy()
    for name in schema.bound:
        a, b = fixed.get(groups[name, START]), fixed.get(groups[name, END])
        if a is not None and b is not None:
            if any(work.point(v, START) == a and work.point(v, END) == b for v in work.reps()):
                continue
            path = work.chain(a, b)
            if path is None:
                return None
            acc = path[0]
            for nxt in path[1:]:
                work, acc = add_m5_sum(work, acc, nxt)
            work.saturate()
        elif b is not None:
            if not work.ending_at(b):
                anchor = _anchor(work.starting_at(b), p, q)
                work, _ = add_m3_neighbor(work, anchor, START)
        elif a is not None:
            if not work.starting_at(a):
                anchor = _anchor(work.ending_at(a), p, q)
                work, _ = add_m3_neighbor(work, anchor, END)
        else:
            raise DerivationFailure(f"schema {r}: bound {name} is unconstrained")
    if work.contradiction is not None:
        return None
    env = match_schema(work, r, p, q)
    if env is None:
        return None
    full = {"p": p, "q": q, **env}
    for x, y in schema.literals:
        lit = Meets(full[x], full[y])
        if not work.is_explicit(lit):
            work.derive_m1(lit)
    state.__dict__.update(work.__dict__)
    return env


def _anchor(cands: Iterable[IntervalVar], p: IntervalVar, q: IntervalVar) -> IntervalVar:
    cands = sorted(cands, key=lambda v: (v not in (p, q), v.id))
    if not cands:
        raise DerivationFailure("no interval touches the required point")
    return cands[0]
