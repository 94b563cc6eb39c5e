"""Derivation trees for composition entries, PD refutations and JE.

A goal ``(p, z) in r1, (z, q) in r2`` is expanded by M2 case splits on the
endpoint comparisons of p and q that the current literals leave open, checked
in a fixed priority: start/start, end/end, end(p)/start(q), start(p)/end(q).
This reproduces the lattice-guided templates: one start/start split for
alpha1/alpha4 entries, end/end for alpha2/alpha5, end/start for alpha3, an
alpha split with a nested end/start split for beta entries, and start x end
splits (plus nested ones in the ov cases) for gamma and delta. Once all four
comparisons are decided the leaf proves exactly one relation by building its
literal schema with M3/M5 and reading off the remaining literals by M1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .axioms import (
    END,
    START,
    DerivationFailure,
    DerivationState,
    IntervalVar,
    Meets,
    SCHEMAS,
    RuleApp,
    add_m3_neighbor,
    construct_schema,
    instantiate_schema,
    match_schema,
    proof_slice,
    split_m2,
)
from .endpoints import _classify
from .relations import ORDER, BasicRelation, RelationSet, compose

# (point of p or q, point of p or q) pairs, in split priority order
SPLIT_PRIORITY = (
    (("p", START), ("q", START)),
    (("p", END), ("q", END)),
    (("p", END), ("q", START)),
    (("p", START), ("q", END)),
)

TAG_NAMES = {"=": "equal-point", "<": "first-precedes", ">": "second-precedes"}


@dataclass
class Node:
    state: DerivationState
    steps: list[RuleApp] = field(default_factory=list)
    split: tuple[Meets, Meets] | None = None
    children: list[tuple[str, Node]] = field(default_factory=list)
    conclusion: BasicRelation | None = None
    witnesses: dict[str, IntervalVar] | None = None
    _p: IntervalVar | None = None
    _q: IntervalVar | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def contradiction(self) -> RuleApp | None:
        return self.state.contradiction

    def proof_steps(self) -> list[RuleApp]:
        """This node's steps that its conclusion or contradiction depends on.

        The M2 case step that opens the node is always kept; eager saturation
        steps nothing relies on are dropped.
        """
        if self.contradiction is not None:
            goals = list(self.contradiction.premises)
        elif self.conclusion is not None and self.witnesses is not None:
            env = {"p": self._p, "q": self._q, **self.witnesses}
            schema = SCHEMAS[self.conclusion]
            if schema.equal:
                return list(self.steps)
            goals = [Meets(env[x], env[y]) for x, y in schema.literals]
        else:
            return list(self.steps)
        # slice the whole path so literals from ancestor steps count as produced
        used = {id(app) for app in proof_slice(self.state.trace, goals)}
        return [app for app in self.steps if id(app) in used or app.rule.startswith("M2")]

    def rule_count(self, rule: str) -> int:
        return sum(1 for app in self.proof_steps() if app.rule == rule)


@dataclass
class DerivationTree:
    root: Node
    goal: str
    p: IntervalVar
    q: IntervalVar

    def leaves(self) -> list[Node]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend(child for _, child in reversed(node.children))
        return out

    def conclusions(self) -> RelationSet:
        return RelationSet(leaf.conclusion for leaf in self.leaves() if leaf.conclusion)

    def depth(self) -> int:
        def walk(node: Node) -> int:
            return 0 if node.is_leaf else 1 + max(walk(c) for _, c in node.children)
        return walk(self.root)

    def render(self) -> str:
        lines = [self.goal]

        def walk(node: Node, indent: str) -> None:
            for app in node.steps:
                if app is not node.contradiction:
                    lines.append(f"{indent}{app}")
            if node.split is not None:
                l1, l2 = node.split
                lines.append(f"{indent}M2({l1}, {l2})")
                for tag, child in node.children:
                    lines.append(f"{indent}  {tag} {child.steps[0]}")
                    child_view = Node(child.state, child.steps[1:], child.split,
                                      child.children, child.conclusion, child.witnesses)
                    walk(child_view, indent + "    ")
            elif node.contradiction is not None:
                lines.append(f"{indent}⊥ (rule violated: {node.contradiction})")
            elif node.conclusion is not None:
                vmap = ", ".join(f"{k}→{v}" for k, v in (node.witnesses or {}).items())
                lines.append(f"{indent}⊢ ({self.p},{self.q}) ∈ {node.conclusion} via {{{vmap}}}")

        walk(self.root, "")
        return "\n".join(lines) + "\n"


def _point(state: DerivationState, env: dict[str, IntervalVar], spec) -> int:
    name, side = spec
    return state.point(env[name], side)


def decided_relation(state: DerivationState, p: IntervalVar,
                     q: IntervalVar) -> BasicRelation | None:
    """The relation fixed by the derived endpoint order, if every comparison is known."""
    env = {"p": p, "q": q}
    points = [("p", START), ("p", END), ("q", START), ("q", END)]
    ids = [_point(state, env, pt) for pt in points]
    rank = []
    for i in range(4):
        below = 0
        for j in range(4):
            c = state.compare(ids[j], ids[i])
            if c is None:
                return None
            below += c == "<"
        rank.append(below)
    return _classify(*rank)


def _meeting_literal(state: DerivationState, var: IntervalVar, side: str,
                     steps: list[RuleApp]) -> Meets:
    """A literal meeting at ``var``'s start (``x||var``) or end (``var||x``)."""
    pt = state.point(var, side)
    if side == START:
        cands = [v for v in state.ending_at(pt) if v != state.rep(var)]
    else:
        cands = [v for v in state.starting_at(pt) if v != state.rep(var)]
    if not cands:
        n = len(state.trace)
        _, c = add_m3_neighbor(state, var, side)
        steps.extend(state.trace[n:])
        cands = [c]
    lit = Meets(cands[0], var) if side == START else Meets(var, cands[0])
    if not state.is_explicit(lit):
        n = len(state.trace)
        state.derive_m1(lit)
        steps.extend(state.trace[n:])
    return lit


def _expand(state: DerivationState, p: IntervalVar, q: IntervalVar,
            steps: list[RuleApp], depth: int = 0) -> Node:
    node = Node(state, steps)
    if state.contradiction is not None:
        return node
    env = {"p": p, "q": q}
    for a, b in SPLIT_PRIORITY:
        if state.compare(_point(state, env, a), _point(state, env, b)) is None:
            break
    else:
        return _conclude(node, p, q)
    if depth >= len(SPLIT_PRIORITY):
        raise DerivationFailure("split budget exhausted")
    l1 = _meeting_literal(state, env[a[0]], a[1], node.steps)
    l2 = _meeting_literal(state, env[b[0]], b[1], node.steps)
    node.split = (l1, l2)
    n = len(state.trace)
    for tag, child in split_m2(state, l1, l2):
        child_steps = child.trace[n:]
        node.children.append((tag, _expand(child, p, q, child_steps, depth + 1)))
    return node


def _conclude(node: Node, p: IntervalVar, q: IntervalVar) -> Node:
    state = node.state
    r = decided_relation(state, p, q)
    n = len(state.trace)
    env = construct_schema(state, r, p, q) if r is not None else None
    if env is None:
        raise DerivationFailure(f"leaf does not establish a relation (order says {r})")
    node.steps.extend(state.trace[n:])
    others = [o for o in ORDER if o != r and match_schema(state, o, p, q) is not None]
    if others:
        raise DerivationFailure(f"leaf matches {r} and also {others}")
    node.conclusion = r
    node.witnesses = env
    node._p, node._q = p, q
    return node


def derive_composition(r1: BasicRelation, r2: BasicRelation) -> DerivationTree:
    """Derive which relations (p, q) can stand in, given (p,z) in r1 and (z,q) in r2."""
    state = DerivationState()
    p, z, q = state.new_var("p"), state.new_var("z"), state.new_var("q")
    instantiate_schema(state, r1, p, z)
    instantiate_schema(state, r2, z, q)
    state.saturate()
    root = _expand(state, p, q, list(state.trace))
    return DerivationTree(root, f"(p,z) ∈ {r1}; (z,q) ∈ {r2}", p, q)


def derive_je() -> DerivationTree:
    """Show that two unconstrained intervals stand in one of the 13 relations."""
    state = DerivationState()
    p, q = state.new_var("p"), state.new_var("q")
    for var in (p, q):
        add_m3_neighbor(state, var, START)
        add_m3_neighbor(state, var, END)
    state.saturate()
    root = _expand(state, p, q, list(state.trace))
    return DerivationTree(root, "(p,q) ∈ δ", p, q)


def verify_pd(r1: BasicRelation, r2: BasicRelation) -> list[RuleApp]:
    """Refute (p,q) in r1 and (p,q) in r2; returns the trace ending in the violation."""
    if r1 == r2:
        raise ValueError("verify_pd needs two different relations")
    state = DerivationState()
    p, q = state.new_var("p"), state.new_var("q")
    instantiate_schema(state, r1, p, q)
    instantiate_schema(state, r2, p, q)
    state.saturate()
    if state.contradiction is None:
        raise DerivationFailure(f"no contradiction between {r1} and {r2}")
    return state.trace


@dataclass
class TableReport:
    engine: str
    mismatches: list[str] = field(default_factory=list)
    matched: int = 0
    total: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.matched == self.total

    def summary(self) -> str:
        verdict = "OK" if self.ok else "MISMATCH"
        return f"{self.matched}/{self.total} {self.engine} {verdict}"


def verify_table_by_derivation(expected=None) -> TableReport:
    """Compare derived leaf-conclusion unions with the table, entry by entry."""
    report = TableReport("derivation")
    t0 = time.perf_counter()
    for r1 in ORDER:
        for r2 in ORDER:
            want = compose(r1, r2) if expected is None else expected[r1, r2]
            report.total += 1
            try:
                got = derive_composition(r1, r2).conclusions()
            except DerivationFailure as exc:
                report.mismatches.append(f"{r1} o {r2}: {exc}")
                continue
            if got == want:
                report.matched += 1
            else:
                missing, extra = want - got, got - want
                report.mismatches.append(
                    f"{r1} o {r2}: derived {{{got}}}, missing {{{missing}}}, unsound {{{extra}}}"
                )
    report.seconds = time.perf_counter() - t0
    return report
