"""Exact-rational interval model: classification, order types, brute-force oracle."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .relations import (
    B, BI, D, DI, E, F, FI, M, MI, OV, OVI, S, SI,
    ORDER,
    BasicRelation,
    ParseError,
    RelationSet,
    converse,
)

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(-?\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``3``, ``-2`` or ``7/2``."""
    match = _RATIONAL.match(text)
    if not match:
        raise ParseError(f"not a rational literal: {text!r}")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


@dataclass(frozen=True, order=True)
class RatInterval:
    start: Fraction
    end: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", Fraction(self.start))
        object.__setattr__(self, "end", Fraction(self.end))
        if not self.start < self.end:
            raise ValueError(f"interval needs start < end, got [{self.start}, {self.end}]")

    def __str__(self) -> str:
        return f"[{self.start}, {self.end}]"


def meets(p: RatInterval, q: RatInterval) -> bool:
    return p.end == q.start


def classify(p: RatInterval, q: RatInterval) -> BasicRelation:
    """The unique basic relation holding between ``p`` and ``q``."""
    return _classify(p.start, p.end, q.start, q.end)


def _classify(ps, pe, qs, qe) -> BasicRelation:
    if pe < qs:
        return B
    if pe == qs:
        return M
    if qe < ps:
        return BI
    if qe == ps:
        return MI
    # the intervals now share an inner point
    if ps == qs:
        return E if pe == qe else (S if pe < qe else SI)
    if pe == qe:
        return F if ps > qs else FI
    if ps < qs:
        return OV if pe < qe else DI
    return D if pe < qe else OVI


# Per-relation endpoint readings, kept separate from the decision tree above
# so JEPD can be checked rather than assumed.
_HOLDS = {
    B: lambda ps, pe, qs, qe: pe < qs,
    M: lambda ps, pe, qs, qe: pe == qs,
    OV: lambda ps, pe, qs, qe: ps < qs < pe < qe,
    S: lambda ps, pe, qs, qe: ps == qs and pe < qe,
    D: lambda ps, pe, qs, qe: qs < ps and pe < qe,
    F: lambda ps, pe, qs, qe: pe == qe and qs < ps,
    E: lambda ps, pe, qs, qe: ps == qs and pe == qe,
}
for _r in (B, M, OV, S, D, F):
    _HOLDS[converse(_r)] = (lambda h: lambda ps, pe, qs, qe: h(qs, qe, ps, pe))(_HOLDS[_r])


def holds(r: BasicRelation, p: RatInterval, q: RatInterval) -> bool:
    return _HOLDS[r](p.start, p.end, q.start, q.end)


@dataclass(frozen=True)
class EndpointConfig:
    """Normalized order type of ``n`` intervals.

    ``ranks[2*i]`` and ``ranks[2*i + 1]`` are the start and end ranks of
    interval ``i``; used ranks are exactly ``1..k``.
    """

    ranks: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.ranks) // 2

    def interval(self, i: int) -> RatInterval:
        return RatInterval(self.ranks[2 * i], self.ranks[2 * i + 1])

    def intervals(self) -> list[RatInterval]:
        return [self.interval(i) for i in range(self.n)]

    def relation(self, i: int, j: int) -> BasicRelation:
        r = self.ranks
        return _classify(r[2 * i], r[2 * i + 1], r[2 * j], r[2 * j + 1])


def normalize_ranks(ranks: Sequence[int]) -> tuple[int, ...]:
    """Relabel ranks to the contiguous range 1..k preserving order and ties."""
    dense = {v: i + 1 for i, v in enumerate(sorted(set(ranks)))}
    return tuple(dense[v] for v in ranks)


def _valid(ranks: Sequence[int]) -> bool:
    return all(ranks[i] < ranks[i + 1] for i in range(0, len(ranks), 2))


MAX_INTERVALS = 4


def enumerate_configs(n: int) -> Iterator[EndpointConfig]:
    """Yield every order type of ``n`` intervals exactly once.

    Endpoints are placed one at a time into a growing weak ordering (into an
    existing tie-block or a new block at any gap); an interval is pruned as
    soon as its end does not fall strictly after its start. Inserting blocks
    never reorders existing ones, so pruning early is safe.
    """
    if not 1 <= n <= MAX_INTERVALS:
        raise ValueError(f"n must be in 1..{MAX_INTERVALS}, got {n}")
    return (EndpointConfig(r) for r in _weak_orders(2 * n))


def _weak_orders(npoints: int) -> Iterator[tuple[int, ...]]:
    # blocks: list of lists of endpoint indices, in increasing order
    def place(k: int, blocks: list[list[int]], pos: dict[int, int]):
        if k == npoints:
            ranks = [0] * npoints
            for b, block in enumerate(blocks):
                for idx in block:
                    ranks[idx] = b + 1
            yield tuple(ranks)
            return
        is_end = k % 2 == 1
        start_block = pos[k - 1] if is_end else -1
        # join an existing block
        for b in range(len(blocks)):
            if is_end and b <= start_block:
                continue
            blocks[b].append(k)
            pos[k] = b
            yield from place(k + 1, blocks, pos)
            blocks[b].pop()
            del pos[k]
        # open a new block in gap g (before block g)
        for g in range(len(blocks) + 1):
            if is_end and g <= start_block:
                continue
            blocks.insert(g, [k])
            shifted = {i: (b + 1 if b >= g else b) for i, b in pos.items()}
            shifted[k] = g
            yield from place(k + 1, blocks, shifted)
            blocks.pop(g)

    yield from place(0, [], {})


def enumerate_configs_bruteforce(n: int) -> list[EndpointConfig]:
    """All rank functions 2n -> 1..2n, normalized, filtered and deduplicated."""
    seen: dict[tuple[int, ...], None] = {}
    for raw in product(range(1, 2 * n + 1), repeat=2 * n):
        if _valid(raw):
            seen.setdefault(normalize_ranks(raw), None)
    return [EndpointConfig(r) for r in seen]


@lru_cache(maxsize=1)
def _triple_compositions() -> dict[tuple[BasicRelation, BasicRelation], RelationSet]:
    # intervals 0, 1, 2 play p, z, q
    found: dict[tuple[BasicRelation, BasicRelation], int] = {}
    for cfg in enumerate_configs(3):
        key = (cfg.relation(0, 1), cfg.relation(1, 2))
        found[key] = found.get(key, 0) | cfg.relation(0, 2).bit
    return {k: RelationSet(v) for k, v in found.items()}


def oracle_compose(r1: BasicRelation, r2: BasicRelation) -> RelationSet:
    """Relations between p and q over all order types with p r1 z and z r2 q."""
    return _triple_compositions().get((r1, r2), RelationSet())


def oracle_table() -> dict[tuple[BasicRelation, BasicRelation], RelationSet]:
    return {(r1, r2): oracle_compose(r1, r2) for r1 in ORDER for r2 in ORDER}


@dataclass
class Report:
    """Outcome of a model-level check; ``ok`` iff there are no violations."""

    name: str
    checked: dict[str, int] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def tick(self, key: str, n: int = 1) -> None:
        self.checked[key] = self.checked.get(key, 0) + n

    def summary(self) -> str:
        total = sum(self.checked.values())
        verdict = "OK" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {total} checks, {verdict}"


def verify_jepd() -> Report:
    """Every two-interval order type satisfies exactly one relation, and all 13 occur."""
    report = Report("jepd")
    realized: dict[BasicRelation, int] = {}
    configs = list(enumerate_configs(2))
    for cfg in configs:
        p, q = cfg.intervals()
        satisfied = [r for r in ORDER if holds(r, p, q)]
        report.tick("configs")
        if len(satisfied) != 1:
            report.violations.append(f"{cfg.ranks}: satisfies {satisfied}")
            continue
        if satisfied[0] != classify(p, q):
            report.violations.append(f"{cfg.ranks}: classify disagrees with {satisfied[0]}")
        realized[satisfied[0]] = realized.get(satisfied[0], 0) + 1
    for r in ORDER:
        report.tick("relations")
        if realized.get(r, 0) != 1:
            report.violations.append(f"{r} realized {realized.get(r, 0)} times")
    if len(configs) != 13:
        report.violations.append(f"expected 13 order types, got {len(configs)}")
    return report


def _witness(start, end) -> RatInterval | None:
    return RatInterval(start, end) if start < end else None


def check_axioms_in_model(sample: Sequence[RatInterval]) -> Report:
    """Model-check the meets axioms over every applicable tuple of ``sample``.

    Existential conclusions are discharged with explicit witnesses: the gap
    interval for M2, unit neighbours for M3, and the spanning sum for M5.
    """
    if not sample:
        raise ValueError("sample must be non-empty")
    report = Report("axioms")
    bad = report.violations
    ivs = list(dict.fromkeys(sample))
    meets_pairs = [(p, q) for p in ivs for q in ivs if meets(p, q)]
    by_start: dict[Fraction, list[RatInterval]] = {}
    for iv in ivs:
        by_start.setdefault(iv.start, []).append(iv)
    one = Fraction(1)

    for p in ivs:
        report.tick("meets_irrefl")
        if meets(p, p):
            bad.append(f"meets_irrefl: {p}")
        report.tick("M3")
        before, after = RatInterval(p.start - one, p.start), RatInterval(p.end, p.end + one)
        if not (meets(before, p) and meets(p, after)):
            bad.append(f"M3: {p}")

    for p, q in meets_pairs:
        report.tick("meets_asym")
        if meets(q, p):
            bad.append(f"meets_asym: {p} {q}")
        for r in by_start.get(q.end, []):
            report.tick("meets_atrans")
            if meets(p, r):
                bad.append(f"meets_atrans: {p} {q} {r}")
        report.tick("M5")
        r = RatInterval(p.start - one, p.start)
        s = RatInterval(q.end, q.end + one)
        t = RatInterval(p.start, q.end)
        if not (meets(r, p) and meets(q, s) and meets(r, t) and meets(t, s)):
            bad.append(f"M5: {p} {q}")

    by_end: dict[Fraction, list[RatInterval]] = {}
    for iv in ivs:
        by_end.setdefault(iv.end, []).append(iv)

    for p, q in meets_pairs:
        # M1: p||q, p||s, r||q => r||s
        for s in by_start[p.end]:
            for r in by_end[q.start]:
                report.tick("M1")
                if not meets(r, s):
                    bad.append(f"M1: {p} {q} {s} {r}")
        # M4: p||q, q||s, p||r, r||s => q = r
        for s in by_start.get(q.end, []):
            for r in by_start[p.end]:
                if meets(r, s):
                    report.tick("M4")
                    if r != q:
                        bad.append(f"M4: {p} {q} {r} {s}")
        # M2: exactly one of p||s, (p||t, t||s), (r||t, t||q)
        for r, s in meets_pairs:
            report.tick("M2")
            cases = [meets(p, s), _m2_gap(p, s), _m2_gap(r, q)]
            if sum(cases) != 1:
                bad.append(f"M2: {p}||{q}, {r}||{s} -> cases {cases}")
    return report


def _m2_gap(x: RatInterval, y: RatInterval) -> bool:
    """Whether some t has x||t and t||y, decided by the only possible witness."""
    t = _witness(x.end, y.start)
    return t is not None and meets(x, t) and meets(t, y)


def integer_intervals(lo: int, hi: int) -> list[RatInterval]:
    return [RatInterval(a, b) for a in range(lo, hi + 1) for b in range(a + 1, hi + 1)]
