"""Allen's 13 basic interval relations, relation sets and the composition table."""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Iterable, Iterator


class ParseError(ValueError):
    """Raised on malformed relation tokens, rationals or network files."""


class BasicRelation(enum.Enum):
    B = "b"
    BI = "bi"
    M = "m"
    MI = "mi"
    OV = "ov"
    OVI = "ovi"
    S = "s"
    SI = "si"
    F = "f"
    FI = "fi"
    D = "d"
    DI = "di"
    E = "e"

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return self.value

    @property
    def bit(self) -> int:
        return 1 << _BIT_INDEX[self]

    @property
    def converse(self) -> BasicRelation:
        return _CONVERSE[self]


B, BI, M, MI, OV, OVI = (BasicRelation.B, BasicRelation.BI, BasicRelation.M,
                         BasicRelation.MI, BasicRelation.OV, BasicRelation.OVI)
S, SI, F, FI, D, DI, E = (BasicRelation.S, BasicRelation.SI, BasicRelation.F,
                          BasicRelation.FI, BasicRelation.D, BasicRelation.DI,
                          BasicRelation.E)

# Display order, also the row/column order of the composition table.
ORDER: tuple[BasicRelation, ...] = (B, M, OV, FI, DI, S, E, SI, D, F, OVI, MI, BI)
_BIT_INDEX = {r: i for i, r in enumerate(ORDER)}

_CONVERSE = {
    B: BI, BI: B, M: MI, MI: M, OV: OVI, OVI: OV,
    S: SI, SI: S, F: FI, FI: F, D: DI, DI: D, E: E,
}


def converse(r: BasicRelation) -> BasicRelation:
    return _CONVERSE[r]


class RelationSet:
    """Immutable set of basic relations backed by a 13-bit mask.

    Iteration and ``str`` follow the canonical display order
    ``b m ov fi di s e si d f ovi mi bi``.
    """

    __slots__ = ("mask",)
    FULL_MASK = (1 << 13) - 1

    def __init__(self, members: Iterable[BasicRelation] | int = ()) -> None:
        if isinstance(members, int):
            if not 0 <= members <= self.FULL_MASK:
                raise ValueError(f"mask out of range: {members}")
            mask = members
        else:
            mask = 0
            for r in members:
                mask |= r.bit
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("RelationSet is immutable")

    @classmethod
    def of(cls, *members: BasicRelation) -> RelationSet:
        return cls(members)

    @classmethod
    def parse(cls, tokens: Iterable[str]) -> RelationSet:
        return cls(parse_relation_token(t) for t in tokens)

    def __iter__(self) -> Iterator[BasicRelation]:
        for r in ORDER:
            if self.mask & r.bit:
                yield r

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, r: object) -> bool:
        return isinstance(r, BasicRelation) and bool(self.mask & r.bit)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RelationSet):
            return self.mask == other.mask
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.mask)

    def __or__(self, other: RelationSet) -> RelationSet:
        return RelationSet(self.mask | other.mask)

    def __and__(self, other: RelationSet) -> RelationSet:
        return RelationSet(self.mask & other.mask)

    def __sub__(self, other: RelationSet) -> RelationSet:
        return RelationSet(self.mask & ~other.mask)

    def __le__(self, other: RelationSet) -> bool:
        return self.mask & ~other.mask == 0

    def __ge__(self, other: RelationSet) -> bool:
        return other <= self

    def __lt__(self, other: RelationSet) -> bool:
        return self <= other and self != other

    def __gt__(self, other: RelationSet) -> bool:
        return other < self

    @property
    def converse(self) -> RelationSet:
        return converse_set(self)

    @property
    def is_full(self) -> bool:
        return self.mask == self.FULL_MASK

    def single(self) -> BasicRelation:
        """The only member of a singleton set."""
        if len(self) != 1:
            raise ValueError(f"not a singleton: {{{self}}}")
        return next(iter(self))

    def __str__(self) -> str:
        return " ".join(r.value for r in self)

    def __repr__(self) -> str:
        return f"RelationSet({{{self}}})"


EMPTY = RelationSet()
FULL = RelationSet(RelationSet.FULL_MASK)


def converse_set(rs: RelationSet) -> RelationSet:
    return RelationSet(_CONVERSE[r] for r in rs)


_TOKENS = {r.value: r for r in BasicRelation}
_TOKENS.update({f"{r.value}^-1": r.converse for r in (B, M, OV, S, F, D)})
_TOKENS["e^-1"] = E


def parse_relation_token(text: str) -> BasicRelation:
    """Parse ``b``, ``ovi``, ``B^-1`` and friends, case-insensitively."""
    try:
        return _TOKENS[text.strip().lower()]
    except KeyError:
        valid = " ".join(r.value for r in ORDER)
        raise ParseError(
            f"unknown relation {text!r}; valid names: {valid} (or x^-1)"
        ) from None


# Named unions appearing as composition-table entries.
ALPHA1 = RelationSet.of(OV, S, D)
ALPHA2 = RelationSet.of(OV, FI, DI)
ALPHA3 = RelationSet.of(B, M, OV)
ALPHA4 = RelationSet.of(FI, E, F)
ALPHA5 = RelationSet.of(S, E, SI)
BETA1 = RelationSet.of(B, M, OV, S, D)
BETA2 = RelationSet.of(B, M, OV, FI, DI)
GAMMA = RelationSet.of(OV, S, D, F, E, FI, DI, SI, OVI)
DELTA = FULL

NAMED_UNIONS: dict[str, RelationSet] = {
    "alpha1": ALPHA1,
    "alpha2": ALPHA2,
    "alpha3": ALPHA3,
    "alpha4": ALPHA4,
    "alpha5": ALPHA5,
    "beta1": BETA1,
    "beta2": BETA2,
    "gamma": GAMMA,
    "delta": DELTA,
}
for _name, _value in list(NAMED_UNIONS.items()):
    NAMED_UNIONS[_name + "^-1"] = converse_set(_value)


def _entry(token: str) -> RelationSet:
    if token in NAMED_UNIONS:
        return NAMED_UNIONS[token]
    return RelationSet.of(parse_relation_token(token))


# Rows r1, columns r2, both in ORDER. Entry (ovi, fi) reads alpha1^-1 here;
# the usual printed grid has alpha1 in that cell, which breaks converse duality
# with (f, ov) and is refuted by the endpoint oracle.
_TABLE_TEXT = """
b    b       b       b       b       b       b       b       b       beta1   beta1   beta1   beta1   delta
m    b       b       b       b       b       m       m       m       alpha1  alpha1  alpha1  alpha4  beta1^-1
ov   b       b       alpha3  alpha3  beta2   ov      ov      alpha2  alpha1  alpha1  gamma   alpha1^-1 beta1^-1
fi   b       m       ov      fi      di      ov      fi      di      alpha1  alpha4  alpha1^-1 alpha1^-1 beta1^-1
di   beta2   alpha2  alpha2  di      di      alpha2  di      di      gamma   alpha1^-1 alpha1^-1 alpha1^-1 beta1^-1
s    b       b       alpha3  alpha3  beta2   s       s       alpha5  d       d       alpha2^-1 mi     bi
e    b       m       ov      fi      di      s       e       si      d       f       ovi     mi      bi
si   beta2   alpha2  alpha2  di      di      alpha5  si      si      alpha2^-1 ovi   ovi     mi      bi
d    b       b       beta1   beta1   delta   d       d       beta2^-1 d      d       beta2^-1 bi     bi
f    b       m       alpha1  alpha4  beta1^-1 d      f       alpha3^-1 d      f       alpha3^-1 bi    bi
ovi  beta2   alpha2  gamma   alpha1^-1 beta1^-1 alpha2^-1 ovi alpha3^-1 alpha2^-1 ovi alpha3^-1 bi bi
mi   beta2   alpha5  alpha2^-1 mi    bi      alpha2^-1 mi    bi      alpha2^-1 mi    bi      bi      bi
bi   delta   beta2^-1 beta2^-1 bi    bi      beta2^-1 bi     bi      beta2^-1 bi     bi      bi      bi
"""


def _build_table() -> dict[tuple[BasicRelation, BasicRelation], RelationSet]:
    table = {}
    for line in _TABLE_TEXT.strip().splitlines():
        head, *cells = line.split()
        r1 = parse_relation_token(head)
        assert len(cells) == 13, line
        for r2, cell in zip(ORDER, cells):
            table[r1, r2] = _entry(cell)
    return table


COMPOSITION_TABLE: dict[tuple[BasicRelation, BasicRelation], RelationSet] = _build_table()


def compose(r1: BasicRelation, r2: BasicRelation) -> RelationSet:
    return COMPOSITION_TABLE[r1, r2]


@lru_cache(maxsize=1 << 16)
def _compose_masks(m1: int, m2: int) -> int:
    out = 0
    for r1 in RelationSet(m1):
        for r2 in RelationSet(m2):
            out |= COMPOSITION_TABLE[r1, r2].mask
            if out == RelationSet.FULL_MASK:
                return out
    return out


def compose_sets(rs1: RelationSet, rs2: RelationSet) -> RelationSet:
    """Union of the pairwise basic compositions; empty if either side is."""
    return RelationSet(_compose_masks(rs1.mask, rs2.mask))


def table_to_csv(table=None) -> str:
    table = COMPOSITION_TABLE if table is None else table
    lines = [",".join([""] + [r.value for r in ORDER])]
    for r1 in ORDER:
        cells = []
        for r2 in ORDER:
            entry = table[r1, r2]
            if not entry:
                raise ValueError(f"empty table cell ({r1}, {r2})")
            cells.append("|".join(r.value for r in entry))
        lines.append(",".join([r1.value] + cells))
    return "\n".join(lines) + "\n"


def _cell_name(rs: RelationSet) -> str:
    if len(rs) == 1:
        return rs.single().value
    for name, value in NAMED_UNIONS.items():
        if value == rs:
            return name
    return "(" + ", ".join(r.value for r in rs) + ")"


def table_to_markdown(table=None) -> str:
    """Markdown grid in display order, unions shown by name."""
    table = COMPOSITION_TABLE if table is None else table
    lines = [
        "| r1 \\ r2 | " + " | ".join(r.value for r in ORDER) + " |",
        "|" + "---|" * 14,
    ]
    for r1 in ORDER:
        cells = [_cell_name(table[r1, r2]) for r2 in ORDER]
        lines.append(f"| {r1.value} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
