"""Allen's interval algebra with two independent checks of its composition table."""

from .relations import (
    BasicRelation,
    COMPOSITION_TABLE,
    ParseError,
    RelationSet,
    compose,
    compose_sets,
    converse,
    converse_set,
    parse_relation_token,
)

__all__ = [
    "BasicRelation",
    "COMPOSITION_TABLE",
    "ParseError",
    "RelationSet",
    "compose",
    "compose_sets",
    "converse",
    "converse_set",
    "parse_relation_token",
]
