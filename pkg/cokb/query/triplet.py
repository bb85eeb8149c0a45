"""KB triplet queries written as "(head, relation, tail)" with a "?" hole."""
from __future__ import absolute_import

import re
from dataclasses import dataclass

from cokb.query.errors import EmptyQuery, Unparseable, HoleCountError
from cokb.query.terms import (
    Form,
    HOLE,
    EntityPlaceholder,
    PropertyPlaceholder,
    ResolvedEntity,
    ResolvedProperty,
    Literal,
    ENTITY_ID,
    PROPERTY_ID,
)
from cokb.query.sparql import term_text

QUOTED = re.compile(r'^"((?:\\.|[^"\\])*)"$')
UNESCAPE_RE = re.compile(r'\\(.)')


@dataclass(frozen=True)
class TripletQuery(object):
    head: object
    relation: object
    tail: object

    def __post_init__(self):
        holes = (self.head is HOLE) + (self.tail is HOLE)
        if holes != 1:
            raise HoleCountError(
                "a triplet query needs exactly one hole, got %d" % holes)

    @property
    def hole_position(self):
        return 'head' if self.head is HOLE else 'tail'

    @property
    def known(self):
        """The non-hole endpoint."""
        return self.tail if self.head is HOLE else self.head


def _endpoint(text, start, end):
    text = text.strip()
    if not text:
        raise Unparseable("empty triplet component", start, end)
    if text == '?':
        return HOLE
    if ENTITY_ID.match(text):
        return ResolvedEntity(text)
    quoted = QUOTED.match(text)
    if quoted:
        return Literal(UNESCAPE_RE.sub(r'\1', quoted.group(1)))
    return EntityPlaceholder(text)


def _relation(text, start, end):
    text = text.strip()
    if not text or text == '?':
        raise Unparseable("the relation cannot be a hole", start, end)
    if PROPERTY_ID.match(text):
        return ResolvedProperty(text)
    return PropertyPlaceholder(text)


def parse_triplet(text):
    """Parse "(A, B, C)" where exactly one of A and C is "?".

    The hole side may carry commas in the opposite entity label; the
    relation label never does.
    """
    if text is None or not text.strip():
        raise EmptyQuery("empty query")
    stripped = text.strip()
    if not (stripped.startswith('(') and stripped.endswith(')')):
        raise Unparseable("triplet must be wrapped in parentheses",
                          0, len(text))
    inner = stripped[1:-1]
    parts = inner.split(',')
    if len(parts) < 3:
        raise Unparseable("triplet needs three components", 0, len(text))

    first = parts[0].strip()
    last = parts[-1].strip()
    holes = (first == '?') + (last == '?')
    if holes != 1:
        raise HoleCountError(
            "exactly one of head and tail must be '?', got %d" % holes,
            0, len(text))

    if len(parts) == 3:
        head, relation, tail = parts
    elif first == '?':
        head, relation, tail = parts[0], parts[1], ','.join(parts[2:])
    else:
        head, relation, tail = ','.join(parts[:-2]), parts[-2], parts[-1]

    return TripletQuery(
        head=_endpoint(head, 0, len(text)),
        relation=_relation(relation, 0, len(text)),
        tail=_endpoint(tail, 0, len(text)),
    )


def _component_text(term, form):
    if term is HOLE:
        return '?'
    if isinstance(term, EntityPlaceholder):
        if form == Form.RESOLVED:
            return term_text(term, form)
        return term.label
    if isinstance(term, PropertyPlaceholder):
        if form == Form.RESOLVED:
            return term_text(term, form)
        return term.label
    if isinstance(term, (ResolvedEntity, ResolvedProperty)):
        return term.id
    return term_text(term, form)


def serialize_triplet(query, form=Form.PLACEHOLDER):
    return '(%s)' % ', '.join(
        _component_text(term, form)
        for term in (query.head, query.relation, query.tail))
