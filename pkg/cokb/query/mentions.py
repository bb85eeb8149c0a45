from __future__ import absolute_import

import dataclasses
from collections import namedtuple

from cokb.query.errors import MissingBinding, TermError
from cokb.query.sparql import SparqlQuery, TriplePattern
from cokb.query.triplet import TripletQuery
from cokb.query.terms import (
    ENTITY,
    ENTITY_ID,
    PROPERTY_ID,
    EntityPlaceholder,
    PropertyPlaceholder,
    ResolvedEntity,
    ResolvedProperty,
    mention_kind,
)

Mention = namedtuple('Mention', ['label', 'kind'])


def _terms(query):
    if isinstance(query, SparqlQuery):
        for pattern in query.patterns:
            for term in pattern:
                yield term
    elif isinstance(query, TripletQuery):
        yield query.head
        yield query.relation
        yield query.tail
    else:
        raise TypeError("not a structured query: %r" % (query,))


def collect_mentions(query):
    """Placeholder labels in first-occurrence order, without repeats."""
    mentions = []
    for term in _terms(query):
        kind = mention_kind(term)
        if kind is None:
            continue
        mention = Mention(term.label, kind)
        if mention not in mentions:
            mentions.append(mention)
    return mentions


def _resolve(term, bindings):
    if not isinstance(term, (EntityPlaceholder, PropertyPlaceholder)):
        return term
    try:
        kb_id = bindings[term.label]
    except KeyError:
        raise MissingBinding(term.label)
    if mention_kind(term) == ENTITY:
        if not ENTITY_ID.match(kb_id):
            raise TermError(
                "entity '%s' bound to non-entity id %r" % (term.label, kb_id))
        return ResolvedEntity(kb_id)
    if not PROPERTY_ID.match(kb_id):
        raise TermError(
            "property '%s' bound to non-property id %r" % (term.label, kb_id))
    return ResolvedProperty(kb_id)


def resolve_placeholders(query, bindings):
    """Return a copy of `query` with every placeholder replaced by its ID."""
    if isinstance(query, SparqlQuery):
        patterns = tuple(
            TriplePattern(*(_resolve(term, bindings) for term in pattern))
            for pattern in query.patterns)
        return dataclasses.replace(query, patterns=patterns, source=None)
    if isinstance(query, TripletQuery):
        return TripletQuery(
            head=_resolve(query.head, bindings),
            relation=_resolve(query.relation, bindings),
            tail=_resolve(query.tail, bindings),
        )
    raise TypeError("not a structured query: %r" % (query,))


def is_resolved(query):
    return not collect_mentions(query)
