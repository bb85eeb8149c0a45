"""Rule-based corruption of correct queries into plausible wrong ones.

Every operator is a pure function of (query text, seed, lexicon). The
seed picks which label is touched and which replacement is used, by
plain modular indexing, so seed 0 always targets the first candidate.
"""
from __future__ import absolute_import

import dataclasses
import logging
from enum import Enum

from cokb.contrastive.errors import InapplicableOp
from cokb.contrastive.lexicon import Lexicon
from cokb.query import (
    Format,
    HOLE,
    EntityPlaceholder,
    PropertyPlaceholder,
    Literal,
    TriplePattern,
    TripletQuery,
    detect_format,
    parse_query,
    serialize_sparql,
    serialize_triplet,
)

log = logging.getLogger('cokb')


class CorruptionOp(Enum):
    STRIP_ENTITY_SYNTAX = 'strip-entity'
    SEMANTIC_SUBSTITUTE = 'semantic-substitute'
    SURFACE_MISSPELL = 'misspell'
    CLAUSE_REORDER_SUBSTITUTE = 'reorder-substitute'
    HOLE_SWAP = 'hole-swap'
    RELATION_SWAP = 'relation-swap'
    ENTITY_MISSPELL = 'entity-misspell'
    FORMAT_BREAK = 'format-break'


SPARQL_OPS = (
    CorruptionOp.STRIP_ENTITY_SYNTAX,
    CorruptionOp.SEMANTIC_SUBSTITUTE,
    CorruptionOp.SURFACE_MISSPELL,
    CorruptionOp.CLAUSE_REORDER_SUBSTITUTE,
)

TRIPLET_OPS = (
    CorruptionOp.HOLE_SWAP,
    CorruptionOp.RELATION_SWAP,
    CorruptionOp.ENTITY_MISSPELL,
    CorruptionOp.FORMAT_BREAK,
)


def ops_for(format):
    if format == Format.TRIPLETS:
        return TRIPLET_OPS
    return SPARQL_OPS


def _entity_labels(query):
    labels = []
    for pattern in query.patterns:
        for term in pattern:
            if isinstance(term, EntityPlaceholder) and \
                    term.label not in labels:
                labels.append(term.label)
    return labels


def _replace_label(query, label, new_term, first_only=False):
    replaced = [False]

    def swap(term):
        if replaced[0] and first_only:
            return term
        if isinstance(term, EntityPlaceholder) and term.label == label:
            replaced[0] = True
            return new_term
        return term

    patterns = tuple(
        TriplePattern(*(swap(term) for term in pattern))
        for pattern in query.patterns)
    return dataclasses.replace(query, patterns=patterns)


def _substitute(query, seed, lexicon):
    labels = _entity_labels(query)
    with_siblings = [l for l in labels if lexicon.has_siblings(l)]
    candidates = with_siblings or labels
    if not candidates:
        raise InapplicableOp("no entity label to substitute")
    label = candidates[seed % len(candidates)]
    replacement = lexicon.sibling(label, seed, exclude=labels)
    if replacement is None:
        raise InapplicableOp("no substitute for '%s'" % label)
    return _replace_label(query, label, EntityPlaceholder(replacement))


def strip_entity_syntax(query, seed, lexicon):
    labels = _entity_labels(query)
    if not labels:
        raise InapplicableOp("query has no entity placeholder")
    label = labels[seed % len(labels)]
    stripped = _replace_label(
        query, label, Literal(label, bare=True), first_only=True)
    return serialize_sparql(stripped)


def semantic_substitute(query, seed, lexicon):
    return serialize_sparql(_substitute(query, seed, lexicon), where=False)


def surface_misspell(query, seed, lexicon):
    candidates = [
        label for label in _entity_labels(query)
        if lexicon.misspell(label, seed) is not None]
    if not candidates:
        raise InapplicableOp("no entity label can be misspelled")
    label = candidates[seed % len(candidates)]
    misspelled = _replace_label(
        query, label, EntityPlaceholder(lexicon.misspell(label, seed)),
        first_only=True)
    return serialize_sparql(misspelled)


def clause_reorder_substitute(query, seed, lexicon):
    try:
        query = _substitute(query, seed, lexicon)
        substituted = True
    except InapplicableOp:
        substituted = False
    if not substituted and len(query.patterns) < 2:
        raise InapplicableOp("single pattern and nothing to substitute")
    reordered = dataclasses.replace(
        query, patterns=tuple(reversed(query.patterns)))
    return serialize_sparql(reordered, trailing_dot=True)


def hole_swap(query, seed, lexicon):
    return serialize_triplet(
        TripletQuery(head=query.tail, relation=query.relation,
                     tail=query.head))


def relation_swap(query, seed, lexicon):
    relation = query.relation
    if not isinstance(relation, PropertyPlaceholder):
        raise InapplicableOp("relation is not a placeholder")
    replacement = lexicon.sibling(relation.label, seed)
    if replacement is None:
        raise InapplicableOp("no substitute for '%s'" % relation.label)
    return serialize_triplet(dataclasses.replace(
        query, relation=PropertyPlaceholder(replacement)))


def entity_misspell(query, seed, lexicon):
    known = query.known
    if not isinstance(known, EntityPlaceholder):
        raise InapplicableOp("known endpoint is not a placeholder")
    misspelled = lexicon.misspell(known.label, seed)
    if misspelled is None:
        raise InapplicableOp("'%s' cannot be misspelled" % known.label)
    term = EntityPlaceholder(misspelled)
    if query.head is HOLE:
        return serialize_triplet(dataclasses.replace(query, tail=term))
    return serialize_triplet(dataclasses.replace(query, head=term))


FORMAT_BREAKS = (
    lambda inner: inner,
    lambda inner: '(%s)' % inner.replace(',', ''),
    lambda inner: '[%s]' % inner,
    lambda inner: '(%s' % inner,
)


def format_break(query, seed, lexicon):
    inner = serialize_triplet(query)[1:-1]
    return FORMAT_BREAKS[seed % len(FORMAT_BREAKS)](inner)


OPERATORS = {
    CorruptionOp.STRIP_ENTITY_SYNTAX: strip_entity_syntax,
    CorruptionOp.SEMANTIC_SUBSTITUTE: semantic_substitute,
    CorruptionOp.SURFACE_MISSPELL: surface_misspell,
    CorruptionOp.CLAUSE_REORDER_SUBSTITUTE: clause_reorder_substitute,
    CorruptionOp.HOLE_SWAP: hole_swap,
    CorruptionOp.RELATION_SWAP: relation_swap,
    CorruptionOp.ENTITY_MISSPELL: entity_misspell,
    CorruptionOp.FORMAT_BREAK: format_break,
}


def corrupt(correct, op, seed=0, lexicon=None):
    """Apply one corruption operator to a correct query text.

    Raises InapplicableOp when the operator has nothing to act on, does not
    belong to the query's format, or would leave the text unchanged.
    """
    if lexicon is None:
        lexicon = Lexicon()
    op = CorruptionOp(op)
    format = detect_format(correct)
    if op not in ops_for(format):
        raise InapplicableOp(
            "%s does not apply to %s queries" % (op.value, format.value))
    query = parse_query(correct, format)
    corrupted = OPERATORS[op](query, seed, lexicon)
    if corrupted == correct:
        raise InapplicableOp("%s leaves the query unchanged" % op.value)
    return corrupted
