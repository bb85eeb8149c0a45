"""Turn retrieved triples into fact sentences for prompt injection."""
from __future__ import absolute_import

import logging
from dataclasses import dataclass

from cokb.kb.store import term_id
from cokb.query import Var, Literal

log = logging.getLogger('cokb')


def sentence(subject_label, predicate_label, object_label):
    return '%s %s %s.' % (subject_label, predicate_label, object_label)


@dataclass(frozen=True)
class KnowledgeFact(object):
    """One (subject, predicate, object) triple with labels.

    Each part is an (id, label) pair; a literal object has `id` None.
    """
    subject: tuple
    predicate: tuple
    object: tuple
    verbalization: str

    @classmethod
    def build(cls, subject, predicate, obj):
        return cls(subject, predicate, obj,
                   sentence(subject[1], predicate[1], obj[1]))

    def to_json(self):
        return {
            'subject': list(self.subject),
            'predicate': list(self.predicate),
            'object': list(self.object),
            'verbalization': self.verbalization,
        }


def _labelled(term, labels):
    if isinstance(term, Literal):
        return (None, term.text)
    kb_id = term_id(term)
    label = labels.get(kb_id)
    if label is None:
        log.warning("no label for %s, using the id", kb_id)
        label = kb_id
    return (kb_id, label)


def make_fact(subject, predicate, obj, labels):
    """Build a fact from three bound terms and an id -> label map."""
    return KnowledgeFact.build(
        _labelled(subject, labels),
        _labelled(predicate, labels),
        _labelled(obj, labels))


def _ground(term, row):
    if isinstance(term, Var):
        return row.get(term.name)
    return term


def row_ids(query, rows):
    ids = set()
    for row in rows:
        for pattern in query.patterns:
            for term in pattern:
                bound = _ground(term, row)
                if bound is not None and term_id(bound) is not None:
                    ids.add(term_id(bound))
    return sorted(ids)


def ground_rows(query, rows, labels):
    """Per row, the facts of every pattern the row fully binds."""
    grounded = []
    for row in rows:
        facts = []
        for pattern in query.patterns:
            terms = [_ground(term, row) for term in pattern]
            if any(term is None for term in terms):
                continue
            facts.append(make_fact(terms[0], terms[1], terms[2], labels))
        grounded.append(facts)
    return grounded


def verbalize_facts(facts):
    return [fact.verbalization for fact in facts]


def verbalize_rows(rows, query, labels):
    """One line per row: the sentences of its grounded patterns."""
    return [
        ' '.join(fact.verbalization for fact in facts)
        for facts in ground_rows(query, rows, labels)]
