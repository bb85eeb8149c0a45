"""An in-memory triple store loaded from a JSON fixture.

Fixture layout::

    {
      "triples": [["Q76", "P26", "Q13133"], ["Q76", "P569", {"literal": "1961"}]],
      "labels": {"Q76": "Barack Obama", "P26": "spouse", "Q13133": "Michelle Obama"},
      "aliases": {"Q76": ["Obama"]},
      "descriptions": {"Q76": "44th president of the United States"}
    }

An object string that is not a Q/P identifier is read as a literal;
`{"literal": ...}` forces a literal.
"""
from __future__ import absolute_import

import io
import json
import logging

from cokb.kb.errors import FixtureError
from cokb.query.terms import (
    ENTITY,
    ENTITY_ID,
    PROPERTY_ID,
    ResolvedEntity,
    ResolvedProperty,
    Literal,
    is_kb_id,
    resolved_term,
)

log = logging.getLogger('cokb')


def id_key(kb_id):
    """Sort Q/P ids numerically within their kind."""
    return (kb_id[0], int(kb_id[1:]))


def term_key(term):
    if isinstance(term, (ResolvedEntity, ResolvedProperty)):
        return (0,) + id_key(term.id)
    return (1, term.text, 0)


def term_id(term):
    if isinstance(term, (ResolvedEntity, ResolvedProperty)):
        return term.id
    return None


def _object_term(value):
    if isinstance(value, dict):
        if 'literal' not in value:
            raise FixtureError("object %r has no 'literal' key" % (value,))
        return Literal(str(value['literal']))
    if not isinstance(value, str):
        return Literal(json.dumps(value))
    if is_kb_id(value):
        return resolved_term(value)
    return Literal(value)


class FixtureStore(object):
    """Triples plus labels, searchable by lowercase label."""

    def __init__(self, triples=(), labels=None, aliases=None,
                 descriptions=None):
        self.labels = dict(labels or {})
        self.aliases = dict(aliases or {})
        self.descriptions = dict(descriptions or {})
        unique = set()
        for i, triple in enumerate(triples):
            if len(triple) != 3:
                raise FixtureError("triple %d does not have 3 parts" % i)
            subject, predicate, obj = triple
            if not isinstance(subject, str) or not ENTITY_ID.match(subject):
                raise FixtureError(
                    "triple %d: subject %r is not an entity id" % (i, subject))
            if not isinstance(predicate, str) or \
                    not PROPERTY_ID.match(predicate):
                raise FixtureError(
                    "triple %d: predicate %r is not a property id"
                    % (i, predicate))
            if not isinstance(obj, (ResolvedEntity, ResolvedProperty,
                                    Literal)):
                obj = _object_term(obj)
            unique.add((ResolvedEntity(subject), ResolvedProperty(predicate),
                        obj))
        self.triples = sorted(
            unique, key=lambda t: tuple(term_key(term) for term in t))

        for triple in self.triples:
            for term in triple:
                kb_id = term_id(term)
                if kb_id is not None and kb_id not in self.labels:
                    raise FixtureError("no label for %s" % kb_id)

        self.search_index = {}
        for kb_id, label in self.labels.items():
            self._index(label, kb_id)
        for kb_id, names in self.aliases.items():
            for name in names:
                self._index(name, kb_id)

    def _index(self, name, kb_id):
        ids = self.search_index.setdefault(name.casefold(), [])
        if kb_id not in ids:
            ids.append(kb_id)
            ids.sort(key=id_key)

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or 'triples' not in data:
            raise FixtureError("fixture needs a 'triples' list")
        return cls(
            triples=data['triples'],
            labels=data.get('labels', {}),
            aliases=data.get('aliases', {}),
            descriptions=data.get('descriptions', {}),
        )

    @classmethod
    def load(cls, path):
        with io.open(path, encoding='utf8') as f:
            try:
                data = json.load(f)
            except ValueError as e:
                raise FixtureError("%s: %s" % (path, e))
        store = cls.from_json(data)
        log.debug("loaded %d triples from %s", len(store.triples), path)
        return store

    def __len__(self):
        return len(self.triples)

    def search(self, mention, kind=ENTITY, limit=None):
        """Ids whose label matches exactly, then ids with a label prefix."""
        prefix = 'Q' if kind == ENTITY else 'P'
        needle = mention.strip().casefold()
        found = [i for i in self.search_index.get(needle, ())
                 if i.startswith(prefix)]
        prefixed = []
        for name in sorted(self.search_index):
            if name != needle and name.startswith(needle):
                for kb_id in self.search_index[name]:
                    if kb_id.startswith(prefix):
                        prefixed.append(kb_id)
        for kb_id in prefixed:
            if kb_id not in found:
                found.append(kb_id)
        if limit is not None:
            found = found[:limit]
        return found

    def match(self, subject=None, predicate=None, obj=None):
        """Triples agreeing with every given term; None matches anything."""
        for triple in self.triples:
            if subject is not None and triple[0] != subject:
                continue
            if predicate is not None and triple[1] != predicate:
                continue
            if obj is not None and triple[2] != obj:
                continue
            yield triple
