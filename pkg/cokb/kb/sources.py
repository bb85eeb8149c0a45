"""Knowledge sources: entity linking and query execution.

A source answers three calls:

    search(mention, kind, limit) -> [EntityCandidate]
    execute(query) -> [row]          # query is a resolved SparqlQuery
    labels(ids) -> {id: label}

A row maps each projected variable name to a ResolvedEntity,
ResolvedProperty or Literal.
"""
from __future__ import absolute_import

import logging
from dataclasses import dataclass

import requests

from cokb import config
from cokb.errors import ContractError
from cokb.kb.errors import Transport, EndpointError, UnresolvedQuery
from cokb.kb.ratelimit import TokenBucket
from cokb.kb.store import FixtureStore, term_id
from cokb.query import (
    Form,
    HOLE,
    ENTITY,
    PROPERTY,
    Var,
    Literal,
    SparqlQuery,
    TriplePattern,
    TripletQuery,
    is_resolved,
    serialize_sparql,
)
from cokb.query.terms import is_kb_id, resolved_term
from cokb.util import measure

log = logging.getLogger('cokb')

HOLE_VAR = 'hole'
LINK_LIMIT = 5
LABEL_BATCH = 50


@dataclass(frozen=True)
class EntityCandidate(object):
    id: str
    label: str
    description: str = ''
    rank: int = 0

    def to_json(self):
        return {
            'id': self.id,
            'label': self.label,
            'description': self.description,
            'rank': self.rank,
        }

    @classmethod
    def from_json(cls, data):
        return cls(data['id'], data['label'], data.get('description', ''),
                   data.get('rank', 0))


def term_to_json(term):
    """The SPARQL JSON results shape of one bound term."""
    kb_id = term_id(term)
    if kb_id is not None:
        return {'type': 'uri', 'value': kb_id}
    return {'type': 'literal', 'value': term.text}


def term_from_json(data):
    value = data['value']
    if data.get('type') == 'uri':
        tail = value.rstrip('/').rsplit('/', 1)[-1]
        if is_kb_id(tail):
            return resolved_term(tail)
    return Literal(value)


def row_to_json(row):
    return dict((name, term_to_json(term)) for name, term in row.items())


def row_from_json(data):
    return dict((name, term_from_json(value)) for name, value in data.items())


class KnowledgeSource(object):

    def search(self, mention, kind=ENTITY, limit=LINK_LIMIT):
        raise NotImplementedError

    def execute(self, query):
        raise NotImplementedError

    def labels(self, ids):
        raise NotImplementedError


def _unify(term, value, binding):
    if isinstance(term, Var):
        bound = binding.get(term.name)
        if bound is None:
            extended = dict(binding)
            extended[term.name] = value
            return extended
        return binding if bound == value else None
    if isinstance(term, Literal):
        if isinstance(value, Literal) and value.text == term.text:
            return binding
        return None
    return binding if term == value else None


class FixtureSource(KnowledgeSource):
    """Offline source over a FixtureStore."""

    def __init__(self, store):
        self.store = store

    @classmethod
    def load(cls, path):
        return cls(FixtureStore.load(path))

    def search(self, mention, kind=ENTITY, limit=LINK_LIMIT):
        ids = self.store.search(mention, kind, limit)
        return [
            EntityCandidate(
                id=kb_id,
                label=self.store.labels.get(kb_id, kb_id),
                description=self.store.descriptions.get(kb_id, ''),
                rank=rank)
            for rank, kb_id in enumerate(ids)]

    def _solve(self, patterns, binding):
        if not patterns:
            yield binding
            return
        pattern = patterns[0]
        for triple in self.store.triples:
            extended = binding
            for term, value in zip(pattern, triple):
                extended = _unify(term, value, extended)
                if extended is None:
                    break
            if extended is not None:
                for solution in self._solve(patterns[1:], extended):
                    yield solution

    def execute(self, query):
        rows = []
        seen = set()
        for binding in self._solve(list(query.patterns), {}):
            row = dict((name, binding[name]) for name in query.projection
                       if name in binding)
            if query.distinct:
                key = tuple(sorted(row.items(), key=lambda item: item[0]))
                if key in seen:
                    continue
                seen.add(key)
            rows.append(row)
        return rows

    def labels(self, ids):
        return dict((kb_id, self.store.labels[kb_id]) for kb_id in ids
                    if kb_id in self.store.labels)


class WikidataSource(KnowledgeSource):
    """Wikidata over HTTP: `wbsearchentities` for linking, the query service
    for SPARQL. Every request waits on the shared token bucket."""

    def __init__(self, sparql_url=config.WIKIDATA_SPARQL_URL,
                 search_url=config.WIKIDATA_API_URL, session=None,
                 bucket=None, timeout=config.HTTP_TIMEOUT, language='en'):
        self.sparql_url = sparql_url
        self.search_url = search_url
        self.session = session or requests.Session()
        self.session.headers.setdefault('User-Agent', config.USER_AGENT)
        self.bucket = bucket or TokenBucket()
        self.timeout = timeout
        self.language = language

    @measure('kb')
    def _request(self, method, url, **kwargs):
        self.bucket.acquire()
        try:
            response = self.session.request(
                method, url, timeout=self.timeout, **kwargs)
        except requests.RequestException as e:
            raise Transport("%s %s failed: %s" % (method, url, e))
        if response.status_code != 200:
            raise EndpointError(response.status_code, response.text[:200])
        try:
            return response.json()
        except ValueError as e:
            raise EndpointError(response.status_code,
                                "invalid JSON body: %s" % e)

    def search(self, mention, kind=ENTITY, limit=LINK_LIMIT):
        data = self._request('GET', self.search_url, params={
            'action': 'wbsearchentities',
            'search': mention,
            'language': self.language,
            'type': 'property' if kind == PROPERTY else 'item',
            'limit': limit,
            'format': 'json',
        })
        if 'error' in data:
            raise EndpointError(200, data['error'].get('info', 'error'))
        return [
            EntityCandidate(
                id=hit['id'],
                label=hit.get('label', hit['id']),
                description=hit.get('description', ''),
                rank=rank)
            for rank, hit in enumerate(data.get('search', []))]

    def execute(self, query):
        text = serialize_sparql(query, Form.RESOLVED)
        data = self._request(
            'POST', self.sparql_url, data={'query': text},
            headers={'Accept': 'application/sparql-results+json'})
        rows = []
        for binding in data.get('results', {}).get('bindings', []):
            rows.append(dict(
                (name, term_from_json(binding[name]))
                for name in query.projection if name in binding))
        return rows

    def labels(self, ids):
        ids = list(ids)
        found = {}
        for start in range(0, len(ids), LABEL_BATCH):
            batch = ids[start:start + LABEL_BATCH]
            data = self._request('GET', self.search_url, params={
                'action': 'wbgetentities',
                'ids': '|'.join(batch),
                'props': 'labels',
                'languages': self.language,
                'format': 'json',
            })
            for kb_id, entity in data.get('entities', {}).items():
                label = entity.get('labels', {}).get(self.language)
                if label:
                    found[kb_id] = label['value']
        return found


class HeuristicLinker(object):
    """Exact label match first, then the source's own search order."""

    def link(self, source, mention, kind=ENTITY, limit=LINK_LIMIT):
        candidates = source.search(mention, kind, limit)
        needle = mention.strip().casefold()
        exact = [c for c in candidates if c.label.casefold() == needle]
        rest = [c for c in candidates if c.label.casefold() != needle]
        return [
            EntityCandidate(c.id, c.label, c.description, rank)
            for rank, c in enumerate(exact + rest)][:limit]


DEFAULT_LINKER = HeuristicLinker()


def link_entity(source, mention, kind=ENTITY, limit=LINK_LIMIT, linker=None):
    if not mention or not mention.strip():
        raise ContractError("cannot link an empty mention")
    return (linker or DEFAULT_LINKER).link(source, mention, kind, limit)


def execute_sparql(source, query):
    if not is_resolved(query):
        raise UnresolvedQuery("query still has placeholders")
    return source.execute(query)


def triplet_to_sparql(query):
    """The single-pattern query projecting the hole as ?hole."""
    hole = Var(HOLE_VAR)
    head = hole if query.head is HOLE else query.head
    tail = hole if query.tail is HOLE else query.tail
    return SparqlQuery(
        distinct=True,
        projection=(HOLE_VAR,),
        patterns=(TriplePattern(head, query.relation, tail),),
    )


def lookup_triplet(source, query):
    """Every (id-or-literal, label) filling the hole of a resolved triplet."""
    if not isinstance(query, TripletQuery):
        raise ContractError("not a triplet query: %r" % (query,))
    if not is_resolved(query):
        raise UnresolvedQuery("triplet still has placeholders")
    rows = source.execute(triplet_to_sparql(query))
    values = [row[HOLE_VAR] for row in rows]
    ids = [term_id(v) for v in values if term_id(v) is not None]
    labels = source.labels(ids) if ids else {}
    result = []
    for value in values:
        kb_id = term_id(value)
        if kb_id is None:
            result.append((value, value.text))
        else:
            result.append((kb_id, labels.get(kb_id, kb_id)))
    return result
