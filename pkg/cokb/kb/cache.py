"""Persistent memoization of knowledge-source calls.

The cache file is append-only JSONL of `{"key": ..., "value": ...}`; later
lines win, and the file is rewritten without duplicates when loaded.
"""
from __future__ import absolute_import

import io
import os
import json
import logging
import threading

from cokb.kb.sources import (
    KnowledgeSource,
    EntityCandidate,
    LINK_LIMIT,
    row_to_json,
    row_from_json,
)
from cokb.query import ENTITY, Form, serialize_sparql

log = logging.getLogger('cokb')


def cache_key(operation, payload):
    return json.dumps([operation, payload], sort_keys=True,
                      separators=(',', ':'), ensure_ascii=False)


class CachedSource(KnowledgeSource):
    """Wraps a source; identical calls after the first skip the inner one.

    With no `path` the cache lives in memory only. IO failures turn the
    cache into an in-memory one and log a warning.
    """

    def __init__(self, inner, path=None):
        self.inner = inner
        self.path = path
        self.entries = {}
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()
        if path is not None:
            self._load()

    def _disable(self, error):
        log.warning("cache %s unusable, continuing without it: %s",
                    self.path, error)
        self.path = None

    def _load(self):
        if not os.path.exists(self.path):
            return
        lines = 0
        try:
            with io.open(self.path, encoding='utf8') as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    self.entries[entry['key']] = entry['value']
                    lines += 1
        except (IOError, OSError, ValueError, KeyError) as e:
            self._disable(e)
            return
        if lines > len(self.entries):
            self._compact()

    def _compact(self):
        tmp = self.path + '.tmp'
        try:
            with io.open(tmp, 'w', encoding='utf8') as f:
                for key, value in self.entries.items():
                    f.write(json.dumps({'key': key, 'value': value},
                                       ensure_ascii=False) + '\n')
            os.replace(tmp, self.path)
        except (IOError, OSError) as e:
            self._disable(e)

    def _store(self, key, value):
        with self._lock:
            self.entries[key] = value
            if self.path is None:
                return
            try:
                with io.open(self.path, 'a', encoding='utf8') as f:
                    f.write(json.dumps({'key': key, 'value': value},
                                       ensure_ascii=False) + '\n')
            except (IOError, OSError) as e:
                self._disable(e)

    def _call(self, key, compute):
        if key in self.entries:
            self.hits += 1
            return self.entries[key]
        self.misses += 1
        value = compute()
        self._store(key, value)
        return value

    def search(self, mention, kind=ENTITY, limit=LINK_LIMIT):
        key = cache_key('search', [mention, kind, limit])
        value = self._call(key, lambda: [
            c.to_json() for c in self.inner.search(mention, kind, limit)])
        return [EntityCandidate.from_json(c) for c in value]

    def execute(self, query):
        text = serialize_sparql(query, Form.RESOLVED)
        key = cache_key('execute', text)
        value = self._call(key, lambda: [
            row_to_json(row) for row in self.inner.execute(query)])
        return [row_from_json(row) for row in value]

    def labels(self, ids):
        ids = sorted(set(ids))
        key = cache_key('labels', ids)
        return dict(self._call(key, lambda: self.inner.labels(ids)))


def cached(source, path=None):
    return CachedSource(source, path)
