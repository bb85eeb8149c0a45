import os
import json
from unittest import TestCase

from cokb.kb import CachedSource, FixtureSource, cached, execute_sparql
from cokb.query import parse_query

from cokb.tests.helpers import CountingSource, TempDirMixin, data_path

SPOUSE = "select ?o where { wd:Q76 wdt:P26 ?o }"
BIRTH = 'select ?o where { wd:Q76 wdt:P569 ?o }'


class CachedSourceTestCase(TestCase, TempDirMixin):

    def setUp(self):
        self.inner = CountingSource(FixtureSource.load(data_path('kb.json')))
        self.path = os.path.join(self.make_tempdir(), 'cache.jsonl')

    def test_second_call_is_cached(self):
        source = cached(self.inner, self.path)
        first = execute_sparql(source, parse_query(SPOUSE))
        second = execute_sparql(source, parse_query(SPOUSE))
        self.assertEqual(first, second)
        self.assertEqual(self.inner.counts['execute'], 1)
        self.assertEqual((source.hits, source.misses), (1, 1))

    def test_distinct_queries_miss(self):
        source = cached(self.inner)
        execute_sparql(source, parse_query(SPOUSE))
        execute_sparql(source, parse_query(BIRTH))
        self.assertEqual(self.inner.counts['execute'], 2)

    def test_equal_to_uncached(self):
        source = cached(self.inner, self.path)
        for text in (SPOUSE, BIRTH):
            query = parse_query(text)
            self.assertEqual(execute_sparql(source, query),
                             execute_sparql(self.inner.inner, query))
        self.assertEqual(source.search('Barack Obama'),
                         self.inner.inner.search('Barack Obama'))
        self.assertEqual(source.labels(['Q76', 'P26']),
                         {'Q76': 'Barack Obama', 'P26': 'spouse'})

    def test_survives_restart(self):
        source = cached(self.inner, self.path)
        rows = execute_sparql(source, parse_query(BIRTH))
        source.search('Barack Obama')
        source.labels(['Q76'])

        counting = CountingSource(self.inner.inner)
        restarted = cached(counting, self.path)
        self.assertEqual(execute_sparql(restarted, parse_query(BIRTH)), rows)
        self.assertEqual(restarted.search('Barack Obama')[0].id, 'Q76')
        self.assertEqual(restarted.labels(['Q76']), {'Q76': 'Barack Obama'})
        self.assertEqual(counting.total, 0)

    def test_compacts_duplicates(self):
        line = json.dumps({'key': 'k', 'value': 1})
        with open(self.path, 'w') as f:
            f.write(line + '\n')
            f.write(json.dumps({'key': 'k', 'value': 2}) + '\n')
        source = CachedSource(self.inner, self.path)
        self.assertEqual(source.entries, {'k': 2})
        with open(self.path) as f:
            self.assertEqual(len(f.readlines()), 1)

    def test_io_error_degrades_to_pass_through(self):
        blocked = os.path.join(self.path, 'nested', 'cache.jsonl')
        with open(self.path, 'w') as f:
            f.write('')
        with self.assertLogs('cokb', 'WARNING'):
            source = cached(self.inner, blocked)
            rows = execute_sparql(source, parse_query(SPOUSE))
        self.assertEqual(len(rows), 1)
        self.assertIsNone(source.path)
        execute_sparql(source, parse_query(SPOUSE))
        self.assertEqual(self.inner.counts['execute'], 1)

    def test_corrupt_file(self):
        with open(self.path, 'w') as f:
            f.write('not json\n')
        with self.assertLogs('cokb', 'WARNING'):
            source = cached(self.inner, self.path)
        self.assertEqual(len(execute_sparql(source, parse_query(SPOUSE))), 1)
