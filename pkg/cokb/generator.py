"""Query generators: natural-language sub-question to structured query.

Two generators share the `generate(question, format) -> text` call: a
regex pattern table for deterministic runs, and a client for an external
text-to-query service.
"""
from __future__ import absolute_import

import io
import re
import json
import string
import logging

import requests

from cokb import config
from cokb.errors import CokError, ContractError
from cokb.query import (
    Format,
    ParseError,
    SparqlQuery,
    escape_label,
    parse_query,
    validate,
)

log = logging.getLogger('cokb')


class GeneratorUnavailable(CokError):
    pass


class PatternTableError(ContractError):
    pass


class UnparseableGeneratedQuery(CokError):

    def __init__(self, raw, reason):
        super(UnparseableGeneratedQuery, self).__init__(
            "generated query %r does not parse: %s" % (raw, reason))
        self.raw = raw
        self.reason = reason


class RuleTemplateGenerator(object):
    """First matching regex wins; its named groups fill `$name` slots.

    A pattern table is a list of entries::

        {"pattern": "(?P<e>.+) was born",
         "triplets": "($e, date of birth, ?)",
         "sparql": "select ?x where { wd:/$e/ wdt:/date of birth/ ?x }"}
    """

    def __init__(self, table=()):
        self.rules = []
        for entry in table:
            pattern = re.compile(entry['pattern'], re.IGNORECASE)
            templates = {}
            for format in Format:
                if format.value not in entry:
                    continue
                template = string.Template(entry[format.value])
                missing = set(template.get_identifiers()) - set(
                    pattern.groupindex)
                if not template.is_valid() or missing:
                    raise PatternTableError(
                        "%s template of %r names unknown groups: %s" % (
                            format.value, entry['pattern'],
                            ', '.join(sorted(missing)) or 'invalid $'))
                templates[format] = template
            self.rules.append((pattern, templates))

    @classmethod
    def load(cls, path):
        with io.open(path, encoding='utf8') as f:
            return cls(json.load(f))

    def generate(self, question, format):
        format = Format(format)
        for pattern, templates in self.rules:
            if format not in templates:
                continue
            match = pattern.search(question)
            if match is None:
                continue
            values = dict((k, (v or '').strip())
                          for k, v in match.groupdict().items())
            if format == Format.SPARQL:
                values = dict((k, escape_label(v))
                              for k, v in values.items())
            return templates[format].substitute(values)
        raise GeneratorUnavailable(
            "no %s pattern matches %r" % (format.value, question))


class ExternalHttpGenerator(object):
    """Client for a text-to-query service.

    POSTs {question, format} and reads {query} back.
    """

    def __init__(self, url, session=None, timeout=config.HTTP_TIMEOUT):
        self.url = url
        self.session = session or requests.Session()
        self.timeout = timeout

    def generate(self, question, format):
        format = Format(format)
        try:
            response = self.session.post(
                self.url, json={'question': question, 'format': format.value},
                timeout=self.timeout)
        except requests.RequestException as e:
            raise GeneratorUnavailable("query generator unreachable: %s" % e)
        if response.status_code != 200:
            raise GeneratorUnavailable(
                "query generator answered %d" % response.status_code)
        try:
            query = response.json()['query']
        except (ValueError, KeyError, TypeError):
            raise GeneratorUnavailable("query generator sent no query")
        if not isinstance(query, str):
            raise GeneratorUnavailable("query generator sent no query")
        return query


def generate_query(generator, sub_question, format):
    """Generate and parse a query; returns (query, raw text, issues)."""
    if not sub_question or not sub_question.strip():
        raise ContractError("empty sub-question")
    format = Format(format)
    raw = generator.generate(sub_question, format)
    try:
        query = parse_query(raw, format)
    except ParseError as e:
        raise UnparseableGeneratedQuery(raw, str(e))
    issues = validate(query) if isinstance(query, SparqlQuery) else []
    return query, raw, issues
