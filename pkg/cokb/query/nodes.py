"""Parsed SPARQL values and the issue codes the lenient parser records."""
from __future__ import absolute_import

from dataclasses import dataclass, field
from enum import Enum

from cokb.query.terms import Var


class IssueCode(Enum):
    BARE_ENTITY = 'BareEntity'
    MISSING_WHERE_KEYWORD = 'MissingWhereKeyword'
    UNBOUND_PROJECTION = 'UnboundProjection'
    EMPTY_PATTERNS = 'EmptyPatterns'
    MALFORMED_PLACEHOLDER = 'MalformedPlaceholder'


@dataclass(frozen=True)
class ValidationIssue(object):
    code: IssueCode
    start: int
    end: int
    message: str

    def to_json(self):
        return {
            'code': self.code.value,
            'start': self.start,
            'end': self.end,
            'message': self.message,
        }


@dataclass(frozen=True)
class TriplePattern(object):
    subject: object
    predicate: object
    object: object

    def __iter__(self):
        yield self.subject
        yield self.predicate
        yield self.object

    def variables(self):
        return [t.name for t in self if isinstance(t, Var)]


@dataclass(frozen=True)
class SparqlQuery(object):
    """A conjunctive SELECT query.

    `issues` and `source` are parse-time metadata and take no part in
    structural equality.
    """
    distinct: bool
    projection: tuple
    patterns: tuple
    issues: tuple = field(default=(), compare=False, repr=False)
    source: str = field(default=None, compare=False, repr=False)

    def variables(self):
        seen = []
        for pattern in self.patterns:
            for name in pattern.variables():
                if name not in seen:
                    seen.append(name)
        return seen
