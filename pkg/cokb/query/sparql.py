"""Parser, serializer and validator for the SPARQL subset.

Grammar::

    query    := 'select' ['distinct'] var+ ['where'] '{' pattern ('.' pattern)* ['.'] '}'
    pattern  := term term term
    term     := ?var | wd:/label/ | wdt:/label/ | wd:Qn | wdt:Pn | "literal" | word+

The lexer and LALR grammar live in `sparql_lex` and `sparql_grammar`.
Unquoted word runs and a missing `where` are accepted leniently and
recorded as issues on the parsed query.
"""
from __future__ import absolute_import

from cokb.query import sparql_grammar
from cokb.query.errors import EmptyQuery, UnresolvedTerm
from cokb.query.nodes import (
    IssueCode,
    ValidationIssue,
    TriplePattern,
    SparqlQuery,
)
from cokb.query.sparql_lex import escape_label
from cokb.query.terms import (
    Form,
    Var,
    EntityPlaceholder,
    PropertyPlaceholder,
    ResolvedEntity,
    ResolvedProperty,
    Literal,
)


def parse_sparql(text):
    """Parse query text leniently.

    Raises EmptyQuery for blank input and Unparseable when no query can be
    formed. Surface defects are kept on the result's `issues`.
    """
    if text is None or not text.strip():
        raise EmptyQuery("empty query")
    return sparql_grammar.parse(text)


def _escape(text):
    return text.replace('\\', '\\\\').replace('"', '\\"')


def term_text(term, form=Form.PLACEHOLDER):
    if isinstance(term, Var):
        return '?' + term.name
    if isinstance(term, EntityPlaceholder):
        if form == Form.RESOLVED:
            raise UnresolvedTerm("unresolved entity '%s'" % term.label)
        return 'wd:/%s/' % escape_label(term.label)
    if isinstance(term, PropertyPlaceholder):
        if form == Form.RESOLVED:
            raise UnresolvedTerm("unresolved property '%s'" % term.label)
        return 'wdt:/%s/' % escape_label(term.label)
    if isinstance(term, ResolvedEntity):
        return 'wd:' + term.id
    if isinstance(term, ResolvedProperty):
        return 'wdt:' + term.id
    if isinstance(term, Literal):
        if term.bare:
            return term.text
        return '"%s"' % _escape(term.text)
    raise TypeError("not a query term: %r" % (term,))


def serialize_sparql(query, form=Form.PLACEHOLDER, where=True,
                     trailing_dot=False):
    """Render the canonical single-space form of a query.

    `where` and `trailing_dot` exist to reproduce surface variants; the
    canonical form keeps `where` and omits the trailing dot.
    """
    parts = ['select']
    if query.distinct:
        parts.append('distinct')
    parts.extend('?' + name for name in query.projection)
    if where:
        parts.append('where')
    parts.append('{')
    body = ' . '.join(
        ' '.join(term_text(term, form) for term in pattern)
        for pattern in query.patterns)
    if body:
        parts.append(body)
    if trailing_dot and body:
        parts.append('.')
    parts.append('}')
    return ' '.join(parts)


def validate(query, source_issues=None):
    """Return every issue of a query; an empty list means well-formed."""
    if source_issues is None:
        source_issues = query.issues
    issues = list(source_issues)
    source = query.source or ''
    whole = (0, len(source))

    if not query.patterns:
        issues.append(ValidationIssue(
            IssueCode.EMPTY_PATTERNS, whole[0], whole[1],
            "query has no triple pattern"))

    bound = set(query.variables())
    for name in query.projection:
        if name in bound:
            continue
        at = source.find('?' + name)
        if at >= 0:
            span = (at, at + len(name) + 1)
        else:
            span = whole
        issues.append(ValidationIssue(
            IssueCode.UNBOUND_PROJECTION, span[0], span[1],
            "projected variable ?%s occurs in no pattern" % name))
    return issues
