from __future__ import absolute_import

from cokb.query.errors import (
    QueryError,
    ParseError,
    EmptyQuery,
    Unparseable,
    HoleCountError,
    UnresolvedTerm,
    MissingBinding,
    TermError,
)
from cokb.query.terms import (
    Form,
    Format,
    HOLE,
    ENTITY,
    PROPERTY,
    Var,
    EntityPlaceholder,
    PropertyPlaceholder,
    ResolvedEntity,
    ResolvedProperty,
    Literal,
)
from cokb.query.sparql import (
    IssueCode,
    ValidationIssue,
    TriplePattern,
    SparqlQuery,
    parse_sparql,
    serialize_sparql,
    validate,
)
from cokb.query.sparql_lex import escape_label
from cokb.query.triplet import TripletQuery, parse_triplet, serialize_triplet
from cokb.query.mentions import (
    Mention,
    collect_mentions,
    resolve_placeholders,
    is_resolved,
)


def detect_format(text):
    if text.strip().startswith('('):
        return Format.TRIPLETS
    return Format.SPARQL


def parse_query(text, format=None):
    """Parse either query format, guessing it from the text if not given."""
    if format is None:
        format = detect_format(text or '')
    if format == Format.TRIPLETS:
        return parse_triplet(text)
    return parse_sparql(text)


def serialize_query(query, form=Form.PLACEHOLDER):
    if isinstance(query, TripletQuery):
        return serialize_triplet(query, form)
    return serialize_sparql(query, form)


def query_format(query):
    if isinstance(query, TripletQuery):
        return Format.TRIPLETS
    return Format.SPARQL
