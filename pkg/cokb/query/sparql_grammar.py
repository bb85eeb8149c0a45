"""Grammar rules for the SPARQL subset.

Unquoted word runs and a missing `where` are accepted and recorded as
issues on the lexer, so corrupted queries stay representable. Values of
terms travel as (term, start, end) so issues keep their source spans.
"""
from __future__ import absolute_import

import sys
import threading

from ply import yacc

from cokb.query.errors import Unparseable
from cokb.query.nodes import (
    IssueCode,
    ValidationIssue,
    TriplePattern,
    SparqlQuery,
)
from cokb.query.sparql_lex import (
    tokens,
    PLACEHOLDER_PARTS,
    RESOLVED_PARTS,
    make_lexer,
    unescape,
)
from cokb.query.terms import (
    Var,
    EntityPlaceholder,
    PropertyPlaceholder,
    ResolvedEntity,
    ResolvedProperty,
    Literal,
    PREDICATES,
    ENTITY_ID,
    PROPERTY_ID,
)

# a word run keeps absorbing words instead of ending the term
precedence = (
    ('nonassoc', 'BARE'),
    ('nonassoc', 'WORD', 'SELECT', 'DISTINCT', 'WHERE'),
)


class EndOfInput(Exception):
    pass


def issue(p, code, start, end, message):
    p.lexer.issues.append(ValidationIssue(code, start, end, message))


def token_span(p, idx):
    start = p.lexpos(idx)
    return start, start + len(p[idx])


def p_query(p):
    '''
    query : SELECT distinct projection where block
    '''
    block_start, patterns = p[5]
    if not p[4]:
        issue(p, IssueCode.MISSING_WHERE_KEYWORD, block_start, block_start,
              "missing 'where' before the pattern block")
    p[0] = SparqlQuery(
        distinct=p[2],
        projection=tuple(p[3]),
        patterns=tuple(patterns),
        issues=tuple(sorted(p.lexer.issues, key=lambda i: i.start)),
        source=p.lexer.lexdata,
    )


def p_distinct(p):
    '''
    distinct : DISTINCT
             | empty
    '''
    p[0] = p[1] is not None


def p_where(p):
    '''
    where : WHERE
          | empty
    '''
    p[0] = p[1] is not None


def p_projection_0(p):
    '''
    projection : VAR
    '''
    p[0] = [p[1][1:]]


def p_projection_1(p):
    '''
    projection : projection VAR
    '''
    p[0] = p[1] + [p[2][1:]]


def p_block_0(p):
    '''
    block : LBRACE RBRACE
    '''
    raise Unparseable("no triple pattern in the query",
                      p.lexpos(1), p.lexpos(2) + 1)


def p_block_1(p):
    '''
    block : LBRACE patterns RBRACE
          | LBRACE patterns DOT RBRACE
    '''
    p[0] = p.lexpos(1), p[2]


def p_patterns_0(p):
    '''
    patterns : pattern
    '''
    p[0] = [p[1]]


def p_patterns_1(p):
    '''
    patterns : patterns DOT pattern
    '''
    p[0] = p[1] + [p[3]]


def p_pattern(p):
    '''
    pattern : term term term
    '''
    (subject, start, _), (predicate, _, _), (obj, _, end) = p[1], p[2], p[3]
    if not isinstance(predicate, PREDICATES):
        raise Unparseable("predicate must be a property or a variable",
                          start, end)
    p[0] = TriplePattern(subject, predicate, obj)


def p_term_var(p):
    '''
    term : VAR
    '''
    p[0] = (Var(p[1][1:]),) + token_span(p, 1)


def p_term_string(p):
    '''
    term : STRING
    '''
    p[0] = (Literal(unescape(p[1][1:-1])),) + token_span(p, 1)


def p_term_resolved(p):
    '''
    term : RESOLVED
    '''
    start, end = token_span(p, 1)
    parts = RESOLVED_PARTS.match(p[1])
    kb_id = parts.group('id')
    if parts.group('prefix') == 'wd' and ENTITY_ID.match(kb_id):
        term = ResolvedEntity(kb_id)
    elif parts.group('prefix') == 'wdt' and PROPERTY_ID.match(kb_id):
        term = ResolvedProperty(kb_id)
    else:
        raise Unparseable("invalid identifier %r" % p[1], start, end)
    p[0] = term, start, end


def p_term_placeholder(p):
    '''
    term : PLACEHOLDER
    '''
    start, end = token_span(p, 1)
    parts = PLACEHOLDER_PARTS.match(p[1])
    label = unescape(parts.group('label'))
    if not parts.group('close'):
        issue(p, IssueCode.MALFORMED_PLACEHOLDER, start, end,
              "placeholder is missing its closing '/'")
    if not label.strip():
        issue(p, IssueCode.MALFORMED_PLACEHOLDER, start, end,
              "placeholder has an empty label")
        p[0] = Literal(p[1], bare=True), start, end
    elif parts.group('prefix') == 'wd':
        p[0] = EntityPlaceholder(label), start, end
    else:
        p[0] = PropertyPlaceholder(label), start, end


def p_term_bare(p):
    '''
    term : bare %prec BARE
    '''
    start, end = p[1]
    text = p.lexer.lexdata[start:end]
    issue(p, IssueCode.BARE_ENTITY, start, end,
          "'%s' is not wrapped as wd:/.../" % text)
    p[0] = Literal(text, bare=True), start, end


def p_bare_0(p):
    '''
    bare : word
    '''
    p[0] = p[1]


def p_bare_1(p):
    '''
    bare : bare word
    '''
    p[0] = p[1][0], p[2][1]


def p_word(p):
    '''
    word : WORD
         | SELECT
         | DISTINCT
         | WHERE
    '''
    p[0] = token_span(p, 1)


def p_empty(p):
    '''
    empty :
    '''
    p[0] = None


def p_error(t):
    if t is None:
        raise EndOfInput()
    raise Unparseable("unexpected %r" % t.value,
                      t.lexpos, t.lexpos + len(t.value))


_local = threading.local()


def parser():
    """The LALR parser of the calling thread."""
    if getattr(_local, 'parser', None) is None:
        _local.parser = yacc.yacc(
            module=sys.modules[__name__], start='query', debug=False,
            write_tables=False, errorlog=yacc.NullLogger())
    return _local.parser


def parse(text):
    """Parse query text, raising Unparseable with a source span."""
    try:
        return parser().parse(text, lexer=make_lexer())
    except EndOfInput:
        raise Unparseable("unexpected end of query", len(text), len(text))
