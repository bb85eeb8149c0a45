"""Lexer rules for the SPARQL subset.

Placeholder labels may carry `/`, `{`, `}` and `\\` escaped with a
backslash. Function tokens are tried in the order they are defined, so
placeholders win over resolved ids and both win over bare words.
"""
from __future__ import absolute_import

import re
import sys

from ply.lex import lex, NullLogger, TOKEN

from cokb.query.errors import Unparseable

KEYWORDS = {
    'select': 'SELECT',
    'distinct': 'DISTINCT',
    'where': 'WHERE',
}

tokens = [
    'LBRACE', 'RBRACE', 'DOT',
    'VAR', 'PLACEHOLDER', 'RESOLVED', 'STRING', 'WORD',
] + sorted(KEYWORDS.values())

# rules are compiled with re.VERBOSE, so no literal blanks outside classes
PAT_ESCAPED = r'\\[\s\S]'
PAT_PLACEHOLDER = r'wdt?:/(?:' + PAT_ESCAPED + r'|[^/{}\\])*/?'
PAT_RESOLVED = r'wdt?:[A-Za-z0-9_]+'
PAT_VAR = r'\?[A-Za-z_][A-Za-z0-9_]*'
PAT_STRING = r'"(?:' + PAT_ESCAPED + r'|[^"\\])*"'
PAT_WORD = r'[^\s{}".]+(?:\.[^\s{}".]+)*'

PLACEHOLDER_PARTS = re.compile(
    r'(?P<prefix>wdt?):/(?P<label>(?:\\.|[^/{}\\])*)(?P<close>/?)\Z',
    re.DOTALL)
RESOLVED_PARTS = re.compile(r'(?P<prefix>wdt?):(?P<id>[A-Za-z0-9_]+)\Z')
UNESCAPE_RE = re.compile(r'\\(.)', re.DOTALL)
LABEL_ESCAPE_RE = re.compile(r'([\\/{}])')

t_ignore = ' \t\r\n\f\v'

t_LBRACE = r'[{]'
t_RBRACE = r'[}]'
t_DOT = r'[.]'


@TOKEN(PAT_PLACEHOLDER)
def t_PLACEHOLDER(t):
    return t


@TOKEN(PAT_RESOLVED)
def t_RESOLVED(t):
    return t


@TOKEN(PAT_VAR)
def t_VAR(t):
    return t


@TOKEN(PAT_STRING)
def t_STRING(t):
    return t


@TOKEN(PAT_WORD)
def t_WORD(t):
    t.type = KEYWORDS.get(t.value.lower(), 'WORD')
    return t


def t_error(t):
    raise Unparseable("unexpected character %r" % t.value[0],
                      t.lexpos, t.lexpos + 1)


def escape_label(label):
    return LABEL_ESCAPE_RE.sub(r'\\\1', label)


def unescape(text):
    return UNESCAPE_RE.sub(r'\1', text)


LEXER = lex(module=sys.modules[__name__],
            errorlog=NullLogger())


def make_lexer():
    """A fresh lexer for one parse; the shared master regex is reused."""
    lexer = LEXER.clone()
    lexer.issues = []
    return lexer
