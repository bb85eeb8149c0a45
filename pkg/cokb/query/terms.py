"""Terms shared by the triplet and SPARQL query formats.

All values are frozen, so queries can be shared freely between threads.
"""
from __future__ import absolute_import

import re
from dataclasses import dataclass
from enum import Enum

from cokb.query.errors import TermError

VAR_NAME = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*\Z')
ENTITY_ID = re.compile(r'^Q[0-9]+\Z')
PROPERTY_ID = re.compile(r'^P[0-9]+\Z')

ENTITY = 'entity'
PROPERTY = 'property'


class Form(Enum):
    PLACEHOLDER = 'placeholder'
    RESOLVED = 'resolved'


class Format(Enum):
    TRIPLETS = 'triplets'
    SPARQL = 'sparql'


@dataclass(frozen=True)
class Var(object):
    name: str

    def __post_init__(self):
        if not VAR_NAME.match(self.name or ''):
            raise TermError("invalid variable name %r" % (self.name,))


@dataclass(frozen=True)
class EntityPlaceholder(object):
    label: str

    def __post_init__(self):
        if not self.label or not self.label.strip():
            raise TermError("entity placeholder needs a label")


@dataclass(frozen=True)
class PropertyPlaceholder(object):
    label: str

    def __post_init__(self):
        if not self.label or not self.label.strip():
            raise TermError("property placeholder needs a label")


@dataclass(frozen=True)
class ResolvedEntity(object):
    id: str

    def __post_init__(self):
        if not ENTITY_ID.match(self.id or ''):
            raise TermError("invalid entity id %r" % (self.id,))


@dataclass(frozen=True)
class ResolvedProperty(object):
    id: str

    def __post_init__(self):
        if not PROPERTY_ID.match(self.id or ''):
            raise TermError("invalid property id %r" % (self.id,))


@dataclass(frozen=True)
class Literal(object):
    """A literal value.

    `bare` marks an unquoted word run accepted by the lenient parser; the
    canonical serialization of a literal is always quoted.
    """
    text: str
    bare: bool = False


class _Hole(object):
    """The triplet slot to retrieve."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(_Hole, cls).__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'HOLE'

    def __reduce__(self):
        return (_Hole, ())


HOLE = _Hole()

PLACEHOLDERS = (EntityPlaceholder, PropertyPlaceholder)
PREDICATES = (PropertyPlaceholder, ResolvedProperty, Var)


def is_placeholder(term):
    return isinstance(term, PLACEHOLDERS)


def mention_kind(term):
    if isinstance(term, EntityPlaceholder):
        return ENTITY
    if isinstance(term, PropertyPlaceholder):
        return PROPERTY
    return None


def resolved_term(kb_id):
    """Build the resolved term for a raw KB identifier."""
    if ENTITY_ID.match(kb_id):
        return ResolvedEntity(kb_id)
    if PROPERTY_ID.match(kb_id):
        return ResolvedProperty(kb_id)
    raise TermError("not a KB identifier: %r" % (kb_id,))


def is_kb_id(value):
    return bool(ENTITY_ID.match(value) or PROPERTY_ID.match(value))
