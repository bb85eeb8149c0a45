"""Prompt templates shipped as text files with `{slot}` markers."""
from __future__ import absolute_import

import re
import logging
from importlib import resources

from cokb.llm.errors import TemplateError, UnknownTemplate, MissingSlot

log = logging.getLogger('cokb')

SLOT_RE = re.compile(r'\{([A-Za-z_][A-Za-z0-9_]*)\}')


class PromptTemplate(object):
    """A prompt body with named slots.

    Parameters:
        id: template name
        body: text containing `{slot}` markers
        slots: declared slot names; defaults to every marker in the body.
            Markers for undeclared names are left as plain text.
    """

    def __init__(self, id, body, slots=None):
        found = SLOT_RE.findall(body)
        if slots is None:
            slots = []
            for name in found:
                if name not in slots:
                    slots.append(name)
        for slot in slots:
            count = found.count(slot)
            if count != 1:
                raise TemplateError(
                    "slot '%s' occurs %d times in template '%s'"
                    % (slot, count, id))
        self.id = id
        self.body = body
        self.slots = tuple(slots)

    def segments(self):
        """Split the body into ('text', str) and ('slot', name) pieces."""
        pieces = []
        last = 0
        for match in SLOT_RE.finditer(self.body):
            if match.group(1) not in self.slots:
                continue
            if match.start() > last:
                pieces.append(('text', self.body[last:match.start()]))
            pieces.append(('slot', match.group(1)))
            last = match.end()
        if last < len(self.body):
            pieces.append(('text', self.body[last:]))
        return pieces

    def render(self, slot_values):
        for slot in self.slots:
            if slot not in slot_values:
                raise MissingSlot(slot)
        out = []
        for kind, value in self.segments():
            if kind == 'slot':
                out.append(slot_values[value])
            else:
                out.append(value)
        return ''.join(out)

    def __repr__(self):
        return 'PromptTemplate(%r, slots=%r)' % (self.id, self.slots)


class TemplateRegistry(object):
    """Templates by id, loaded lazily from `cokb/llm/templates/<id>.txt`."""

    def __init__(self, templates=None, package='cokb.llm',
                 directory='templates'):
        self.templates = dict(templates or {})
        self.package = package
        self.directory = directory

    def _load(self, template_id):
        resource = resources.files(self.package).joinpath(
            self.directory, template_id + '.txt')
        if not resource.is_file():
            raise UnknownTemplate("no template named '%s'" % template_id)
        body = resource.read_text(encoding='utf8')
        if body.endswith('\n'):
            body = body[:-1]
        return PromptTemplate(template_id, body)

    def get(self, template_id):
        if template_id not in self.templates:
            self.templates[template_id] = self._load(template_id)
        return self.templates[template_id]

    def add(self, template):
        self.templates[template.id] = template

    def ids(self):
        names = set(self.templates)
        folder = resources.files(self.package).joinpath(self.directory)
        for entry in folder.iterdir():
            if entry.name.endswith('.txt'):
                names.add(entry.name[:-len('.txt')])
        return sorted(names)


DEFAULT_REGISTRY = TemplateRegistry()


def get_template(template_id, registry=None):
    return (registry or DEFAULT_REGISTRY).get(template_id)


def render_prompt(template_id, slot_values, registry=None):
    """Substitute every slot of a named template verbatim."""
    return get_template(template_id, registry).render(slot_values)
