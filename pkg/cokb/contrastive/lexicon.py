"""Substitution tables driving the corruption rules."""
from __future__ import absolute_import

import json
import logging
from importlib import resources

log = logging.getLogger('cokb')


class Lexicon(object):
    """Sibling labels for semantic swaps and surface misspellings.

    Parameters:
        siblings: label -> list of semantically close labels
        misspellings: label -> list of surface variants
        batch_labels: other labels of the current batch, used when a label
            has no sibling entry
    """

    def __init__(self, siblings=None, misspellings=None, batch_labels=()):
        self.siblings = dict(siblings or {})
        self.misspellings = dict(misspellings or {})
        self.batch_labels = list(batch_labels)

    @classmethod
    def from_json(cls, data):
        if 'siblings' in data or 'misspellings' in data:
            return cls(data.get('siblings'), data.get('misspellings'),
                       data.get('batch_labels', ()))
        # a flat map is a siblings table
        return cls(siblings=data)

    @classmethod
    def load(cls, path):
        with open(path, encoding='utf8') as f:
            return cls.from_json(json.load(f))

    @classmethod
    def default(cls):
        text = resources.files('cokb').joinpath(
            'data', 'lexicon.json').read_text(encoding='utf8')
        return cls.from_json(json.loads(text))

    def with_batch(self, labels):
        return Lexicon(self.siblings, self.misspellings, labels)

    def has_siblings(self, label):
        return any(s != label for s in self.siblings.get(label, ()))

    def sibling(self, label, seed, exclude=()):
        """Seed-chosen replacement for `label`, or None."""
        choices = [s for s in self.siblings.get(label, ()) if s != label]
        if not choices:
            choices = [
                other for other in self.batch_labels
                if other != label and other not in exclude]
        if not choices:
            return None
        return choices[seed % len(choices)]

    def misspell(self, label, seed):
        """A surface variant of `label`, or None if none can be made.

        Table entries win; otherwise one internal space, else one internal
        character, is deleted.
        """
        rules = [m for m in self.misspellings.get(label, ()) if m != label]
        if rules:
            return rules[seed % len(rules)]
        spaces = [i for i, c in enumerate(label)
                  if c == ' ' and 0 < i < len(label) - 1]
        if spaces:
            i = spaces[seed % len(spaces)]
            return label[:i] + label[i + 1:]
        if len(label) >= 3:
            i = 1 + seed % (len(label) - 2)
            return label[:i] + label[i + 1:]
        return None
