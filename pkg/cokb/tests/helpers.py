import io
import os
import json
import shutil
import tempfile
import threading
from contextlib import contextmanager

import mock

from cokb.generator import RuleTemplateGenerator
from cokb.kb import FixtureSource
from cokb.llm import (
    Choice,
    CompletionBackend,
    CompletionResponse,
    render_prompt,
)
from cokb.pipeline import Backends

DATA = os.path.join(os.path.dirname(__file__), 'data')
SUITE = os.path.join(DATA, 'suite')

DELTA_QUESTION = (
    "What periodical literature does Delta Air Lines use as a mouthpiece?")
DELTA_CORRECT = (
    "select distinct ?obj where { wd:/Delta Air Lines/ "
    "wdt:/house publication/ ?obj . ?obj wdt:/instance of/ wd:/periodical/ }")
DELTA_INCORRECT = (
    "select distinct ?obj where { Delta Air Lines wdt:/house publication/ "
    "?obj . ?obj wdt:/instance of/ wd:/periodical/ }",
    "select distinct ?obj { wd:/Delta Air Lines/ wdt:/house publication/ "
    "?obj . ?obj wdt:/instance of/ wd:/magazine/ }",
    "select distinct ?obj where { wd:/Delta Airlines/ wdt:/house publication/ "
    "?obj . ?obj wdt:/instance of/ wd:/periodical/ }",
    "select distinct ?obj where { ?obj wdt:/instance of/ wd:/magazine/ . "
    "wd:/Delta Air Lines/ wdt:/house publication/ ?obj . }",
)


def data_path(*parts):
    return os.path.join(DATA, *parts)


def load_json(path):
    with io.open(path, encoding='utf8') as f:
        return json.load(f)


class ScriptedBackend(CompletionBackend):
    """Answers by question from a script, standing in for an LLM.

    Script entries: `paths` (sampled texts), `rationale` (greedy CoT),
    optional `standard`, and for guided prompts `grounded` when the prompt
    contains `fact_hint`, else `ungrounded` (default: the rationale).
    """

    def __init__(self, script):
        self.script = script
        self.calls = []
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path):
        return cls(load_json(path))

    def question_of(self, prompt):
        for line in reversed(prompt.rstrip().split('\n')):
            if line.startswith('Q: '):
                return 'question', line[len('Q: '):]
            if line.startswith('Claim: '):
                return 'claim', line[len('Claim: '):]
        raise AssertionError("no question in prompt %r" % prompt[-80:])

    def text_for(self, request):
        slot, question = self.question_of(request.prompt)
        entry = self.script[question]
        suffix = 'multihop' if slot == 'question' else 'verification'
        if request.n > 1:
            paths = entry['paths']
            return [paths[i % len(paths)] for i in range(request.n)]
        prompt = request.prompt
        if prompt == render_prompt('cot_' + suffix, {slot: question}):
            return [entry['rationale']]
        if prompt == render_prompt('standard_' + suffix, {slot: question}):
            return [entry.get('standard', entry['rationale'])]
        hint = entry.get('fact_hint')
        if hint and hint in prompt:
            return [entry['grounded']]
        return [entry.get('ungrounded', entry['rationale'])]

    def complete(self, request):
        with self._lock:
            self.calls.append(request)
        texts = self.text_for(request)
        return CompletionResponse(tuple(Choice(text) for text in texts))


class CountingSource(object):
    """Wraps a knowledge source and counts calls per method."""

    def __init__(self, inner):
        self.inner = inner
        self.counts = {'search': 0, 'execute': 0, 'labels': 0}
        self._lock = threading.Lock()

    def _count(self, name):
        with self._lock:
            self.counts[name] += 1

    @property
    def total(self):
        return sum(self.counts.values())

    def search(self, *args, **kwargs):
        self._count('search')
        return self.inner.search(*args, **kwargs)

    def execute(self, *args, **kwargs):
        self._count('execute')
        return self.inner.execute(*args, **kwargs)

    def labels(self, *args, **kwargs):
        self._count('labels')
        return self.inner.labels(*args, **kwargs)


@contextmanager
def no_network():
    """Fail the test if anything opens a socket."""
    def refuse(*args, **kwargs):
        raise AssertionError("network access attempted")
    with mock.patch('socket.socket', side_effect=refuse), \
            mock.patch('socket.create_connection', side_effect=refuse):
        yield


class TempDirMixin(object):

    def make_tempdir(self):
        path = tempfile.mkdtemp(prefix='cokb-test-')
        self.addCleanup(shutil.rmtree, path, True)
        return path


def suite_questions():
    with io.open(os.path.join(SUITE, 'hotpot.jsonl'), encoding='utf8') as f:
        return [json.loads(line) for line in f if line.strip()]


def suite_backends(llm=None, script=None):
    """Scripted LLM, counted fixture KB and the suite's pattern table."""
    if llm is None:
        llm = ScriptedBackend(script or load_json(
            os.path.join(SUITE, 'script.json')))
    return Backends(
        llm=llm,
        kb=CountingSource(FixtureSource.load(os.path.join(SUITE, 'kb.json'))),
        generator=RuleTemplateGenerator.load(
            os.path.join(SUITE, 'patterns.json')))
