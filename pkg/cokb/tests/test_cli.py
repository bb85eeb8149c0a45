import os
import io
import json
from unittest import TestCase

import click
import mock

from cokb.cli import cli
from cokb.config import CokConfig
from cokb.contrastive import read_jsonl
from cokb.evaluation import load_dataset, run_eval
from cokb.llm import RecordingBackend
from cokb.pipeline import run_cok

from cokb.tests.helpers import (
    DELTA_CORRECT,
    DELTA_INCORRECT,
    DELTA_QUESTION,
    SUITE,
    ScriptedBackend,
    TempDirMixin,
    data_path,
    no_network,
    suite_backends,
)

CORRECTED = "In what year was the painter Marek Dunmore born?"
SUITE_FLAGS = [
    '--fixtures', os.path.join(SUITE, 'kb.json'),
    '--patterns', os.path.join(SUITE, 'patterns.json'),
]


def invoke(argv):
    """Returns (exit code, stdout lines, stderr lines)."""
    with mock.patch.object(click, 'echo') as echo:
        code = cli(argv)
    out, err = [], []
    for args, kwargs in echo.call_args_list:
        (err if kwargs.get('err') else out).append(args[0])
    return code, out, err


def recording(path):
    scripted = ScriptedBackend.load(os.path.join(SUITE, 'script.json'))
    return suite_backends(RecordingBackend(path, scripted))


class CorruptCommandTestCase(TestCase):

    def test_strip_entity(self):
        code, out, _ = invoke(['corrupt', DELTA_CORRECT, '--op',
                               'strip-entity'])
        self.assertEqual(code, 0)
        self.assertEqual(out, [DELTA_INCORRECT[0]])

    def test_misspell_uses_default_lexicon(self):
        code, out, _ = invoke(['corrupt', DELTA_CORRECT, '--op', 'misspell'])
        self.assertEqual(code, 0)
        self.assertEqual(out, [DELTA_INCORRECT[2]])

    def test_wrong_format_operator(self):
        code, _, err = invoke(['corrupt', DELTA_CORRECT, '--op',
                               'hole-swap'])
        self.assertEqual(code, 2)
        self.assertTrue(err[0].startswith('error:'))

    def test_usage_errors(self):
        self.assertEqual(invoke(['frobnicate'])[0], 1)
        self.assertEqual(invoke(['corrupt', DELTA_CORRECT])[0], 1)
        self.assertEqual(invoke(['corrupt', DELTA_CORRECT, '--op', 'x'])[0],
                         1)

    def test_timings(self):
        code, _, err = invoke(['--timings', 'corrupt', DELTA_CORRECT,
                               '--op', 'strip-entity'])
        self.assertEqual(code, 0)
        self.assertIn('histogram', err[-1])


class BuildDatasetCommandTestCase(TestCase, TempDirMixin):

    def test_records(self):
        tmp = self.make_tempdir()
        corpus = os.path.join(tmp, 'corpus.jsonl')
        out = os.path.join(tmp, 'train.jsonl')
        with io.open(corpus, 'w', encoding='utf8') as f:
            f.write(json.dumps({'question': DELTA_QUESTION,
                                'query': DELTA_CORRECT}) + '\n')
            f.write(json.dumps({'question': 'broken?',
                                'query': 'select'}) + '\n')
        with self.assertLogs('cokb', 'WARNING'):
            code, lines, _ = invoke(['build-dataset', corpus, '--out', out])
        self.assertEqual(code, 0)
        self.assertEqual(lines, ['1 records written to %s (1 skipped)' % out])
        record, = read_jsonl(out)
        self.assertEqual(record.incorrect, DELTA_INCORRECT)

    def test_malformed_lines_are_skipped(self):
        tmp = self.make_tempdir()
        corpus = os.path.join(tmp, 'corpus.jsonl')
        out = os.path.join(tmp, 'train.jsonl')
        with io.open(corpus, 'w', encoding='utf8') as f:
            f.write(json.dumps({'question': DELTA_QUESTION,
                                'query': DELTA_CORRECT}) + '\n')
            f.write('{not json\n')
            f.write(json.dumps({'question': 'no query here'}) + '\n')
            f.write('[1, 2]\n')
        with self.assertLogs('cokb', 'WARNING') as logs:
            code, lines, _ = invoke(['build-dataset', corpus, '--out', out])
        self.assertEqual(code, 0)
        self.assertEqual(lines, ['1 records written to %s (3 skipped)' % out])
        self.assertEqual(
            sum('skipped' in line for line in logs.output), 3)
        self.assertEqual(len(list(read_jsonl(out))), 1)


class QueryCommandTestCase(TestCase):

    def test_execute_triplet(self):
        code, out, _ = invoke(['query', '(Barack Obama, spouse, ?)',
                               '--execute',
                               '--fixtures', data_path('kb.json')])
        self.assertEqual(code, 0)
        self.assertEqual(out, [
            '(Barack Obama, spouse, ?)',
            '{"bindings": {"Barack Obama": "Q76", "spouse": "P26"}}',
            'Barack Obama spouse Michelle Obama.'])

    def test_reports_issues(self):
        code, out, _ = invoke(['query', DELTA_INCORRECT[0]])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out[1])['code'], 'BareEntity')

    def test_unparseable(self):
        code, _, err = invoke(['query', 'select where nothing'])
        self.assertEqual(code, 2)
        self.assertTrue(err[0].startswith('error:'))

    def test_link(self):
        code, out, _ = invoke(['link', 'Obama', '--fixtures',
                               data_path('kb.json')])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out[0])['id'], 'Q76')


class RunCommandTestCase(TestCase, TempDirMixin):

    def setUp(self):
        self.tmp = self.make_tempdir()
        self.fixture = os.path.join(self.tmp, 'completions.jsonl')
        run_cok(CORRECTED, CokConfig(), recording(self.fixture))

    def test_replay(self):
        trace = os.path.join(self.tmp, 'trace.json')
        with no_network():
            code, out, _ = invoke(['run', CORRECTED, '--replay', self.fixture,
                                   '--out', trace] + SUITE_FLAGS)
        self.assertEqual(code, 0)
        self.assertEqual(out, ['1963', 'trace: %s' % trace])
        with io.open(trace, encoding='utf8') as f:
            data = json.load(f)
        self.assertEqual(data['stages'][-1],
                         {'stage': 'answer', 'data': '1963'})

    def test_settings_file(self):
        settings = os.path.join(self.tmp, 'cokb.toml')
        with io.open(settings, 'w', encoding='utf8') as f:
            f.write(u'[llm]\nreplay = %s\n[kb]\nfixture = %s\n'
                    u'[generator]\npatterns = %s\n' % (
                        json.dumps(self.fixture),
                        json.dumps(os.path.join(SUITE, 'kb.json')),
                        json.dumps(os.path.join(SUITE, 'patterns.json'))))
        with no_network():
            code, out, _ = invoke(['--config', settings, 'run', CORRECTED])
        self.assertEqual((code, out), (0, ['1963']))

    def test_unrecorded_question(self):
        with no_network():
            code, _, err = invoke([
                'run', "In what year was the painter Thea Mardell born?",
                '--replay', self.fixture] + SUITE_FLAGS)
        self.assertEqual(code, 2)
        self.assertIn('no recorded response', err[0])


class EvalCommandTestCase(TestCase, TempDirMixin):

    def test_replayed_suite(self):
        tmp = self.make_tempdir()
        fixture = os.path.join(tmp, 'completions.jsonl')
        dataset = os.path.join(SUITE, 'hotpot.jsonl')
        run_eval(load_dataset(dataset), 'cok', CokConfig(),
                 recording(fixture))
        report_path = os.path.join(tmp, 'report.json')
        with no_network():
            code, out, _ = invoke([
                'eval', '--dataset', dataset, '--method', 'cok',
                '--replay', fixture, '--out', report_path] + SUITE_FLAGS)
        self.assertEqual(code, 0)
        with io.open(report_path, encoding='utf8') as f:
            report = json.load(f)
        self.assertEqual(report['value'], 0.6)
        self.assertEqual(len(report['per_example']), 20)
        self.assertTrue(os.path.exists(report_path + '.predictions.jsonl'))
        self.assertIn('60.0%', out[0])

    def test_needs_dataset(self):
        self.assertEqual(invoke(['eval', '--method', 'cok'])[0], 1)
