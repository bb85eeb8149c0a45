import os
import json
from unittest import TestCase

import mock

from cokb.config import CokConfig, ConfigError, Settings
from cokb.errors import ContractError
from cokb.kb import EndpointError, FixtureSource, Transport as KBTransport
from cokb.llm import FixtureMiss, RecordingBackend, ReplayBackend
from cokb.pipeline import (
    Backends,
    PipelineError,
    Trace,
    decompose,
    retrieve_for,
    run_cok,
    split_rationale,
    synthesize,
)
from cokb.query import parse_query

from cokb.tests.helpers import (
    DELTA_CORRECT,
    SUITE,
    CountingSource,
    ScriptedBackend,
    TempDirMixin,
    data_path,
    no_network,
    suite_backends,
    suite_questions,
)

CONSISTENT = "In what year was the painter Alden Marsh born?"
CORRECTED = "In what year was the painter Marek Dunmore born?"
NOT_IN_KB = "In what year was the painter Quentin Ashgrove born?"
NO_QUERY = "In what year was the painter Sefton Carrick born?"

CLAIM = "Marek Dunmore was born in 1962."
CLAIM_SCRIPT = {CLAIM: {
    'paths': ['SUPPORTS', 'REFUTES', 'SUPPORTS', 'REFUTES',
              'NOT ENOUGH INFO'],
    'rationale': 'The painter was born in 1962. SUPPORTS',
    'fact_hint': 'Marek Dunmore date of birth 1963.',
    'grounded': 'He was born in 1963, not 1962. The answer is REFUTES.',
}}

GATED_STAGES = ['sample', 'tally', 'gate', 'decompose', 'queries', 'links',
                'facts', 'synthesize', 'answer']


class LLMFailsAfterSampling(ScriptedBackend):

    def complete(self, request):
        if request.n == 1:
            raise FixtureMiss('0' * 64)
        return super(LLMFailsAfterSampling, self).complete(request)


class SplitRationaleTestCase(TestCase):

    def test_markers(self):
        self.assertEqual(split_rationale(
            "First, A came in third. Second, A was born in 1991. "
            "The answer is 1991."),
            ["A came in third.", "A was born in 1991."])

    def test_single_sentence(self):
        self.assertEqual(split_rationale("A was born in 1991."),
                         ["A was born in 1991."])

    def test_sentences_without_markers(self):
        self.assertEqual(split_rationale(
            "A came third. A was born in 1991. The answer is 1991."),
            ["A came third.", "A was born in 1991."])

    def test_answer_only(self):
        self.assertEqual(split_rationale("The answer is 1991."), [])


class DecomposeTestCase(TestCase):

    def test_rationale_sentences(self):
        backend = ScriptedBackend.load(os.path.join(SUITE, 'script.json'))
        self.assertEqual(decompose(backend, CORRECTED), [
            "Marek Dunmore was a painter.",
            "Marek Dunmore was born in 1962."])
        self.assertEqual(backend.calls[0].temperature, 0.0)

    def test_empty_rationale_falls_back_to_question(self):
        backend = ScriptedBackend({'Q?': {'rationale': 'The answer is x.'}})
        self.assertEqual(decompose(backend, 'Q?'), ['Q?'])

    def test_verification_mode(self):
        with self.assertRaises(ContractError):
            decompose(ScriptedBackend({}), CLAIM, mode='verification')


class RetrieveForTestCase(TestCase):

    def setUp(self):
        self.source = CountingSource(FixtureSource.load(data_path('kb.json')))

    def test_delta_query(self):
        retrieval = retrieve_for(self.source, 'mouthpiece?',
                                 parse_query(DELTA_CORRECT))
        self.assertEqual(
            [fact.verbalization for fact in retrieval.facts],
            ['Delta Air Lines house publication Sky magazine.',
             'Sky magazine instance of periodical.'])
        self.assertEqual(retrieval.bindings, {
            'Delta Air Lines': 'Q188920', 'house publication': 'P2813',
            'instance of': 'P31', 'periodical': 'Q1002697'})
        self.assertEqual(retrieval.warnings, [])

    def test_triplet(self):
        retrieval = retrieve_for(self.source, 'spouse?',
                                 parse_query('(Barack Obama, spouse, ?)'))
        self.assertEqual([fact.verbalization for fact in retrieval.facts],
                         ['Barack Obama spouse Michelle Obama.'])

    def test_unlinkable_mention(self):
        retrieval = retrieve_for(self.source, 'who?',
                                 parse_query('(Nobody Known, spouse, ?)'))
        self.assertEqual(retrieval.facts, [])
        self.assertEqual(len(retrieval.warnings), 2)
        self.assertIn('Nobody Known', retrieval.warnings[0])

    def test_all_variable_query(self):
        retrieval = retrieve_for(self.source, 'everything?',
                                 parse_query("select ?x where { ?x ?p ?y }"))
        self.assertEqual(len(retrieval.facts), 8)
        self.assertEqual(self.source.counts['search'], 0)

    def test_top_k(self):
        query = parse_query('(Delta, house publication, ?)')
        one = retrieve_for(self.source, 'q', query, top_k=1)
        two = retrieve_for(self.source, 'q', query, top_k=2)
        self.assertEqual(one.bindings['Delta'], 'Q188920')
        self.assertEqual(len(one.facts), 2)
        self.assertEqual([f.verbalization for f in two.facts],
                         [f.verbalization for f in one.facts])

    def test_rejected_query(self):
        rejected = EndpointError(400, 'MalformedQueryException')
        with mock.patch.object(self.source.inner, 'execute',
                               side_effect=rejected):
            retrieval = retrieve_for(self.source, 'mouthpiece?',
                                     parse_query(DELTA_CORRECT))
        self.assertEqual(retrieval.facts, [])
        self.assertEqual(retrieval.bindings['Delta Air Lines'], 'Q188920')
        warning, = retrieval.warnings
        self.assertIn('MalformedQueryException', warning)


class SynthesizeTestCase(TestCase):

    def setUp(self):
        self.backend = ScriptedBackend.load(os.path.join(SUITE, 'script.json'))

    def test_grounded_answer(self):
        answer = synthesize(self.backend, CORRECTED,
                            ['Marek Dunmore date of birth 1963.'])
        self.assertEqual(answer, '1963')
        prompt = self.backend.calls[0].prompt
        self.assertIn('Marek Dunmore date of birth 1963.\nQ: ' + CORRECTED,
                      prompt)

    def test_fallback_skips_the_model(self):
        trace = Trace(CORRECTED, 'multihop')
        answer = synthesize(self.backend, CORRECTED, [],
                            fallback_answer='1962', trace=trace)
        self.assertEqual(answer, '1962')
        self.assertEqual(self.backend.calls, [])
        self.assertTrue(trace.get('synthesize')['fallback'])

    def test_unextractable_answer(self):
        backend = ScriptedBackend({'Q?': {'rationale': 'no idea'}})
        self.assertEqual(synthesize(backend, 'Q?', ['fact.'],
                                    fallback_answer='x'), 'x')
        self.assertEqual(synthesize(backend, 'Q?', ['fact.']), '')

    def test_verification_label(self):
        backend = ScriptedBackend(CLAIM_SCRIPT)
        answer = synthesize(backend, CLAIM,
                            ['Marek Dunmore date of birth 1963.'],
                            mode='verification')
        self.assertEqual(answer, 'REFUTES')


class RunCokTestCase(TestCase):

    def test_gate_short_circuit(self):
        backends = suite_backends()
        result = run_cok(CONSISTENT, CokConfig(), backends)
        self.assertEqual(result.answer, '1954')
        self.assertEqual(result.trace.stage_names,
                         ['sample', 'tally', 'gate', 'answer'])
        self.assertFalse(result.trace.get('gate')['retrieve'])
        self.assertEqual(backends.kb.total, 0)
        self.assertEqual(len(backends.llm.calls), 1)

    def test_retrieval_corrects_the_answer(self):
        result = run_cok(CORRECTED, CokConfig(), suite_backends())
        self.assertEqual(result.answer, '1963')
        trace = result.trace
        self.assertEqual(trace.stage_names, GATED_STAGES)
        self.assertEqual(trace.get('gate'), {
            'retrieve': True, 'threshold': 3, 'top_count': 2})
        self.assertEqual(trace.get('facts'),
                         ['Marek Dunmore date of birth 1963.'])
        queries = trace.get('queries')
        self.assertEqual(len(queries), 2)
        self.assertIn('error', queries[0])
        self.assertEqual(
            queries[1]['query'],
            'select ?year where { wd:/Marek Dunmore/ '
            'wdt:/date of birth/ ?year }')

    def test_triplet_format(self):
        cfg = CokConfig(query_format='triplets')
        result = run_cok(CORRECTED, cfg, suite_backends())
        self.assertEqual(result.answer, '1963')
        self.assertEqual(result.trace.get('queries')[1]['query'],
                         '(Marek Dunmore, date of birth, ?)')

    def test_unknown_entity_keeps_cot_answer(self):
        backends = suite_backends()
        result = run_cok(NOT_IN_KB, CokConfig(), backends)
        self.assertEqual(result.answer, '1955')
        self.assertEqual(result.trace.get('facts'), [])
        self.assertTrue(result.trace.warnings)
        self.assertEqual(len(backends.llm.calls), 2)

    def test_abstain(self):
        cfg = CokConfig(retrieval_fallback='abstain')
        result = run_cok(NOT_IN_KB, cfg, suite_backends())
        self.assertEqual(result.answer, '')

    def test_no_generated_query(self):
        result = run_cok(NO_QUERY, CokConfig(), suite_backends())
        self.assertEqual(result.answer, '1946')
        self.assertTrue(all('error' in entry
                            for entry in result.trace.get('queries')))

    def test_fact_cap(self):
        result = run_cok(CORRECTED, CokConfig(max_facts=0), suite_backends())
        self.assertEqual(result.trace.get('facts'), [])
        self.assertEqual(result.answer, '1962')

    def test_verification_skips_decomposition(self):
        cfg = CokConfig(mode='verification')
        result = run_cok(CLAIM, cfg, suite_backends(script=CLAIM_SCRIPT))
        self.assertEqual(result.answer, 'REFUTES')
        self.assertNotIn('decompose', result.trace)
        self.assertEqual(result.trace.get('queries')[0]['sub_question'],
                         CLAIM)

    def test_llm_failure_keeps_partial_trace(self):
        llm = LLMFailsAfterSampling.load(os.path.join(SUITE, 'script.json'))
        with self.assertRaises(PipelineError) as cm:
            run_cok(CORRECTED, CokConfig(), suite_backends(llm))
        self.assertEqual(cm.exception.trace.stage_names,
                         ['sample', 'tally', 'gate'])
        self.assertIsInstance(cm.exception.__cause__, FixtureMiss)

    def test_kb_failure_keeps_partial_trace(self):
        backends = suite_backends()
        backends.kb = mock.Mock()
        backends.kb.search.side_effect = KBTransport('down')
        with self.assertRaises(PipelineError) as cm:
            run_cok(CORRECTED, CokConfig(), backends)
        self.assertEqual(cm.exception.trace.stage_names[-1], 'queries')

    def test_rejected_query_still_synthesizes(self):
        backends = suite_backends()
        rejected = EndpointError(400, 'MalformedQueryException')
        with mock.patch.object(backends.kb.inner, 'execute',
                               side_effect=rejected):
            result = run_cok(CORRECTED, CokConfig(), backends)
        self.assertEqual(result.trace.stage_names, GATED_STAGES)
        self.assertEqual(result.trace.get('facts'), [])
        self.assertEqual(result.answer, '1962')
        self.assertTrue(any('rejected' in warning
                            for warning in result.trace.warnings))

    def test_flagged_generated_query_is_not_executed(self):
        backends = suite_backends()
        backends.generator = mock.Mock()
        backends.generator.generate.return_value = (
            "select ?year where { Marek Dunmore wdt:/date of birth/ ?year }")
        result = run_cok(CORRECTED, CokConfig(), backends)
        self.assertEqual(backends.kb.counts['execute'], 0)
        self.assertEqual(result.answer, '1962')
        for entry in result.trace.get('queries'):
            self.assertTrue(entry['skipped'])
            self.assertEqual(entry['issues'][0]['code'], 'BareEntity')

    def test_suite_is_deterministic(self):
        first = [run_cok(q['question'], CokConfig(), suite_backends())
                 for q in suite_questions()]
        second = [run_cok(q['question'], CokConfig(), suite_backends())
                  for q in suite_questions()]
        self.assertEqual([r.answer for r in first],
                         [r.answer for r in second])
        self.assertEqual([r.trace.dumps() for r in first],
                         [r.trace.dumps() for r in second])

    def test_suite_answers(self):
        examples = suite_questions()
        answers = [run_cok(q['question'], CokConfig(), suite_backends()).answer
                   for q in examples]
        correct = [a == q['answer'] for a, q in zip(answers, examples)]
        self.assertEqual(sum(correct), 12)
        self.assertTrue(all(correct[12:16]))
        self.assertFalse(any(correct[16:]))


class RecordReplayRunTestCase(TestCase, TempDirMixin):

    def test_replayed_suite_matches_recording(self):
        path = os.path.join(self.make_tempdir(), 'suite.jsonl')
        scripted = ScriptedBackend.load(os.path.join(SUITE, 'script.json'))
        recorder = RecordingBackend(path, scripted)
        recorded = [run_cok(q['question'], CokConfig(),
                            suite_backends(recorder))
                    for q in suite_questions()]
        with no_network():
            replay = ReplayBackend(path)
            replayed = [run_cok(q['question'], CokConfig(),
                                suite_backends(replay))
                        for q in suite_questions()]
        self.assertEqual([r.trace.dumps() for r in replayed],
                         [r.trace.dumps() for r in recorded])


class TraceTestCase(TestCase):

    def test_stage_once(self):
        trace = Trace('q', 'multihop')
        trace.record('sample', [])
        with self.assertRaises(ContractError):
            trace.record('sample', [])

    def test_json(self):
        trace = Trace('q', 'multihop')
        trace.record('gate', {'retrieve': False})
        with self.assertLogs('cokb', 'WARNING'):
            trace.warn('careful')
        self.assertEqual(json.loads(trace.dumps()), {
            'question': 'q', 'mode': 'multihop',
            'stages': [{'stage': 'gate', 'data': {'retrieve': False}}],
            'warnings': ['careful']})


class BackendsFromSettingsTestCase(TestCase, TempDirMixin):

    def test_replay_and_fixtures(self):
        path = os.path.join(self.make_tempdir(), 'empty.jsonl')
        open(path, 'w').close()
        settings = Settings(
            replay=path, kb_fixture=data_path('kb.json'),
            generator_patterns=os.path.join(SUITE, 'patterns.json'))
        backends = Backends.from_settings(settings)
        self.assertIsInstance(backends.llm, ReplayBackend)
        self.assertIsInstance(backends.kb, FixtureSource)
        self.assertEqual(len(backends.generator.rules), 1)

    def test_external_generator_needs_url(self):
        path = os.path.join(self.make_tempdir(), 'empty.jsonl')
        open(path, 'w').close()
        settings = Settings(
            pipeline=CokConfig(generator_backend='external-http'),
            replay=path, kb_fixture=data_path('kb.json'))
        with self.assertRaises(ConfigError):
            Backends.from_settings(settings)
