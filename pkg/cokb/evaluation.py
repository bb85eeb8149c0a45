"""Datasets, metrics, batch evaluation and report tables."""
from __future__ import absolute_import

import io
import json
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from tqdm import tqdm

from cokb.errors import CokError
from cokb.gate import (
    LABELS,
    MULTIHOP,
    VERIFICATION,
    extract_answer,
    normalize,
    sample_paths,
    tally_votes,
)
from cokb.llm import CompletionRequest, render_prompt
from cokb.pipeline import run_cok

log = logging.getLogger('cokb')

FEVER = 'fever'
HOTPOT = 'hotpot'
KINDS = (FEVER, HOTPOT)

EM = 'EM'
ACCURACY = 'Accuracy'

METHODS = ('standard', 'cot', 'cot-sc', 'cok')
METHOD_NAMES = {
    'standard': 'Standard',
    'cot': 'CoT',
    'cot-sc': 'CoT-SC',
    'cok': 'CoK',
}


class EvaluationError(CokError):
    pass


class SchemaError(EvaluationError):

    def __init__(self, line, message):
        super(SchemaError, self).__init__("line %d: %s" % (line, message))
        self.line = line


class MissingPrediction(EvaluationError):

    def __init__(self, id):
        super(MissingPrediction, self).__init__(
            "no prediction for example %s" % id)
        self.id = id


@dataclass(frozen=True)
class FeverExample(object):
    id: str
    claim: str
    label: str

    kind = FEVER
    mode = VERIFICATION

    @property
    def text(self):
        return self.claim

    @property
    def gold(self):
        return self.label


@dataclass(frozen=True)
class HotpotExample(object):
    id: str
    question: str
    answer: str

    kind = HOTPOT
    mode = MULTIHOP

    @property
    def text(self):
        return self.question

    @property
    def gold(self):
        return self.answer


def _field(data, name, line):
    value = data.get(name)
    if not isinstance(value, str):
        raise SchemaError(line, "'%s' must be a string" % name)
    return value


def _example(data, kind, line):
    if not isinstance(data, dict):
        raise SchemaError(line, "expected a JSON object")
    if kind is None:
        kind = FEVER if 'claim' in data else HOTPOT
    raw_id = data.get('id')
    if isinstance(raw_id, bool) or not isinstance(raw_id, (str, int)):
        raise SchemaError(line, "'id' must be a string or integer")
    example_id = str(raw_id)
    if kind == FEVER:
        label = _field(data, 'label', line)
        if label not in LABELS:
            raise SchemaError(line, "label %r is not one of %s"
                              % (label, ', '.join(LABELS)))
        return FeverExample(example_id, _field(data, 'claim', line), label)
    answer = _field(data, 'answer', line)
    if not answer.strip():
        raise SchemaError(line, "'answer' is empty")
    return HotpotExample(example_id, _field(data, 'question', line), answer)


def load_dataset(path, kind=None):
    """Read a JSONL dataset; `kind` is guessed per line when not given."""
    if kind is not None and kind not in KINDS:
        raise EvaluationError("unknown dataset kind %r" % (kind,))
    examples = []
    seen = set()
    with io.open(path, encoding='utf8') as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except ValueError as e:
                raise SchemaError(line_no, "invalid JSON: %s" % e)
            example = _example(data, kind, line_no)
            if example.id in seen:
                raise SchemaError(line_no, "duplicate id %s" % example.id)
            seen.add(example.id)
            examples.append(example)
    return examples


def exact_match(prediction, gold):
    return int(normalize(prediction or '') == normalize(gold or ''))


def label_match(prediction, gold):
    return int(' '.join((prediction or '').upper().split()) == gold)


METRICS = {EM: exact_match, ACCURACY: label_match}


def metric_for(examples):
    if examples and all(e.kind == FEVER for e in examples):
        return ACCURACY
    return EM


@dataclass(frozen=True)
class ExampleResult(object):
    id: str
    prediction: str
    gold: str
    correct: int

    def to_json(self):
        return {'id': self.id, 'prediction': self.prediction,
                'gold': self.gold, 'correct': self.correct}


@dataclass(frozen=True)
class EvalReport(object):
    method: str
    metric_name: str
    value: float
    per_example: tuple
    baseline_method: str = None
    delta: float = None

    @property
    def n(self):
        return len(self.per_example)

    def recomputed(self):
        return math.fsum(r.correct for r in self.per_example) / self.n

    def to_json(self):
        return {
            'method': self.method,
            'metric_name': self.metric_name,
            'value': self.value,
            'baseline_method': self.baseline_method,
            'delta': self.delta,
            'per_example': [r.to_json() for r in self.per_example],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            method=data['method'],
            metric_name=data['metric_name'],
            value=data['value'],
            per_example=tuple(ExampleResult(**r) for r in data['per_example']),
            baseline_method=data.get('baseline_method'),
            delta=data.get('delta'),
        )

    def dumps(self):
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True,
                          indent=2)


def score(examples, predictions, metric=EM, method='', baseline=None):
    """Score predictions (id -> text) against gold answers."""
    if not examples:
        raise EvaluationError("cannot score an empty dataset")
    if metric not in METRICS:
        raise EvaluationError("unknown metric %r" % (metric,))
    if baseline is not None and baseline.metric_name != metric:
        raise EvaluationError("baseline %s uses %s, not %s" % (
            baseline.method, baseline.metric_name, metric))
    judge = METRICS[metric]
    results = []
    for example in examples:
        if example.id not in predictions:
            raise MissingPrediction(example.id)
        prediction = predictions[example.id]
        results.append(ExampleResult(
            example.id, prediction, example.gold,
            judge(prediction, example.gold)))
    value = math.fsum(r.correct for r in results) / len(results)
    report = EvalReport(method, metric, value, tuple(results))
    if baseline is not None:
        report = EvalReport(method, metric, value, tuple(results),
                            baseline.method, value - baseline.value)
    return report


def read_predictions(path):
    predictions = {}
    with io.open(path, encoding='utf8') as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                predictions[str(data['id'])] = data['prediction']
            except (ValueError, KeyError, TypeError) as e:
                raise SchemaError(line_no, "bad prediction line: %s" % e)
    return predictions


def write_predictions(path, pairs):
    with io.open(path, 'w', encoding='utf8') as f:
        for example_id, prediction in pairs:
            f.write(json.dumps({'id': example_id, 'prediction': prediction},
                               ensure_ascii=False) + '\n')


def _greedy(backend, template, example, cfg):
    slot = 'claim' if example.mode == VERIFICATION else 'question'
    prompt = render_prompt(template, {slot: example.text})
    response = backend.complete(CompletionRequest(
        prompt=prompt, temperature=cfg.answer_temperature))
    answer = extract_answer(response.texts[0], example.mode)
    return answer or ''


def predict(example, method, cfg, backends):
    """One prediction with the given method."""
    suffix = 'verification' if example.mode == VERIFICATION else 'multihop'
    if method == 'standard':
        return _greedy(backends.llm, 'standard_' + suffix, example, cfg)
    if method == 'cot':
        return _greedy(backends.llm, 'cot_' + suffix, example, cfg)
    if method == 'cot-sc':
        paths = sample_paths(backends.llm, example.text, example.mode,
                             cfg.n_paths, cfg.sample_temperature)
        return tally_votes([path.answer for path in paths]).best_answer
    if method == 'cok':
        return run_cok(example.text, cfg.replace(mode=example.mode),
                       backends).answer
    raise EvaluationError("unknown method %r" % (method,))


def run_eval(examples, method, cfg, backends, predictions_path=None,
             baseline=None, progress=False):
    """Predict every example on a worker pool, save predictions, score.

    On a failure the predictions finished so far are still written before
    the error propagates.
    """
    if method not in METHODS:
        raise EvaluationError("unknown method %r" % (method,))
    if not examples:
        raise EvaluationError("cannot evaluate an empty dataset")
    done = []
    executor = ThreadPoolExecutor(max_workers=cfg.workers)
    try:
        futures = [executor.submit(predict, example, method, cfg, backends)
                   for example in examples]
        for example, future in tqdm(zip(examples, futures),
                                    total=len(examples), desc=method,
                                    disable=not progress):
            done.append((example.id, future.result()))
    except BaseException:
        executor.shutdown(wait=True, cancel_futures=True)
        if predictions_path is not None:
            write_predictions(predictions_path, done)
            log.warning("wrote %d partial predictions to %s",
                        len(done), predictions_path)
        raise
    executor.shutdown(wait=True)
    if predictions_path is not None:
        write_predictions(predictions_path, done)
    return score(examples, dict(done), metric_for(examples), method, baseline)


def render_table(reports, title=None):
    """Plain-text table: method, metric value and delta vs. baseline."""
    if not reports:
        return ''
    metric = reports[0].metric_name
    rows = []
    for report in reports:
        name = METHOD_NAMES.get(report.method, report.method)
        delta = ''
        if report.delta is not None:
            delta = '%+.1f%%' % (report.delta * 100)
        rows.append((name, '%.1f%%' % (report.value * 100), delta))
    header = ('Method', metric, 'Δ')
    widths = [max(len(row[i]) for row in rows + [header]) for i in range(3)]
    fmt = '{:%d} | {:>%d} | {:>%d}' % tuple(widths)
    lines = []
    if title:
        lines.append(title)
    lines.append(fmt.format(*header))
    lines.append('-+-'.join('-' * w for w in widths))
    for row in rows:
        lines.append(fmt.format(*row).rstrip())
    return '\n'.join(lines)
