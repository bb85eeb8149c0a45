"""Contrastive training records: one correct query and four wrong ones."""
from __future__ import absolute_import

import io
import json
import logging
from dataclasses import dataclass

from cokb.contrastive.corrupt import corrupt, ops_for
from cokb.contrastive.errors import (
    InapplicableOp,
    CannotCorrupt,
    InvalidCorrectQuery,
)
from cokb.contrastive.lexicon import Lexicon
from cokb.query import (
    Format,
    SparqlQuery,
    detect_format,
    parse_query,
    validate,
)

log = logging.getLogger('cokb')

NUM_NEGATIVES = 4
# how far past the base seed substitutes are searched
SUBSTITUTE_SEEDS = 8

INSTRUCTIONS = {
    Format.SPARQL: (
        "Generate a correct SPARQL query that returns the answer of the "
        "following question. Generate four incorrect SPARQL queries of "
        "different types."
    ),
    Format.TRIPLETS: (
        "Generate a correct KB triplet query that retrieves the answer of "
        "the following question. Generate four incorrect triplet queries of "
        "different types."
    ),
}


@dataclass(frozen=True)
class ContrastiveRecord(object):
    instruction: str
    input_question: str
    correct: str
    incorrect: tuple
    format: Format

    def __post_init__(self):
        if len(self.incorrect) != NUM_NEGATIVES:
            raise ValueError("a record needs exactly %d incorrect queries"
                             % NUM_NEGATIVES)
        texts = (self.correct,) + tuple(self.incorrect)
        if len(set(texts)) != len(texts):
            raise ValueError("record queries must be pairwise distinct")

    def to_json(self):
        return {
            'instruction': self.instruction,
            'input': self.input_question,
            'correct': self.correct,
            'incorrect': list(self.incorrect),
            'format': self.format.value,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            instruction=data['instruction'],
            input_question=data['input'],
            correct=data['correct'],
            incorrect=tuple(data['incorrect']),
            format=Format(data['format']),
        )


def _check_correct(correct, format):
    query = parse_query(correct, format)
    if isinstance(query, SparqlQuery):
        issues = validate(query)
        if issues:
            raise InvalidCorrectQuery(
                "correct query has issues: %s"
                % ', '.join(issue.code.value for issue in issues))


def build_record(question, correct, seed=0, lexicon=None):
    """Corrupt `correct` once per format operator into a record.

    An operator that cannot act (or only repeats an earlier text) is retried
    with the next seed; failing that, its slot is filled by another
    operator applied with a later seed.
    """
    if lexicon is None:
        lexicon = Lexicon()
    format = detect_format(correct)
    _check_correct(correct, format)
    ops = ops_for(format)

    negatives = []

    def attempt(op, op_seed):
        try:
            text = corrupt(correct, op, op_seed, lexicon)
        except InapplicableOp:
            return None
        if text == correct or text in negatives:
            return None
        return text

    for op in ops:
        text = attempt(op, seed) or attempt(op, seed + 1)
        if text is None:
            log.debug("%s inapplicable to %r, substituting", op.value, correct)
            text = _substitute(ops, seed, attempt)
        if text is None:
            raise CannotCorrupt(
                "only %d distinct negatives for %r"
                % (len(negatives), correct))
        negatives.append(text)

    return ContrastiveRecord(
        instruction=INSTRUCTIONS[format],
        input_question=question,
        correct=correct,
        incorrect=tuple(negatives),
        format=format,
    )


def _substitute(ops, seed, attempt):
    for offset in range(1, SUBSTITUTE_SEEDS + 1):
        for op in ops:
            text = attempt(op, seed + offset)
            if text is not None:
                return text
    return None


def export_jsonl(records, path):
    """Stream records to `path`, one JSON object per line.

    `records` may be any iterable; nothing is held beyond the current record.
    """
    count = 0
    with io.open(path, 'w', encoding='utf8') as f:
        for record in records:
            f.write(json.dumps(record.to_json(), ensure_ascii=False))
            f.write('\n')
            count += 1
    return count


def read_jsonl(path):
    with io.open(path, encoding='utf8') as f:
        for line in f:
            line = line.strip()
            if line:
                yield ContrastiveRecord.from_json(json.loads(line))
