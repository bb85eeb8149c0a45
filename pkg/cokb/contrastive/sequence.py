"""Training sequences and the query-masked log-likelihood.

The loss counts a token only when it lies inside one of the five query
regions (the correct query and all four wrong ones); instruction and
question tokens are context.
"""
from __future__ import absolute_import

import math
from dataclasses import dataclass

from cokb.contrastive.errors import (
    TemplateSlotMissing,
    LengthMismatch,
    PositiveLogprob,
)
from cokb.llm.prompts import get_template

QUERY_SLOTS = ('correct', 'incorrect_1', 'incorrect_2', 'incorrect_3',
               'incorrect_4')
REQUIRED_SLOTS = ('input',) + QUERY_SLOTS
DEFAULT_TEMPLATE = 'contrastive'


def whitespace_tokenizer(text):
    return text.split()


@dataclass(frozen=True)
class QuerySpan(object):
    """A query region: characters [start, end) and the tokens
    [token_start, token_end)."""
    label: str
    start: int
    end: int
    token_start: int
    token_end: int


@dataclass(frozen=True)
class TokenizedSequence(object):
    text: str
    tokens: tuple
    mask: tuple
    boundaries: tuple

    def span_text(self, span):
        return self.text[span.start:span.end]


def _slot_values(record):
    values = {
        'instruction': record.instruction,
        'input': record.input_question,
        'correct': record.correct,
    }
    for i, text in enumerate(record.incorrect):
        values['incorrect_%d' % (i + 1)] = text
    return values


def assemble_sequence(record, template=None, tokenizer=None):
    """Render a record into one token sequence with a query mask.

    Each template piece is tokenized on its own, so token boundaries never
    straddle a query region.
    """
    if template is None:
        template = get_template(DEFAULT_TEMPLATE)
    if tokenizer is None:
        tokenizer = whitespace_tokenizer
    missing = [slot for slot in REQUIRED_SLOTS if slot not in template.slots]
    if missing:
        raise TemplateSlotMissing(missing)

    values = _slot_values(record)
    text = []
    offset = 0
    tokens = []
    mask = []
    boundaries = []
    for kind, value in template.segments():
        piece = values[value] if kind == 'slot' else value
        piece_tokens = list(tokenizer(piece))
        is_query = kind == 'slot' and value in QUERY_SLOTS
        if is_query:
            boundaries.append(QuerySpan(
                label=value,
                start=offset,
                end=offset + len(piece),
                token_start=len(tokens),
                token_end=len(tokens) + len(piece_tokens),
            ))
        tokens.extend(piece_tokens)
        mask.extend([1 if is_query else 0] * len(piece_tokens))
        text.append(piece)
        offset += len(piece)

    return TokenizedSequence(
        text=''.join(text),
        tokens=tuple(tokens),
        mask=tuple(mask),
        boundaries=tuple(boundaries),
    )


def masked_log_likelihood(sequence, logprobs):
    """Sum of per-token log-probabilities over query tokens only."""
    if len(logprobs) != len(sequence.tokens):
        raise LengthMismatch(
            "%d logprobs for %d tokens"
            % (len(logprobs), len(sequence.tokens)))
    for i, value in enumerate(logprobs):
        if math.isnan(value) or value > 0:
            raise PositiveLogprob(
                "logprob %r at token %d is not a log-probability" % (value, i))
    return math.fsum(m * lp for m, lp in zip(sequence.mask, logprobs))
