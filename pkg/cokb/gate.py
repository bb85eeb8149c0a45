"""Self-consistency gate: sample reasoning paths, vote, decide on retrieval."""
from __future__ import absolute_import

import re
import string
import logging
from collections import OrderedDict
from dataclasses import dataclass

from cokb import config
from cokb.errors import ContractError
from cokb.llm.backends import CompletionRequest
from cokb.llm.prompts import render_prompt

log = logging.getLogger('cokb')

MULTIHOP = 'multihop'
VERIFICATION = 'verification'

LABELS = ('NOT ENOUGH INFO', 'SUPPORTS', 'REFUTES')
NO_ANSWER = '<no answer>'

ANSWER_RE = re.compile(r'the answer is', re.IGNORECASE)
LABEL_RE = re.compile(
    r'not\s+enough\s+info|supports|refutes', re.IGNORECASE)
ARTICLES_RE = re.compile(r'\b(a|an|the)\b')
SENTENCE_END_RE = re.compile(r'(?<=[.!?])\s+')
PUNCTUATION = set(string.punctuation)

SAMPLE_TEMPLATES = {
    MULTIHOP: 'cot_multihop',
    VERIFICATION: 'standard_verification',
}


class EmptyList(ContractError):
    pass


def normalize(text):
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    text = text.lower()
    text = ''.join(ch for ch in text if ch not in PUNCTUATION)
    text = ARTICLES_RE.sub(' ', text)
    return ' '.join(text.split())


def _multihop_answer(raw_text):
    matches = list(ANSWER_RE.finditer(raw_text))
    if not matches:
        return None
    rest = raw_text[matches[-1].end():].split('\n', 1)[0].strip()
    if rest.endswith('.'):
        rest = rest[:-1]
    answer = normalize(rest)
    return answer or None


def _verification_label(raw_text):
    sentences = [s for s in SENTENCE_END_RE.split(raw_text.strip()) if s]
    if not sentences:
        return None
    found = LABEL_RE.findall(sentences[-1])
    if not found:
        return None
    return ' '.join(found[-1].upper().split())


def extract_answer(raw_text, mode=MULTIHOP):
    if not raw_text:
        return None
    if mode == VERIFICATION:
        return _verification_label(raw_text)
    return _multihop_answer(raw_text)


@dataclass(frozen=True)
class ReasoningPath(object):
    raw_text: str
    answer: str = None

    def to_json(self):
        return {'raw_text': self.raw_text, 'answer': self.answer}


@dataclass(frozen=True)
class VoteTally(object):
    counts: tuple
    n: int
    top: str
    top_count: int

    @property
    def histogram(self):
        return OrderedDict(self.counts)

    @property
    def best_answer(self):
        """The most voted extracted answer, or "" when none was extracted."""
        best, best_count = '', 0
        for answer, count in self.counts:
            if answer != NO_ANSWER and count > best_count:
                best, best_count = answer, count
        return best

    def to_json(self):
        return {
            'counts': [[answer, count] for answer, count in self.counts],
            'n': self.n,
            'top': self.top,
            'top_count': self.top_count,
        }


def tally_votes(answers):
    """Count answers; failed extractions vote for NO_ANSWER.

    `top` is the most frequent answer, ties going to the one seen first.
    """
    if not answers:
        raise EmptyList("cannot tally an empty list of answers")
    counts = OrderedDict()
    for answer in answers:
        key = NO_ANSWER if answer is None else answer
        counts[key] = counts.get(key, 0) + 1
    top, top_count = None, 0
    for answer, count in counts.items():
        if count > top_count:
            top, top_count = answer, count
    return VoteTally(
        counts=tuple(counts.items()),
        n=len(answers),
        top=top,
        top_count=top_count,
    )


def should_retrieve(tally):
    """True unless an extracted answer holds a strict majority of the paths.

    A majority of failed extractions counts as disagreement.
    """
    if tally.n < 1:
        raise ContractError("tally has no paths")
    return tally.top == NO_ANSWER or tally.top_count < tally.n // 2 + 1


def sample_paths(backend, question, mode=MULTIHOP, n=config.N_PATHS,
                 temperature=config.SAMPLE_TEMPERATURE):
    """Sample `n` reasoning paths in one batched request."""
    if n < 1:
        raise ContractError("n must be positive")
    if mode == VERIFICATION:
        slots = {'claim': question}
    else:
        slots = {'question': question}
    prompt = render_prompt(SAMPLE_TEMPLATES[mode], slots)
    request = CompletionRequest(prompt=prompt, temperature=temperature, n=n)
    response = backend.complete(request)
    paths = []
    for text in response.texts:
        answer = extract_answer(text, mode)
        if answer is None:
            log.debug("no answer in sampled path: %r", text[-80:])
        paths.append(ReasoningPath(text, answer))
    return paths
