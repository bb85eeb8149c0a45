"""One grounded run: gate, decompose, query, retrieve, synthesize.

A run first samples several reasoning paths. When a strict majority agrees
the majority answer is returned as is; otherwise the question (or its
rationale sentences) is turned into KB queries whose facts are injected
into a guided prompt.
"""
from __future__ import absolute_import

import re
import json
import logging
import itertools
import dataclasses
from dataclasses import dataclass, field

from cokb import config
from cokb.errors import CokError, ContractError
from cokb.gate import (
    MULTIHOP,
    VERIFICATION,
    ANSWER_RE,
    SENTENCE_END_RE,
    extract_answer,
    sample_paths,
    should_retrieve,
    tally_votes,
)
from cokb.generator import (
    GeneratorUnavailable,
    UnparseableGeneratedQuery,
    RuleTemplateGenerator,
    ExternalHttpGenerator,
    generate_query,
)
from cokb.kb import (
    KBError,
    EndpointError,
    FixtureSource,
    WikidataSource,
    TokenBucket,
    cached,
    execute_sparql,
    ground_rows,
    link_entity,
    row_ids,
    triplet_to_sparql,
)
from cokb.kb.sources import LINK_LIMIT
from cokb.llm import (
    LLMError,
    CompletionRequest,
    LiveBackend,
    RecordingBackend,
    ReplayBackend,
    render_prompt,
)
from cokb.query import (
    MissingBinding,
    TermError,
    TripletQuery,
    collect_mentions,
    resolve_placeholders,
    serialize_query,
)
from cokb.util import measure

log = logging.getLogger('cokb')

GUIDED_TEMPLATES = {
    MULTIHOP: 'guided_multihop',
    VERIFICATION: 'guided_verification',
}

MARKER_RE = re.compile(
    r'(?:^|(?<=\s))(?:First|Second|Third|Fourth|Fifth|Then|Next|Finally),\s*')


class PipelineError(CokError):
    """A run failed; `trace` holds the stages completed so far."""

    def __init__(self, message, trace):
        super(PipelineError, self).__init__(message)
        self.trace = trace


class Trace(object):
    """Ordered record of the stages of one run."""

    def __init__(self, question, mode):
        self.question = question
        self.mode = mode
        self.stages = []
        self.warnings = []

    def record(self, stage, data):
        if stage in self:
            raise ContractError("stage '%s' recorded twice" % stage)
        self.stages.append((stage, data))

    def warn(self, message):
        log.warning(message)
        self.warnings.append(message)

    def __contains__(self, stage):
        return any(name == stage for name, _ in self.stages)

    def get(self, stage):
        for name, data in self.stages:
            if name == stage:
                return data
        raise KeyError(stage)

    @property
    def stage_names(self):
        return [name for name, _ in self.stages]

    def to_json(self):
        return {
            'question': self.question,
            'mode': self.mode,
            'stages': [{'stage': name, 'data': data}
                       for name, data in self.stages],
            'warnings': list(self.warnings),
        }

    def dumps(self):
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True,
                          indent=2)


@dataclass
class CokResult(object):
    answer: str
    trace: Trace

    def to_json(self):
        return {'answer': self.answer, 'trace': self.trace.to_json()}


@dataclass
class Retrieval(object):
    facts: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def build_source(settings):
    """The KB source named by the settings: a fixture or live Wikidata."""
    if settings.kb_fixture:
        source = FixtureSource.load(settings.kb_fixture)
    else:
        source = WikidataSource(sparql_url=settings.sparql_url,
                                search_url=settings.search_url,
                                bucket=TokenBucket(settings.kb_rate))
    if settings.kb_cache:
        source = cached(source, settings.kb_cache)
    return source


@dataclass
class Backends(object):
    llm: object
    kb: object
    generator: object = None
    linker: object = None

    @classmethod
    def from_settings(cls, settings):
        pipeline = settings.pipeline
        if settings.replay:
            llm = ReplayBackend(settings.replay)
        else:
            llm = LiveBackend(base_url=settings.llm_base_url,
                              model=settings.llm_model,
                              api_key_env=settings.llm_api_key_env)
            if settings.record:
                llm = RecordingBackend(settings.record, llm)

        kb = build_source(settings)

        if pipeline.generator_backend == 'external-http':
            if not settings.generator_url:
                raise config.ConfigError(
                    "the external-http generator needs [generator] url")
            generator = ExternalHttpGenerator(settings.generator_url)
        elif settings.generator_patterns:
            generator = RuleTemplateGenerator.load(settings.generator_patterns)
        else:
            generator = RuleTemplateGenerator()
        return cls(llm=llm, kb=kb, generator=generator)


def split_rationale(text):
    """Rationale sentences before the final answer, split on the
    "First, ... Second, ..." markers or else on sentence ends."""
    text = ' '.join(text.split())
    matches = list(ANSWER_RE.finditer(text))
    if matches:
        text = text[:matches[-1].start()].strip()
    if not text:
        return []
    markers = list(MARKER_RE.finditer(text))
    if markers:
        pieces = [text[:markers[0].start()]]
        for i, marker in enumerate(markers):
            end = markers[i + 1].start() if i + 1 < len(markers) else len(text)
            pieces.append(text[marker.end():end])
    else:
        pieces = SENTENCE_END_RE.split(text)
    return [p.strip() for p in pieces if p.strip()]


def decompose(backend, question, mode=MULTIHOP,
              temperature=config.ANSWER_TEMPERATURE):
    """Sub-questions from one greedy chain-of-thought rationale."""
    if mode != MULTIHOP:
        raise ContractError("decomposition only applies to multihop mode")
    prompt = render_prompt('cot_multihop', {'question': question})
    request = CompletionRequest(prompt=prompt, temperature=temperature)
    response = backend.complete(request)
    subs = split_rationale(response.texts[0] if response.choices else '')
    return subs or [question]


def _query_facts(source, query):
    if isinstance(query, TripletQuery):
        sparql = triplet_to_sparql(query)
    else:
        sparql = dataclasses.replace(
            query, distinct=True, projection=tuple(query.variables()))
    rows = execute_sparql(source, sparql)
    labels = source.labels(row_ids(sparql, rows)) if rows else {}
    facts = []
    for row_facts in ground_rows(sparql, rows, labels):
        facts.extend(row_facts)
    return facts


def retrieve_for(source, sub_question, query, top_k=config.LINK_TOP_K,
                 linker=None):
    """Link every mention, resolve, execute and collect facts.

    With `top_k` above one every combination of the top candidates is
    queried. Unlinkable mentions leave the facts empty with a warning.
    """
    retrieval = Retrieval()
    options = []
    for mention in collect_mentions(query):
        candidates = link_entity(source, mention.label, mention.kind,
                                 limit=max(top_k, LINK_LIMIT), linker=linker)
        if not candidates:
            retrieval.warnings.append("no %s found for '%s' in %r" % (
                mention.kind, mention.label, sub_question))
            continue
        ids = [c.id for c in candidates[:top_k]]
        retrieval.bindings[mention.label] = ids[0]
        options.append((mention.label, ids))

    labels = [label for label, _ in options]
    seen = set()
    for combo in itertools.product(*[ids for _, ids in options]):
        try:
            resolved = resolve_placeholders(query, dict(zip(labels, combo)))
        except (MissingBinding, TermError) as e:
            retrieval.warnings.append(str(e))
            break
        try:
            found = _query_facts(source, resolved)
        except EndpointError as e:
            retrieval.warnings.append("query for %r rejected: %s" % (
                sub_question, e))
            continue
        for fact in found:
            if fact.verbalization not in seen:
                seen.add(fact.verbalization)
                retrieval.facts.append(fact)
    return retrieval


def synthesize(backend, question, facts, mode=MULTIHOP,
               temperature=config.ANSWER_TEMPERATURE, fallback_answer=None,
               trace=None):
    """Answer from the facts plus the question.

    With no facts and a `fallback_answer`, that answer is returned without
    asking the model; it also replaces an answer that cannot be extracted.
    """
    if not facts and fallback_answer is not None:
        if trace is not None:
            trace.record('synthesize', {'fallback': True, 'raw_text': None})
        return fallback_answer
    lines = '\n'.join(
        getattr(fact, 'verbalization', fact) for fact in facts)
    key = 'claim' if mode == VERIFICATION else 'question'
    prompt = render_prompt(GUIDED_TEMPLATES[mode],
                           {'facts': lines, key: question})
    response = backend.complete(
        CompletionRequest(prompt=prompt, temperature=temperature))
    raw = response.texts[0] if response.choices else ''
    answer = extract_answer(raw, mode)
    if trace is not None:
        trace.record('synthesize', {
            'fallback': answer is None, 'raw_text': raw})
    if answer is None:
        return fallback_answer if fallback_answer is not None else ''
    return answer


def _generate_all(generator, subs, cfg, trace):
    generated = []
    entries = []
    for sub in subs:
        entry = {'sub_question': sub, 'raw': None, 'query': None}
        try:
            query, raw, issues = generate_query(
                generator, sub, cfg.query_format)
        except GeneratorUnavailable as e:
            trace.warn(str(e))
            entry['error'] = str(e)
        except UnparseableGeneratedQuery as e:
            trace.warn(str(e))
            entry['raw'] = e.raw
            entry['error'] = e.reason
        else:
            entry['raw'] = raw
            entry['query'] = serialize_query(query)
            if issues:
                entry['issues'] = [issue.to_json() for issue in issues]
                entry['skipped'] = True
                trace.warn("query for %r skipped: %s" % (
                    sub, ', '.join(issue.code.value for issue in issues)))
            else:
                generated.append((sub, query))
        entries.append(entry)
    trace.record('queries', entries)
    return generated


@measure('cok')
def run_cok(question, cfg, backends):
    """Answer one question (or verify one claim); returns a CokResult."""
    trace = Trace(question, cfg.mode)
    try:
        return _run(question, cfg, backends, trace)
    except (LLMError, KBError) as e:
        raise PipelineError(str(e), trace) from e


def _run(question, cfg, backends, trace):
    paths = sample_paths(backends.llm, question, cfg.mode, cfg.n_paths,
                         cfg.sample_temperature)
    trace.record('sample', [path.to_json() for path in paths])
    tally = tally_votes([path.answer for path in paths])
    trace.record('tally', tally.to_json())
    retrieve = should_retrieve(tally)
    trace.record('gate', {
        'retrieve': retrieve,
        'threshold': tally.n // 2 + 1,
        'top_count': tally.top_count,
    })
    top = tally.best_answer
    if not retrieve:
        trace.record('answer', top)
        return CokResult(top, trace)

    if cfg.mode == MULTIHOP:
        subs = decompose(backends.llm, question,
                         temperature=cfg.answer_temperature)
        trace.record('decompose', subs)
    else:
        subs = [question]

    generator = backends.generator or RuleTemplateGenerator()
    generated = _generate_all(generator, subs, cfg, trace)

    links = []
    facts = []
    for sub, query in generated:
        retrieval = retrieve_for(backends.kb, sub, query, cfg.link_top_k,
                                 backends.linker)
        for message in retrieval.warnings:
            trace.warn(message)
        links.append({'sub_question': sub, 'bindings': retrieval.bindings})
        facts.extend(retrieval.facts)
    trace.record('links', links)

    unique = []
    for fact in facts:
        if fact.verbalization not in [f.verbalization for f in unique]:
            unique.append(fact)
    facts = unique[:cfg.max_facts]
    trace.record('facts', [fact.verbalization for fact in facts])

    if cfg.retrieval_fallback == 'keep-cot-answer':
        fallback = top
    else:
        fallback = ''
    answer = synthesize(backends.llm, question, facts, cfg.mode,
                        cfg.answer_temperature, fallback, trace)
    trace.record('answer', answer)
    return CokResult(answer, trace)
