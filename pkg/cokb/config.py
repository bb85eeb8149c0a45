"""Defaults and the TOML settings loader."""
from __future__ import absolute_import

import io
import tomllib
import dataclasses
from dataclasses import dataclass, field

from cokb.errors import CokError, ContractError

# gate
N_PATHS = 5
SAMPLE_TEMPERATURE = 0.7
ANSWER_TEMPERATURE = 0.0

# completion
MAX_TOKENS = 256
STOP = ('\nQ:',)
LLM_BASE_URL = 'https://api.openai.com'
LLM_MODEL = 'text-davinci-003'
LLM_API_KEY_ENV = 'OPENAI_API_KEY'
HTTP_TIMEOUT = 60.0
RETRY_BACKOFF = (1.0, 2.0, 4.0)

# knowledge base
WIKIDATA_SPARQL_URL = 'https://query.wikidata.org/sparql'
WIKIDATA_API_URL = 'https://www.wikidata.org/w/api.php'
KB_RATE = 5.0
USER_AGENT = 'cokb/0.1 (knowledge-grounded answering)'

# pipeline
MAX_FACTS = 12
LINK_TOP_K = 1
WORKERS = 4

MODES = ('multihop', 'verification')
GENERATORS = ('rule-template', 'external-http')
FALLBACKS = ('keep-cot-answer', 'abstain')
FORMATS = ('triplets', 'sparql')


class ConfigError(CokError):
    pass


@dataclass(frozen=True)
class CokConfig(object):
    mode: str = 'multihop'
    n_paths: int = N_PATHS
    sample_temperature: float = SAMPLE_TEMPERATURE
    answer_temperature: float = ANSWER_TEMPERATURE
    query_format: str = 'sparql'
    generator_backend: str = 'rule-template'
    retrieval_fallback: str = 'keep-cot-answer'
    max_facts: int = MAX_FACTS
    link_top_k: int = LINK_TOP_K
    workers: int = WORKERS

    def __post_init__(self):
        checks = (
            ('mode', MODES),
            ('query_format', FORMATS),
            ('generator_backend', GENERATORS),
            ('retrieval_fallback', FALLBACKS),
        )
        for name, allowed in checks:
            if getattr(self, name) not in allowed:
                raise ContractError("%s must be one of %s, got %r" % (
                    name, ', '.join(allowed), getattr(self, name)))
        if self.n_paths < 1:
            raise ContractError("n_paths must be positive")
        if self.n_paths > 1 and self.sample_temperature <= 0:
            raise ContractError(
                "sampling several paths needs sample_temperature > 0")
        if self.answer_temperature < 0:
            raise ContractError("answer_temperature must not be negative")
        if self.max_facts < 0 or self.link_top_k < 1 or self.workers < 1:
            raise ContractError(
                "max_facts, link_top_k and workers must be positive")

    def replace(self, **changes):
        changes = dict((k, v) for k, v in changes.items() if v is not None)
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Settings(object):
    """Everything a run needs: pipeline knobs plus endpoints and fixtures."""
    pipeline: CokConfig = field(default_factory=CokConfig)
    llm_base_url: str = LLM_BASE_URL
    llm_model: str = LLM_MODEL
    llm_api_key_env: str = LLM_API_KEY_ENV
    sparql_url: str = WIKIDATA_SPARQL_URL
    search_url: str = WIKIDATA_API_URL
    kb_rate: float = KB_RATE
    kb_fixture: str = None
    kb_cache: str = None
    generator_url: str = None
    generator_patterns: str = None
    replay: str = None
    record: str = None
    dataset: str = None

    def replace(self, **changes):
        changes = dict((k, v) for k, v in changes.items() if v is not None)
        return dataclasses.replace(self, **changes)


SECTIONS = {
    'llm': {
        'base_url': 'llm_base_url',
        'model': 'llm_model',
        'api_key_env': 'llm_api_key_env',
        'replay': 'replay',
        'record': 'record',
    },
    'kb': {
        'sparql_url': 'sparql_url',
        'search_url': 'search_url',
        'rate': 'kb_rate',
        'fixture': 'kb_fixture',
        'cache': 'kb_cache',
    },
    'generator': {
        'url': 'generator_url',
        'patterns': 'generator_patterns',
    },
    'eval': {
        'dataset': 'dataset',
    },
}


def settings_from_dict(data):
    pipeline_fields = set(f.name for f in dataclasses.fields(CokConfig))
    pipeline = data.get('pipeline', {})
    unknown = set(pipeline) - pipeline_fields
    if unknown:
        raise ConfigError("unknown [pipeline] keys: %s"
                          % ', '.join(sorted(unknown)))
    values = {'pipeline': CokConfig(**pipeline)}
    for section, keys in SECTIONS.items():
        table = data.get(section, {})
        unknown = set(table) - set(keys)
        if unknown:
            raise ConfigError("unknown [%s] keys: %s"
                              % (section, ', '.join(sorted(unknown))))
        for key, value in table.items():
            values[keys[key]] = value
    return Settings(**values)


def load_settings(path=None):
    """Read settings from a TOML file; no path gives the defaults."""
    if path is None:
        return Settings()
    try:
        with io.open(path, 'rb') as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("%s: %s" % (path, e))
    return settings_from_dict(data)
