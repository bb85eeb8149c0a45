"""Completion backends: live HTTP, record-through, and fixture replay."""
from __future__ import absolute_import

import io
import os
import json
import time
import glob
import hashlib
import logging
import threading
from dataclasses import dataclass, field

import requests

from cokb import config
from cokb.llm.errors import RequestError, Transport, RateLimited, FixtureMiss
from cokb.util import measure

log = logging.getLogger('cokb')


@dataclass(frozen=True)
class CompletionRequest(object):
    prompt: str
    max_tokens: int = config.MAX_TOKENS
    temperature: float = 0.0
    n: int = 1
    stop: tuple = config.STOP
    want_logprobs: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'temperature', float(self.temperature))
        object.__setattr__(self, 'stop', tuple(self.stop or ()))
        if self.max_tokens < 1:
            raise RequestError("max_tokens must be positive")
        if self.n < 1:
            raise RequestError("n must be positive")
        if self.temperature < 0:
            raise RequestError("temperature must not be negative")
        if self.n >= 2 and self.temperature <= 0:
            raise RequestError("sampling %d paths needs temperature > 0"
                               % self.n)

    def to_json(self):
        return {
            'prompt': self.prompt,
            'max_tokens': self.max_tokens,
            'temperature': self.temperature,
            'n': self.n,
            'stop': list(self.stop),
            'want_logprobs': self.want_logprobs,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            prompt=data['prompt'],
            max_tokens=data['max_tokens'],
            temperature=data['temperature'],
            n=data['n'],
            stop=tuple(data['stop']),
            want_logprobs=data['want_logprobs'],
        )


@dataclass(frozen=True)
class Choice(object):
    text: str
    token_logprobs: tuple = None

    def to_json(self):
        logprobs = None
        if self.token_logprobs is not None:
            logprobs = [[token, value] for token, value in self.token_logprobs]
        return {'text': self.text, 'token_logprobs': logprobs}

    @classmethod
    def from_json(cls, data):
        logprobs = data.get('token_logprobs')
        if logprobs is not None:
            logprobs = tuple((token, value) for token, value in logprobs)
        return cls(data['text'], logprobs)


@dataclass(frozen=True)
class CompletionResponse(object):
    choices: tuple = field(default=())

    @property
    def texts(self):
        return [choice.text for choice in self.choices]

    def to_json(self):
        return {'choices': [choice.to_json() for choice in self.choices]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(Choice.from_json(c) for c in data['choices']))


def request_key(request):
    """Stable content hash of every request field."""
    canonical = json.dumps(request.to_json(), sort_keys=True,
                           separators=(',', ':'), ensure_ascii=True)
    return hashlib.sha256(canonical.encode('ascii')).hexdigest()


class CompletionBackend(object):

    def complete(self, request):
        raise NotImplementedError


class LiveBackend(CompletionBackend):
    """OpenAI-compatible `/v1/completions` client.

    Transport failures, 5xx and 429 answers and undecodable bodies are
    retried once per `backoff` delay, so the default makes four attempts in
    all. Other 4xx answers fail at once.
    """

    def __init__(self, base_url=config.LLM_BASE_URL, model=config.LLM_MODEL,
                 api_key=None, api_key_env=config.LLM_API_KEY_ENV,
                 session=None, timeout=config.HTTP_TIMEOUT,
                 backoff=config.RETRY_BACKOFF, sleep=time.sleep):
        self.url = base_url.rstrip('/') + '/v1/completions'
        self.model = model
        self.api_key = api_key or os.environ.get(api_key_env)
        self.session = session or requests.Session()
        self.timeout = timeout
        self.backoff = tuple(backoff)
        self.sleep = sleep

    def body(self, request):
        return {
            'model': self.model,
            'prompt': request.prompt,
            'max_tokens': request.max_tokens,
            'temperature': request.temperature,
            'n': request.n,
            'stop': list(request.stop) or None,
            'logprobs': 1 if request.want_logprobs else None,
        }

    def headers(self):
        headers = {'Content-Type': 'application/json'}
        if self.api_key:
            headers['Authorization'] = 'Bearer ' + self.api_key
        return headers

    @measure('llm')
    def complete(self, request):
        body = self.body(request)
        attempts = len(self.backoff) + 1
        for attempt in range(attempts):
            try:
                response = self.session.post(
                    self.url, json=body, headers=self.headers(),
                    timeout=self.timeout)
            except requests.RequestException as e:
                error = Transport("completion request failed: %s" % e)
            else:
                if response.status_code == 200:
                    try:
                        data = response.json()
                    except ValueError as e:
                        error = Transport(
                            "completion endpoint sent no JSON: %s" % e)
                    else:
                        return self.parse(request, data)
                elif response.status_code == 429:
                    error = RateLimited("completion endpoint rate limited")
                elif response.status_code >= 500:
                    error = Transport(
                        "completion endpoint answered %d"
                        % response.status_code)
                else:
                    raise Transport("completion endpoint answered %d: %s" % (
                        response.status_code, response.text[:200]))
            if attempt < attempts - 1:
                delay = self.backoff[attempt]
                log.warning("%s; retrying in %ss", error, delay)
                self.sleep(delay)
        raise error

    def parse(self, request, data):
        if not isinstance(data, dict):
            raise Transport("completion body is not an object")
        raw = sorted(data.get('choices', []), key=lambda c: c.get('index', 0))
        if len(raw) != request.n:
            raise Transport("expected %d choices, got %d"
                            % (request.n, len(raw)))
        choices = []
        for choice in raw:
            logprobs = choice.get('logprobs')
            token_logprobs = None
            if logprobs:
                token_logprobs = tuple(zip(
                    logprobs.get('tokens', []),
                    logprobs.get('token_logprobs', [])))
            choices.append(Choice(choice.get('text', ''), token_logprobs))
        return CompletionResponse(tuple(choices))


class RecordingBackend(CompletionBackend):
    """Passes requests to `inner` and appends each exchange to a fixture."""

    def __init__(self, path, inner=None):
        self.path = path
        self.inner = inner if inner is not None else LiveBackend()
        self._lock = threading.Lock()

    def complete(self, request):
        response = self.inner.complete(request)
        entry = {
            'key': request_key(request),
            'request': request.to_json(),
            'response': response.to_json(),
        }
        line = json.dumps(entry, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with io.open(self.path, 'a', encoding='utf8') as f:
                f.write(line + '\n')
        return response


class ReplayBackend(CompletionBackend):
    """Serves recorded responses; never touches the network.

    `path` is a fixture file or a directory of `*.jsonl` fixtures. An entry
    without a `key` is keyed by hashing its `request`.
    """

    def __init__(self, path):
        self.path = path
        self.responses = {}
        if os.path.isdir(path):
            files = sorted(glob.glob(os.path.join(path, '*.jsonl')))
        else:
            files = [path]
        for name in files:
            self._load(name)
        log.debug("loaded %d recorded completions from %s",
                  len(self.responses), path)

    def _load(self, name):
        with io.open(name, encoding='utf8') as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                key = entry.get('key')
                if key is None:
                    key = request_key(
                        CompletionRequest.from_json(entry['request']))
                self.responses[key] = entry['response']

    def __contains__(self, request):
        return request_key(request) in self.responses

    def complete(self, request):
        key = request_key(request)
        try:
            stored = self.responses[key]
        except KeyError:
            raise FixtureMiss(key)
        return CompletionResponse.from_json(stored)


def complete(backend, request):
    return backend.complete(request)
