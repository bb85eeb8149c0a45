from __future__ import absolute_import

from cokb.llm.errors import (
    LLMError,
    TemplateError,
    UnknownTemplate,
    MissingSlot,
    RequestError,
    Transport,
    RateLimited,
    FixtureMiss,
)
from cokb.llm.prompts import (
    PromptTemplate,
    TemplateRegistry,
    get_template,
    render_prompt,
)
from cokb.llm.backends import (
    CompletionRequest,
    CompletionResponse,
    Choice,
    CompletionBackend,
    LiveBackend,
    RecordingBackend,
    ReplayBackend,
    complete,
    request_key,
)
