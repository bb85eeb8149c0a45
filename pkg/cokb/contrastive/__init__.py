from __future__ import absolute_import

from cokb.contrastive.errors import (
    ContrastiveError,
    InapplicableOp,
    CannotCorrupt,
    TemplateSlotMissing,
    InvalidCorrectQuery,
    LengthMismatch,
    PositiveLogprob,
)
from cokb.contrastive.lexicon import Lexicon
from cokb.contrastive.corrupt import (
    CorruptionOp,
    SPARQL_OPS,
    TRIPLET_OPS,
    corrupt,
)
from cokb.contrastive.records import (
    ContrastiveRecord,
    INSTRUCTIONS,
    build_record,
    export_jsonl,
    read_jsonl,
)
from cokb.contrastive.sequence import (
    QuerySpan,
    TokenizedSequence,
    assemble_sequence,
    masked_log_likelihood,
    whitespace_tokenizer,
)
