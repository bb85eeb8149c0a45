from __future__ import absolute_import

from cokb.kb.errors import (
    KBError,
    Transport,
    EndpointError,
    UnresolvedQuery,
    FixtureError,
)
from cokb.kb.store import FixtureStore
from cokb.kb.ratelimit import TokenBucket
from cokb.kb.sources import (
    EntityCandidate,
    KnowledgeSource,
    FixtureSource,
    WikidataSource,
    HeuristicLinker,
    link_entity,
    execute_sparql,
    lookup_triplet,
    triplet_to_sparql,
)
from cokb.kb.cache import CachedSource, cached
from cokb.kb.verbalize import (
    KnowledgeFact,
    make_fact,
    ground_rows,
    row_ids,
    verbalize_facts,
    verbalize_rows,
)
