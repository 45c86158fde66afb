"""Fact-checking and rumour-detection engine.

Subpackages:
  corpus     -- data model, ingestion, chunking, file-backed stores
  retrieval  -- BM25 index, multi-stage evidence pipeline, AP@k harness
  inference  -- NLI stance triplets and stance mapping
  nlisan     -- attention-based veracity classifier and trainer
  rumournet  -- bi-directional graph-convolution rumour classifier
  analytics  -- panel data pipelines (sentiment, topics, spread, geo)
  service    -- job queue, result cache, HTTP API
  cli        -- operator command line
"""

__version__ = "0.1.0"
