"""Exception types shared across the package.

Every raisable error derives from :class:`PanaceaError` so callers (CLI,
HTTP layer) can map failures to exit codes / status codes in one place.
"""


class PanaceaError(Exception):
    """Base class for all package errors."""


# --- corpus ---------------------------------------------------------------

class EmptyDocument(PanaceaError):
    """Document body tokenizes to zero tokens."""


class MalformedRecord(PanaceaError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed record at line {line_no}: {reason}")


class DuplicateId(PanaceaError):
    def __init__(self, entity_id: str):
        self.entity_id = entity_id
        super().__init__(f"duplicate id: {entity_id}")


class OrphanNode(PanaceaError):
    def __init__(self, tweet_id: str):
        self.tweet_id = tweet_id
        super().__init__(f"node {tweet_id} references a missing parent")


class InvalidTree(PanaceaError):
    """Propagation tree violates its structural invariants."""


# --- retrieval ------------------------------------------------------------

class EmptyCorpus(PanaceaError):
    """No units to index / search / model."""


class NoQueries(PanaceaError):
    """Evaluation invoked with an empty judged-query set."""


# --- inference ------------------------------------------------------------

class InvalidTriplet(PanaceaError):
    """Stance probabilities do not form a distribution."""


# --- classifiers ----------------------------------------------------------

class NoEvidence(PanaceaError):
    """Veracity classification requires at least one evidence."""


class ShapeMismatch(PanaceaError):
    """Tensor shapes inconsistent with the declared parameter shapes."""


class EmptyDataset(PanaceaError):
    """Training or evaluation invoked without data."""


class InvalidRate(PanaceaError):
    """Probability parameter outside [0, 1]."""


class NoTrees(PanaceaError):
    """Rumour aggregation over an empty tree list."""


class BadCheckpoint(PanaceaError):
    """Checkpoint file unreadable or shape-inconsistent."""


# --- analytics ------------------------------------------------------------

class InvalidK(PanaceaError):
    """Topic count must be a positive integer."""


class BadTopicIndex(PanaceaError):
    """Topic index outside [0, K)."""


class NoTweets(PanaceaError):
    """Operation requires at least one tweet."""


class DegenerateInput(PanaceaError):
    """Input carries no variance to decompose."""


# --- service --------------------------------------------------------------

class EmptyClaim(PanaceaError):
    """Submitted claim text is empty."""


class UnknownJob(PanaceaError):
    def __init__(self, job_id: str):
        self.job_id = job_id
        super().__init__(f"unknown job: {job_id}")


class QueueFull(PanaceaError):
    """Bounded job queue is at capacity."""


class BadConfig(PanaceaError):
    """Service configuration missing or invalid."""
