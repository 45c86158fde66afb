"""Job queue, compute-slot pool, and per-client result cache.

The queue simulates scarce accelerators: at most ``slots`` jobs execute
concurrently, the rest wait in FIFO order. Completed results are cached per
(client, kind) until the client searches for a different claim or the TTL
expires. Cache and precomputed results persist across restarts; the queue
does not.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Protocol

from ..errors import EmptyClaim, QueueFull, UnknownJob


class JobKind(str, Enum):
    FACT_CHECK = "FactCheck"
    RUMOUR = "Rumour"


class JobState(str, Enum):
    QUEUED = "Queued"
    RUNNING = "Running"
    DONE = "Done"
    FAILED = "Failed"


class Engine(Protocol):
    def run(self, kind: JobKind, claim_text: str) -> dict: ...


@dataclass
class Job:
    job_id: str
    client_id: str
    kind: JobKind
    claim_text: str
    state: JobState = JobState.QUEUED
    submitted_at: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    result: Optional[dict] = None
    error: Optional[str] = None

    def snapshot(self) -> "Job":
        return Job(**vars(self))

    def to_json(self, include_result: bool = True) -> dict:
        doc = {
            "job_id": self.job_id, "kind": self.kind.value,
            "claim": self.claim_text, "state": self.state.value,
            "submitted_at": self.submitted_at, "started_at": self.started_at,
            "finished_at": self.finished_at, "error": self.error,
        }
        if include_result and self.state is JobState.DONE:
            doc["result"] = self.result
        return doc


@dataclass
class ResourcePool:
    slots: int = 1
    in_use: int = 0

    def acquire(self) -> None:
        assert self.in_use < self.slots, "slot accounting violated"
        self.in_use += 1

    def release(self) -> None:
        assert self.in_use > 0
        self.in_use -= 1


@dataclass
class CacheEntry:
    client_id: str
    kind: JobKind
    claim_text: str
    result: dict
    expires_at: float


class ResultCache:
    """At most one entry per (client, kind); file-backed, last write wins."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._entries: dict[tuple[str, str], CacheEntry] = {}
        if self.path and self.path.exists():
            self._load()

    def _load(self) -> None:
        now = time.time()
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (rec["client_id"], rec["kind"])
                if rec.get("evicted"):
                    self._entries.pop(key, None)
                    continue
                entry = CacheEntry(rec["client_id"], JobKind(rec["kind"]),
                                   rec["claim_text"], rec["result"], rec["expires_at"])
                if entry.expires_at > now:
                    self._entries[key] = entry
                else:
                    self._entries.pop(key, None)

    def _append(self, rec: dict) -> None:
        if self.path:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    def lookup(self, client_id: str, kind: JobKind, claim_text: str,
               now: float | None = None) -> Optional[dict]:
        now = time.time() if now is None else now
        entry = self._entries.get((client_id, kind.value))
        if entry is None:
            return None
        if now >= entry.expires_at:
            del self._entries[(client_id, kind.value)]
            return None
        if entry.claim_text != claim_text:
            return None
        return entry.result

    def store(self, client_id: str, kind: JobKind, claim_text: str,
              result: dict, expires_at: float) -> None:
        entry = CacheEntry(client_id, kind, claim_text, result, expires_at)
        self._entries[(client_id, kind.value)] = entry
        self._append({"client_id": client_id, "kind": kind.value,
                      "claim_text": claim_text, "result": result,
                      "expires_at": expires_at})

    def evict_if_different(self, client_id: str, kind: JobKind, claim_text: str) -> None:
        """Searching a new claim drops the previous one's cached result."""
        key = (client_id, kind.value)
        entry = self._entries.get(key)
        if entry is not None and entry.claim_text != claim_text:
            del self._entries[key]
            self._append({"client_id": client_id, "kind": kind.value, "evicted": True})


class PrecomputedStore:
    """Results for dataset claims, shared across clients; file-backed."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._entries: dict[tuple[str, str], dict] = {}
        if self.path and self.path.exists():
            with self.path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._entries[(rec["kind"], rec["claim_text"])] = rec["result"]

    def get(self, kind: JobKind, claim_text: str) -> Optional[dict]:
        return self._entries.get((kind.value, claim_text))

    def put(self, kind: JobKind, claim_text: str, result: dict) -> None:
        key = (kind.value, claim_text)
        if key in self._entries:
            self._entries[key] = result
            return
        self._entries[key] = result
        if self.path:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps({"kind": kind.value, "claim_text": claim_text,
                                     "result": result}, ensure_ascii=False) + "\n")

    def __len__(self) -> int:
        return len(self._entries)


class JobService:
    """FIFO scheduler over shared compute slots with result caching."""

    def __init__(self, engine: Engine, slots: int = 1, ttl_seconds: float = 3600.0,
                 queue_bound: int = 1000, data_dir: str | Path | None = None):
        self.engine = engine
        self.ttl_seconds = ttl_seconds
        self.queue_bound = queue_bound
        self.pool = ResourcePool(slots=slots)
        data_dir = Path(data_dir) if data_dir else None
        cache_path = data_dir / "cache.jsonl" if data_dir else None
        pre_path = data_dir / "precomputed.jsonl" if data_dir else None
        self.cache = ResultCache(cache_path)
        self.precomputed = PrecomputedStore(pre_path)
        self._cond = threading.Condition()
        self._queue: deque[str] = deque()
        self._jobs: dict[str, Job] = {}
        self._workers: list[threading.Thread] = []
        self._stop = False
        # observability for tests / invariants
        self.execution_counts: dict[str, int] = {}
        self.max_in_use_observed = 0

    # --- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self._workers:
            return
        with self._cond:
            self._stop = False
        for i in range(self.pool.slots):
            worker = threading.Thread(target=self._run_loop, name=f"panacea-worker-{i}",
                                      daemon=True)
            worker.start()
            self._workers.append(worker)

    def stop(self) -> None:
        with self._cond:
            self._stop = True
            self._cond.notify_all()
        for worker in self._workers:
            worker.join(timeout=5.0)
        self._workers.clear()

    def wait_idle(self, timeout: float = 30.0) -> bool:
        deadline = time.time() + timeout
        with self._cond:
            while self._queue or self.pool.in_use > 0:
                remaining = deadline - time.time()
                if remaining <= 0:
                    return False
                self._cond.wait(timeout=remaining)
        return True

    # --- submission --------------------------------------------------------

    def submit(self, client_id: str, kind: JobKind, claim_text: str) -> Job:
        """Queue work, or answer immediately from precomputed/cached results.

        A resubmission of a claim the same client already has Queued/Running
        returns that job. Submitting a different claim evicts the client's
        cache entry for this kind.
        """
        if not claim_text or not claim_text.strip():
            raise EmptyClaim("claim text is empty")
        now = time.time()
        with self._cond:
            self.cache.evict_if_different(client_id, kind, claim_text)
            precomputed = self.precomputed.get(kind, claim_text)
            if precomputed is not None:
                job = self._instant_job(client_id, kind, claim_text, precomputed, now)
                return job.snapshot()
            cached = self.cache.lookup(client_id, kind, claim_text, now)
            if cached is not None:
                job = self._instant_job(client_id, kind, claim_text, cached, now)
                return job.snapshot()
            for job_id in self._queue:
                job = self._jobs[job_id]
                if (job.client_id == client_id and job.kind == kind
                        and job.claim_text == claim_text):
                    return job.snapshot()
            for job in self._jobs.values():
                if (job.state is JobState.RUNNING and job.client_id == client_id
                        and job.kind == kind and job.claim_text == claim_text):
                    return job.snapshot()
            if len(self._queue) >= self.queue_bound:
                raise QueueFull(f"queue at capacity ({self.queue_bound})")
            job = Job(job_id=uuid.uuid4().hex, client_id=client_id, kind=kind,
                      claim_text=claim_text, submitted_at=now)
            self._jobs[job.job_id] = job
            self._queue.append(job.job_id)
            self._cond.notify()
            return job.snapshot()

    def _instant_job(self, client_id: str, kind: JobKind, claim_text: str,
                     result: dict, now: float) -> Job:
        job = Job(job_id=uuid.uuid4().hex, client_id=client_id, kind=kind,
                  claim_text=claim_text, state=JobState.DONE, submitted_at=now,
                  started_at=now, finished_at=now, result=result)
        self._jobs[job.job_id] = job
        return job

    def job_status(self, job_id: str) -> Job:
        with self._cond:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownJob(job_id)
            return job.snapshot()

    def queue_position(self, job_id: str) -> Optional[int]:
        with self._cond:
            for pos, queued in enumerate(self._queue):
                if queued == job_id:
                    return pos
        return None

    # --- execution ---------------------------------------------------------

    def _run_loop(self) -> None:
        while True:
            with self._cond:
                while not self._stop and not self._queue:
                    self._cond.wait()
                if self._stop:
                    return
                job = self._jobs[self._queue.popleft()]
                job.state = JobState.RUNNING
                job.started_at = time.time()
                self.pool.acquire()
                self.max_in_use_observed = max(self.max_in_use_observed,
                                               self.pool.in_use)
            try:
                result = self.engine.run(job.kind, job.claim_text)
                with self._cond:
                    job.state = JobState.DONE
                    job.finished_at = time.time()
                    job.result = result
                    self.execution_counts[job.job_id] = \
                        self.execution_counts.get(job.job_id, 0) + 1
                    self.cache.store(job.client_id, job.kind, job.claim_text,
                                     result, job.finished_at + self.ttl_seconds)
                    self.pool.release()
                    self._cond.notify_all()
            except Exception as exc:  # engine failures never kill the loop
                with self._cond:
                    job.state = JobState.FAILED
                    job.finished_at = time.time()
                    job.error = str(exc)
                    self.execution_counts[job.job_id] = \
                        self.execution_counts.get(job.job_id, 0) + 1
                    self.pool.release()
                    self._cond.notify_all()

    # --- precomputation ----------------------------------------------------

    def precompute_all(self, claims) -> dict:
        """Fact-check and rumour results for every dataset claim; idempotent.

        Returns counts and the claim_ids whose computation failed.
        """
        computed = 0
        failed: list[str] = []
        for claim in claims:
            ok = True
            for kind in (JobKind.FACT_CHECK, JobKind.RUMOUR):
                if self.precomputed.get(kind, claim.text) is not None:
                    continue
                try:
                    result = self.engine.run(kind, claim.text)
                except Exception:
                    ok = False
                    continue
                self.precomputed.put(kind, claim.text, result)
            if ok:
                computed += 1
            else:
                failed.append(claim.claim_id)
        return {"claims": computed, "failed": failed,
                "entries": len(self.precomputed)}
