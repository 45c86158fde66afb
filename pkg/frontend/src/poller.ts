// Job status polling: every second at first, backing off to a 5 s ceiling;
// stops on Done/Failed. Network loss pauses into a retry state instead of
// aborting.

import type { JobView } from "./types";

export const POLL_START_MS = 1000;
export const POLL_MAX_MS = 5000;
export const POLL_STEP_MS = 1000;

export interface PollerCallbacks<R> {
  onUpdate: (job: JobView<R>) => void;
  onOffline?: (err: unknown) => void;
  onDone: (job: JobView<R>) => void;
}

export interface PollerHandle {
  cancel(): void;
  /** the interval the next poll was scheduled with (visible for tests) */
  currentIntervalMs(): number;
}

export function pollJob<R>(fetchStatus: () => Promise<JobView<R>>,
                           callbacks: PollerCallbacks<R>): PollerHandle {
  let interval = POLL_START_MS;
  let cancelled = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  function schedule(): void {
    if (cancelled) return;
    timer = setTimeout(tick, interval);
    interval = Math.min(interval + POLL_STEP_MS, POLL_MAX_MS);
  }

  function tick(): void {
    if (cancelled) return;
    fetchStatus().then((job) => {
      if (cancelled) return;
      if (job.state === "Done" || job.state === "Failed") {
        callbacks.onDone(job);
        return;
      }
      callbacks.onUpdate(job);
      schedule();
    }).catch((err) => {
      if (cancelled) return;
      callbacks.onOffline?.(err);
      interval = POLL_MAX_MS; // paused-with-retry keeps probing at the ceiling
      schedule();
    });
  }

  // first probe is immediate: precomputed claims resolve without any
  // intermediate render
  tick();

  return {
    cancel() {
      cancelled = true;
      if (timer !== null) clearTimeout(timer);
    },
    currentIntervalMs() {
      return interval;
    },
  };
}
