// Application wiring: claim input with autocomplete, tab submission, job
// polling, and view rendering. All state lives in one ViewState object and
// every render is a pure function of (state, last payload).

import { ApiClient } from "./api";
import { attachAutocomplete } from "./autocomplete";
import { renderDocumentDetail } from "./detail";
import { h } from "./dom";
import { renderDashboard } from "./panels";
import { PollerHandle, pollJob } from "./poller";
import { ViewState, initialState } from "./state";
import type { FactCheckResult, JobView, RumourResult } from "./types";
import { renderVerdict } from "./verdict";

const api = new ApiClient("");
const state: ViewState = initialState();

let lastFactCheck: JobView<FactCheckResult> | null = null;
let lastRumour: JobView<RumourResult> | null = null;
let poller: PollerHandle | null = null;

const viewEl = document.getElementById("view") ?? document.body;
const statusEl = document.getElementById("status") ?? document.createElement("div");
const offlineEl = document.getElementById("offline-banner") ?? document.createElement("div");

function setOffline(on: boolean): void {
  offlineEl.classList.toggle("visible", on);
  offlineEl.textContent = on ? "network unreachable, retrying" : "";
}

function rerender(): void {
  viewEl.textContent = "";
  if (state.activeTab === "FactCheck" && lastFactCheck) {
    if (state.selectedDocument && lastFactCheck.result) {
      const result = lastFactCheck.result;
      const doc = result.documents.find((d) => d.unit_id === state.selectedDocument);
      if (doc) {
        viewEl.append(
          h("button", {
            class: "back-button",
            onclick: () => { state.selectedDocument = null; rerender(); },
          }, "back to results"),
          renderDocumentDetail(doc, result.sentences, result.stance_distribution));
        return;
      }
    }
    viewEl.append(renderVerdict(lastFactCheck, state, {
      onStateChange: (mutate) => { mutate(state); rerender(); },
      onSelectDocument: (unitId) => { state.selectedDocument = unitId; rerender(); },
      onRetry: () => submit(),
    }));
  } else if (state.activeTab === "Rumour" && lastRumour) {
    viewEl.append(renderDashboard(lastRumour, state, {
      onStateChange: (mutate) => { mutate(state); rerender(); },
      onRetry: () => submit(),
    }));
  }
}

function showProgress(job: JobView<unknown>): void {
  const hint = job.queue_position !== undefined && job.queue_position !== null
    ? ` (position ${job.queue_position} in queue)` : "";
  statusEl.textContent = `${job.state}${hint}`;
}

function submit(): void {
  const claim = state.claimText.trim();
  if (!claim) return;
  poller?.cancel();
  state.selectedDocument = null;
  statusEl.textContent = "submitting";
  const isFactCheck = state.activeTab === "FactCheck";
  const post = isFactCheck ? api.submitFactCheck(claim) : api.submitRumour(claim);
  post.then(({ job_id }) => {
    poller = pollJob<unknown>(
      () => api.jobStatus(isFactCheck ? "FactCheck" : "Rumour", job_id),
      {
        onUpdate: (job) => { setOffline(false); showProgress(job); },
        onOffline: () => setOffline(true),
        onDone: (job) => {
          setOffline(false);
          statusEl.textContent = job.state;
          if (isFactCheck) lastFactCheck = job as JobView<FactCheckResult>;
          else lastRumour = job as JobView<RumourResult>;
          rerender();
        },
      });
  }).catch(() => setOffline(true));
}

export function boot(): void {
  const input = document.getElementById("claim-input") as HTMLInputElement | null;
  const submitBtn = document.getElementById("submit-claim");
  if (!input) return;

  input.addEventListener("input", () => { state.claimText = input.value; });
  attachAutocomplete(input, {
    fetcher: (query) => api.autocomplete(query),
    onPick: (text) => {
      state.claimText = text;
      (submitBtn as HTMLButtonElement | null)?.removeAttribute("disabled");
    },
    onError: () => setOffline(true),
  });
  submitBtn?.addEventListener("click", () => submit());
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter" && !ev.defaultPrevented) submit();
  });

  for (const tab of document.querySelectorAll<HTMLElement>("[data-tab]")) {
    tab.addEventListener("click", () => {
      state.activeTab = tab.dataset.tab as ViewState["activeTab"];
      document.querySelectorAll("[data-tab]").forEach((t) =>
        t.classList.toggle("active", t === tab));
      rerender();
    });
  }
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
