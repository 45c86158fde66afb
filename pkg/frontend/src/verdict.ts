// Fact-check result view: verdict banner plus the filterable evidence list.
// Rendering is a pure function of (payload, view state); handlers receive
// user intents and the caller re-renders.

import { emptyState, h } from "./dom";
import { STANCE_COLORS, ViewState, applyEvidenceView } from "./state";
import type { EvidenceRecord, FactCheckResult, JobView, StanceName } from "./types";

export interface VerdictHandlers {
  onStateChange: (mutate: (state: ViewState) => void) => void;
  onSelectDocument: (unitId: string) => void;
  onRetry?: () => void;
}

export function stanceBadge(stance: StanceName): HTMLElement {
  return h("span", { class: `stance-badge stance-${stance.toLowerCase()}`,
                     "data-color": STANCE_COLORS[stance] }, stance);
}

export function renderFailedJob(job: JobView<unknown>,
                                onRetry?: () => void): HTMLElement {
  const panel = h("div", { class: "error-panel" },
    h("h2", {}, "Job failed"),
    h("p", {}, job.error ?? "unknown error"));
  if (onRetry) {
    panel.append(h("button", { class: "retry", onclick: () => onRetry() }, "Retry"));
  }
  return panel;
}

function filterControls(result: FactCheckResult, state: ViewState,
                        handlers: VerdictHandlers): HTMLElement {
  const stances: StanceName[] = ["Support", "Neutral", "Refute"];
  const stanceBoxes = stances.map((stance) =>
    h("label", { class: "filter-stance" },
      h("input", {
        type: "checkbox",
        "data-stance": stance,
        ...(state.stanceFilter.has(stance) ? { checked: "checked" } : {}),
        onchange: () => handlers.onStateChange((s) => {
          if (s.stanceFilter.has(stance)) s.stanceFilter.delete(stance);
          else s.stanceFilter.add(stance);
        }),
      }),
      stance));

  const sources = [...new Set(result.documents.map((d) => d.source))].sort();
  const sourceBoxes = sources.map((source) =>
    h("label", { class: "filter-source" },
      h("input", {
        type: "checkbox",
        "data-source": source,
        ...(state.sourceFilter.has(source) ? { checked: "checked" } : {}),
        onchange: () => handlers.onStateChange((s) => {
          if (s.sourceFilter.has(source)) s.sourceFilter.delete(source);
          else s.sourceFilter.add(source);
        }),
      }),
      source));

  const sortSelect = h("select", {
    class: "sort-key",
    onchange: (ev: Event) => {
      const value = (ev.target as HTMLSelectElement).value as ViewState["sortKey"];
      handlers.onStateChange((s) => { s.sortKey = value; });
    },
  },
    ...(["relevance", "source", "stance"] as const).map((key) =>
      h("option", { value: key, ...(state.sortKey === key ? { selected: "selected" } : {}) },
        key)));

  return h("div", { class: "evidence-filters" },
    h("span", { class: "filters-label" }, "stance:"), ...stanceBoxes,
    h("span", { class: "filters-label" }, "source:"), ...sourceBoxes,
    h("span", { class: "filters-label" }, "sort by:"), sortSelect);
}

function evidenceRow(record: EvidenceRecord, handlers: VerdictHandlers): HTMLElement {
  return h("tr", {
    class: "evidence-row",
    "data-unit": record.unit_id,
    "data-stance": record.stance,
    onclick: () => handlers.onSelectDocument(record.unit_id),
  },
    h("td", { class: "ev-type" }, record.doc_type),
    h("td", { class: "ev-source" }, record.source),
    h("td", { class: "ev-relevance" }, record.relevance.toFixed(3)),
    h("td", { class: "ev-stance" }, stanceBadge(record.stance)),
    h("td", { class: "ev-text" },
      record.text.length > 160 ? record.text.slice(0, 157) + "..." : record.text));
}

export function renderVerdict(job: JobView<FactCheckResult>, state: ViewState,
                              handlers: VerdictHandlers): HTMLElement {
  if (job.state === "Failed") return renderFailedJob(job, handlers.onRetry);
  const result = job.result;
  if (!result) return emptyState("no result payload");
  const root = h("div", { class: "verdict-view" });

  if (result.status === "no_evidence" || result.verdict === null) {
    root.append(emptyState("no evidence found for this claim"));
    return root;
  }
  const pct = ((result.p_true ?? 0) * 100).toFixed(1);
  root.append(h("div", { class: `verdict-banner verdict-${result.verdict.toLowerCase()}` },
    h("span", { class: "verdict-label" }, result.verdict),
    h("span", { class: "verdict-prob" }, `p(true) = ${pct}%`),
    h("span", { class: "verdict-claim" }, result.claim)));

  root.append(filterControls(result, state, handlers));

  const rows = applyEvidenceView(result.documents, state);
  if (!rows.length) {
    root.append(emptyState("no evidence matches the active filters"));
    return root;
  }
  root.append(h("table", { class: "evidence-table" },
    h("thead", {}, h("tr", {},
      h("th", {}, "type"), h("th", {}, "source"), h("th", {}, "relevance"),
      h("th", {}, "stance"), h("th", {}, "text"))),
    h("tbody", {}, ...rows.map((record) => evidenceRow(record, handlers)))));
  return root;
}
