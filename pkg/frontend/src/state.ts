// Client view state and the pure evidence filter/sort used by the verdict
// view. Filtering never mutates payload data and never re-fetches.

import type { EvidenceRecord, StanceName } from "./types";

export type SortKey = "relevance" | "source" | "stance";
export type Tab = "FactCheck" | "Rumour";

export interface ViewState {
  claimText: string;
  activeTab: Tab;
  stanceFilter: Set<StanceName>;
  sourceFilter: Set<string>;
  sortKey: SortKey;
  selectedDocument: string | null;
  selectedTopic: number;
  selectedComparison: string | null;
}

export function initialState(): ViewState {
  return {
    claimText: "",
    activeTab: "FactCheck",
    stanceFilter: new Set<StanceName>(["Support", "Neutral", "Refute"]),
    sourceFilter: new Set<string>(),
    sortKey: "relevance",
    selectedDocument: null,
    selectedTopic: 0,
    selectedComparison: null,
  };
}

const STANCE_ORDER: Record<StanceName, number> = { Refute: 0, Neutral: 1, Support: 2 };

// plain code-unit comparison keeps rendering a locale-independent pure
// function of the payload
function cmp(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

export function applyEvidenceView(records: readonly EvidenceRecord[],
                                  state: ViewState): EvidenceRecord[] {
  const filtered = records.filter((rec) => {
    if (!state.stanceFilter.has(rec.stance)) return false;
    if (state.sourceFilter.size > 0 && !state.sourceFilter.has(rec.source)) return false;
    return true;
  });
  const sorted = [...filtered];
  switch (state.sortKey) {
    case "relevance":
      sorted.sort((a, b) => b.relevance - a.relevance || cmp(a.unit_id, b.unit_id));
      break;
    case "source":
      sorted.sort((a, b) => cmp(a.source, b.source)
        || b.relevance - a.relevance || cmp(a.unit_id, b.unit_id));
      break;
    case "stance":
      sorted.sort((a, b) => STANCE_ORDER[a.stance] - STANCE_ORDER[b.stance]
        || b.relevance - a.relevance || cmp(a.unit_id, b.unit_id));
      break;
  }
  return sorted;
}

export const STANCE_COLORS: Record<StanceName, string> = {
  Refute: "red",
  Neutral: "yellow",
  Support: "blue",
};
