// Pure evidence filter/sort used by the verdict view.

import { describe, expect, it } from "vitest";
import { applyEvidenceView, initialState } from "../src/state";
import fixture from "./fixtures/factcheck_done.json";
import type { EvidenceRecord } from "../src/types";

const DOCS = (fixture as { result: { documents: EvidenceRecord[] } }).result.documents;

describe("applyEvidenceView", () => {
  it("defaults pass every record through, relevance-sorted", () => {
    const out = applyEvidenceView(DOCS, initialState());
    expect(out).toHaveLength(DOCS.length);
    for (let i = 1; i < out.length; i++) {
      expect(out[i].relevance).toBeLessThanOrEqual(out[i - 1].relevance);
    }
  });

  it("stance filter keeps only matching records", () => {
    const state = initialState();
    state.stanceFilter = new Set(["Neutral"]);
    const out = applyEvidenceView(DOCS, state);
    expect(out.every((r) => r.stance === "Neutral")).toBe(true);
  });

  it("source filter is an allowlist when non-empty", () => {
    const state = initialState();
    const source = DOCS[0].source;
    state.sourceFilter = new Set([source]);
    const out = applyEvidenceView(DOCS, state);
    expect(out.length).toBeGreaterThan(0);
    expect(out.every((r) => r.source === source)).toBe(true);
  });

  it("stance sort orders Refute before Neutral before Support", () => {
    const state = initialState();
    state.sortKey = "stance";
    const out = applyEvidenceView(DOCS, state);
    const order = { Refute: 0, Neutral: 1, Support: 2 };
    for (let i = 1; i < out.length; i++) {
      expect(order[out[i].stance]).toBeGreaterThanOrEqual(order[out[i - 1].stance]);
    }
  });

  it("does not mutate its input array", () => {
    const copy = JSON.stringify(DOCS);
    const state = initialState();
    state.sortKey = "source";
    applyEvidenceView(DOCS, state);
    expect(JSON.stringify(DOCS)).toBe(copy);
  });
});
