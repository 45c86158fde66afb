// Verdict view: fixture replay snapshots, filtering, sorting, immutability.

import { describe, expect, it } from "vitest";
import { initialState } from "../src/state";
import { renderVerdict } from "../src/verdict";
import fixture from "./fixtures/factcheck_done.json";
import type { FactCheckResult, JobView } from "../src/types";

const JOB = fixture as unknown as JobView<FactCheckResult>;

function render(stateMutate?: (s: ReturnType<typeof initialState>) => void) {
  const state = initialState();
  stateMutate?.(state);
  const noop = { onStateChange: () => {}, onSelectDocument: () => {} };
  return renderVerdict(JOB, state, noop);
}

describe("verdict view", () => {
  it("replaying the recorded fixture yields identical DOM", () => {
    expect(render().outerHTML).toMatchSnapshot();
  });

  it("shows the verdict banner with probability", () => {
    const el = render();
    const banner = el.querySelector(".verdict-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain(JOB.result!.verdict);
    expect(banner!.textContent).toContain("p(true)");
  });

  it("lists every document with type, source, relevance, and stance badge", () => {
    const el = render();
    const rows = el.querySelectorAll(".evidence-row");
    expect(rows).toHaveLength(JOB.result!.documents.length);
    for (const row of rows) {
      expect(row.querySelector(".ev-type")!.textContent).not.toBe("");
      expect(row.querySelector(".ev-source")!.textContent).not.toBe("");
      expect(row.querySelector(".stance-badge")).not.toBeNull();
    }
  });

  it("filter stance=Refute shows only Refute rows", () => {
    const el = render((s) => {
      s.stanceFilter.clear();
      s.stanceFilter.add("Refute");
    });
    const rows = [...el.querySelectorAll(".evidence-row")];
    expect(rows.length).toBeGreaterThan(0);
    for (const row of rows) {
      expect(row.getAttribute("data-stance")).toBe("Refute");
    }
    const refuteCount = JOB.result!.documents
      .filter((d) => d.stance === "Refute").length;
    expect(rows).toHaveLength(refuteCount);
  });

  it("sort by relevance yields non-increasing scores", () => {
    const el = render((s) => { s.sortKey = "relevance"; });
    const scores = [...el.querySelectorAll(".ev-relevance")]
      .map((td) => Number(td.textContent));
    for (let i = 1; i < scores.length; i++) {
      expect(scores[i]).toBeLessThanOrEqual(scores[i - 1]);
    }
  });

  it("sort by source groups sources lexicographically", () => {
    const el = render((s) => { s.sortKey = "source"; });
    const sources = [...el.querySelectorAll(".ev-source")]
      .map((td) => td.textContent ?? "");
    expect(sources).toEqual([...sources].sort());
  });

  it("stance badges carry the API colour mapping", () => {
    const el = render();
    for (const badge of el.querySelectorAll(".stance-badge")) {
      const stance = badge.textContent;
      const color = badge.getAttribute("data-color");
      expect(color).toBe(stance === "Refute" ? "red"
        : stance === "Neutral" ? "yellow" : "blue");
    }
  });

  it("never mutates the payload", () => {
    const before = JSON.stringify(JOB);
    render((s) => { s.sortKey = "stance"; s.stanceFilter.delete("Neutral"); });
    expect(JSON.stringify(JOB)).toBe(before);
  });

  it("failed job renders the error panel with retry", () => {
    const failed = { ...JOB, state: "Failed" as const, result: undefined,
                     error: "engine exploded" };
    let retried = false;
    const el = renderVerdict(failed, initialState(), {
      onStateChange: () => {}, onSelectDocument: () => {},
      onRetry: () => { retried = true; },
    });
    expect(el.classList.contains("error-panel")).toBe(true);
    expect(el.textContent).toContain("engine exploded");
    (el.querySelector(".retry") as HTMLElement).click();
    expect(retried).toBe(true);
  });
});
