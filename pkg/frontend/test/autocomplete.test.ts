// Debounce, supersession, empty-field, and selection behaviour.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { attachAutocomplete } from "../src/autocomplete";
import fixture from "./fixtures/autocomplete.json";
import type { Suggestion } from "../src/types";

const SUGGESTIONS = fixture.suggestions as Suggestion[];

function setup(fetcher: (q: string) => Promise<{ suggestions: Suggestion[] }>) {
  document.body.innerHTML = "";
  const input = document.createElement("input");
  document.body.append(input);
  const picks: string[] = [];
  const handle = attachAutocomplete(input, {
    fetcher,
    onPick: (text) => picks.push(text),
  });
  return { input, handle, picks };
}

function type(input: HTMLInputElement, text: string) {
  input.value = text;
  input.dispatchEvent(new Event("input"));
}

describe("autocomplete input", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces requests to one call 250 ms after typing stops", async () => {
    const fetcher = vi.fn(async () => ({ suggestions: SUGGESTIONS }));
    const { input } = setup(fetcher);
    type(input, "v");
    type(input, "vi");
    type(input, "vita");
    expect(fetcher).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(249);
    expect(fetcher).not.toHaveBeenCalled();
    await vi.advanceTimersByTimeAsync(1);
    expect(fetcher).toHaveBeenCalledTimes(1);
    expect(fetcher).toHaveBeenCalledWith("vita");
  });

  it("renders the fixture suggestion", async () => {
    const { input, handle } = setup(async () => ({ suggestions: SUGGESTIONS }));
    type(input, "vita");
    await vi.advanceTimersByTimeAsync(250);
    const items = handle.listEl.querySelectorAll("li");
    expect(items).toHaveLength(SUGGESTIONS.length);
    expect(items[0].textContent).toBe("vitamin c cures coronavirus");
  });

  it("issues no request for an empty field", async () => {
    const fetcher = vi.fn(async () => ({ suggestions: SUGGESTIONS }));
    const { input } = setup(fetcher);
    type(input, "");
    type(input, "   ");
    await vi.advanceTimersByTimeAsync(1000);
    expect(fetcher).not.toHaveBeenCalled();
  });

  it("drops superseded responses", async () => {
    let release: (v: { suggestions: Suggestion[] }) => void = () => {};
    const slow = new Promise<{ suggestions: Suggestion[] }>((res) => { release = res; });
    const fetcher = vi.fn((q: string) =>
      q === "old" ? slow : Promise.resolve({ suggestions: SUGGESTIONS }));
    const { input, handle } = setup(fetcher);
    type(input, "old");
    await vi.advanceTimersByTimeAsync(250);
    type(input, "vita");
    await vi.advanceTimersByTimeAsync(250);
    release({ suggestions: [{ claim_id: "stale", text: "stale claim", label: "True" }] });
    await vi.advanceTimersByTimeAsync(0);
    const items = handle.listEl.querySelectorAll("li");
    expect(items[0].textContent).toBe("vitamin c cures coronavirus");
  });

  it("click selects and populates the input", async () => {
    const { input, handle, picks } = setup(async () => ({ suggestions: SUGGESTIONS }));
    type(input, "vita");
    await vi.advanceTimersByTimeAsync(250);
    (handle.listEl.querySelector("li") as HTMLElement).click();
    expect(input.value).toBe("vitamin c cures coronavirus");
    expect(picks).toEqual(["vitamin c cures coronavirus"]);
    expect(handle.listEl.querySelectorAll("li")).toHaveLength(0);
  });

  it("keyboard selection with arrows and enter", async () => {
    const { input, picks } = setup(async () => ({ suggestions: SUGGESTIONS }));
    type(input, "vita");
    await vi.advanceTimersByTimeAsync(250);
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowDown" }));
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter" }));
    expect(picks).toEqual(["vitamin c cures coronavirus"]);
  });
});
