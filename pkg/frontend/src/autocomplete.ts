// Debounced claim suggestions below the input, with keyboard selection.
// Requests are debounced 250 ms and superseded responses are dropped; an
// empty field never issues a request.

import { h } from "./dom";
import type { Suggestion } from "./types";

export const DEBOUNCE_MS = 250;

export interface AutocompleteOptions {
  fetcher: (query: string) => Promise<{ suggestions: Suggestion[] }>;
  onPick: (text: string) => void;
  onError?: (err: unknown) => void;
  debounceMs?: number;
}

export interface AutocompleteHandle {
  destroy(): void;
  /** visible for tests */
  listEl: HTMLElement;
}

export function attachAutocomplete(input: HTMLInputElement,
                                   options: AutocompleteOptions): AutocompleteHandle {
  const debounceMs = options.debounceMs ?? DEBOUNCE_MS;
  const listEl = h("ul", { class: "suggestions", role: "listbox" });
  input.insertAdjacentElement("afterend", listEl);

  let timer: ReturnType<typeof setTimeout> | null = null;
  let sequence = 0;
  let items: Suggestion[] = [];
  let highlighted = -1;

  function renderList(): void {
    listEl.textContent = "";
    items.forEach((item, index) => {
      const li = h("li",
        {
          class: index === highlighted ? "suggestion active" : "suggestion",
          role: "option",
          onclick: () => pick(index),
        },
        item.text);
      listEl.append(li);
    });
  }

  function pick(index: number): void {
    const item = items[index];
    if (!item) return;
    input.value = item.text;
    items = [];
    highlighted = -1;
    renderList();
    options.onPick(item.text);
  }

  function scheduleFetch(): void {
    if (timer !== null) clearTimeout(timer);
    const query = input.value.trim();
    if (!query) {
      items = [];
      highlighted = -1;
      renderList();
      return;
    }
    timer = setTimeout(() => {
      timer = null;
      const mySeq = ++sequence;
      options.fetcher(query).then((resp) => {
        if (mySeq !== sequence) return; // superseded
        items = resp.suggestions;
        highlighted = -1;
        renderList();
      }).catch((err) => {
        if (mySeq !== sequence) return;
        options.onError?.(err);
      });
    }, debounceMs);
  }

  function onKeydown(ev: KeyboardEvent): void {
    if (!items.length) return;
    if (ev.key === "ArrowDown") {
      highlighted = (highlighted + 1) % items.length;
      renderList();
      ev.preventDefault();
    } else if (ev.key === "ArrowUp") {
      highlighted = (highlighted - 1 + items.length) % items.length;
      renderList();
      ev.preventDefault();
    } else if (ev.key === "Enter" && highlighted >= 0) {
      pick(highlighted);
      ev.preventDefault();
    } else if (ev.key === "Escape") {
      items = [];
      highlighted = -1;
      renderList();
    }
  }

  input.addEventListener("input", scheduleFetch);
  input.addEventListener("keydown", onKeydown);
  return {
    listEl,
    destroy() {
      if (timer !== null) clearTimeout(timer);
      sequence += 1;
      input.removeEventListener("input", scheduleFetch);
      input.removeEventListener("keydown", onKeydown);
      listEl.remove();
    },
  };
}
