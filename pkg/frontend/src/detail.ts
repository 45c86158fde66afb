// Document detail: the full paragraph text with its selected sentences
// highlighted in stance colours, plus the stance distribution of all
// retrieved evidence.

import { barChart } from "./charts";
import { h } from "./dom";
import type { EvidenceRecord, StanceName } from "./types";

function highlightSpans(text: string, sentences: EvidenceRecord[]): (Node | string)[] {
  const spans = sentences
    .filter((s) => s.char_start !== null && s.char_end !== null)
    .map((s) => ({ start: s.char_start as number, end: s.char_end as number,
                   stance: s.stance }))
    .sort((a, b) => a.start - b.start);
  const out: (Node | string)[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start < cursor) continue; // overlapping selections keep the first
    if (span.start > cursor) out.push(text.slice(cursor, span.start));
    out.push(h("mark",
      { class: `highlight stance-${span.stance.toLowerCase()}`,
        "data-start": String(span.start), "data-end": String(span.end) },
      text.slice(span.start, span.end)));
    cursor = span.end;
  }
  if (cursor < text.length) out.push(text.slice(cursor));
  return out;
}

export function renderDocumentDetail(
  document_: EvidenceRecord,
  sentences: EvidenceRecord[],
  stanceDistribution: Record<StanceName, number>,
): HTMLElement {
  const ownSentences = sentences.filter(
    (s) => s.unit_id.startsWith(document_.unit_id + "#s"));
  const root = h("div", { class: "document-detail" },
    h("h2", {}, `${document_.source} ${document_.doc_type}`.trim() || document_.unit_id),
    h("p", { class: "detail-meta" },
      `relevance ${document_.relevance.toFixed(3)}, stance ${document_.stance}`),
    h("p", { class: "detail-text" }, ...highlightSpans(document_.text, ownSentences)));

  const labels: StanceName[] = ["Support", "Neutral", "Refute"];
  root.append(h("div", { class: "stance-distribution" },
    h("h3", {}, "Stance of retrieved evidence"),
    barChart(labels, labels.map((l) => stanceDistribution[l] ?? 0))));
  return root;
}
