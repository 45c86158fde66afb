// The six rumour panels, in the architecture's enumeration order:
// tweet count, word cloud, discussion topics, tweet spread, propagation
// graph, tweet map. Every panel renders an explicit empty state when its
// payload is empty; charts draw raw payload numbers only.

import { barChart, lineChart, scatterChart } from "./charts";
import { emptyState, h, svg } from "./dom";
import { layoutTree } from "./tree_layout";
import type { ViewState } from "./state";
import type {
  GraphDoc,
  JobView,
  RumourResult,
  TopicsPanel,
  WordCount,
} from "./types";
import { WORLD_OUTLINE, project } from "./world";
import { renderFailedJob } from "./verdict";

export interface DashboardHandlers {
  onStateChange: (mutate: (state: ViewState) => void) => void;
  onRetry?: () => void;
}

function panel(title: string, cssName: string, ...body: (Node | string)[]): HTMLElement {
  return h("section", { class: `panel panel-${cssName}` },
    h("h3", { class: "panel-title" }, title), ...body);
}

function tweetCountPanel(result: RumourResult): HTMLElement {
  const series = result.panels.tweet_count;
  if (!series.length) return panel("Tweet Count", "tweet-count", emptyState("no tweets"));
  const points = series.map((p, i) => ({ x: i, y: p.count }));
  const chart = lineChart(points);
  const axis = h("div", { class: "axis-labels" },
    h("span", {}, series[0].date), h("span", {}, series[series.length - 1].date));
  return panel("Tweet Count", "tweet-count", chart, axis);
}

function cloudList(words: WordCount[], cssName: string): HTMLElement {
  if (!words.length) return emptyState("no words");
  const max = Math.max(...words.map(([, count]) => count));
  return h("ul", { class: `cloud cloud-${cssName}` },
    ...words.map(([word, count]) =>
      h("li", {
        class: "cloud-word",
        style: `font-size: ${0.8 + 1.2 * (count / max)}em`,
        "data-count": String(count),
      }, word)));
}

function wordCloudPanel(result: RumourResult): HTMLElement {
  const cloud = result.panels.word_cloud;
  return panel("Word Cloud", "word-cloud",
    h("div", { class: "cloud-half" }, h("h4", {}, "Supporting"),
      cloudList(cloud.Support, "support")),
    h("div", { class: "cloud-half" }, h("h4", {}, "Refuting"),
      cloudList(cloud.Refute, "refute")));
}

function topicsPanel(result: RumourResult, state: ViewState,
                     handlers: DashboardHandlers): HTMLElement {
  const topics: TopicsPanel = result.panels.topics;
  if (!topics.topics.length) {
    return panel("Discussion Topics", "topics", emptyState("no topics"));
  }
  const selected = Math.min(state.selectedTopic, topics.topics.length - 1);
  const scatter = scatterChart(topics.points.map((p) => ({
    x: p.x, y: p.y, r: 6 + 10 * p.weight,
    color: p.topic === selected ? "#f59e0b" : "#2563eb",
    title: `topic ${p.topic}`,
  })));
  const picker = h("div", { class: "topic-picker" },
    ...topics.topics.map((t) =>
      h("button", {
        class: t.topic === selected ? "topic-button active" : "topic-button",
        "data-topic": String(t.topic),
        onclick: () => handlers.onStateChange((s) => { s.selectedTopic = t.topic; }),
      }, `topic ${t.topic}`)));
  const info = topics.topics[selected];
  const bars = barChart(info.top_words.map(([w]) => w),
                        info.top_words.map(([, weight]) => weight));
  return panel("Discussion Topics", "topics",
    scatter, picker,
    h("div", { class: "topic-words" }, h("h4", {}, `Top words of topic ${selected}`), bars),
    h("blockquote", { class: "representative-tweet" },
      info.representative_tweet.text));
}

function spreadPanel(result: RumourResult): HTMLElement {
  const spread = result.panels.spread;
  if (!spread.length) return panel("Tweet Spread", "spread", emptyState("no spread data"));
  const points = spread.map((p, i) => ({
    x: i, y: p.total, r: 2 + p.direct, title: p.tweet_id,
  }));
  return panel("Tweet Spread", "spread", scatterChart(points),
    h("p", { class: "panel-note" }, "radius: direct replies, y: total spread"));
}

function drawTree(graph: GraphDoc, width = 360, height = 200): SVGElement {
  const laid = layoutTree(graph);
  const root = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart tree-chart" });
  const maxDepth = Math.max(...laid.map((n) => n.depth), 1);
  const pos = new Map(laid.map((n) => [n.tweet_id, [
    16 + n.x * (width - 32),
    16 + (n.depth / maxDepth) * (height - 32),
  ] as const]));
  for (const [parent, child] of graph.edges) {
    const a = pos.get(parent);
    const b = pos.get(child);
    if (!a || !b) continue;
    root.append(svg("line", { x1: String(a[0]), y1: String(a[1]),
                              x2: String(b[0]), y2: String(b[1]),
                              stroke: "#94a3b8" }));
  }
  for (const node of laid) {
    const p = pos.get(node.tweet_id)!;
    root.append(svg("circle", {
      cx: String(p[0]), cy: String(p[1]), r: node.depth === 0 ? "6" : "3.5",
      fill: node.depth === 0 ? "#0f172a" : "#2563eb",
      class: "tree-node",
    }));
  }
  return root;
}

function propagationPanel(result: RumourResult, state: ViewState,
                          handlers: DashboardHandlers): HTMLElement {
  const prop = result.panels.propagation;
  if (!prop.main) {
    return panel("Propagation Graph", "propagation", emptyState("no propagation tree"));
  }
  const options = [h("option", { value: "" }, "this claim")];
  for (const comparison of prop.comparisons) {
    options.push(h("option", {
      value: comparison.claim_id,
      ...(state.selectedComparison === comparison.claim_id
        ? { selected: "selected" } : {}),
    }, comparison.claim_id));
  }
  const selector = h("select", {
    class: "comparison-select",
    onchange: (ev: Event) => {
      const value = (ev.target as HTMLSelectElement).value || null;
      handlers.onStateChange((s) => { s.selectedComparison = value; });
    },
  }, ...options);
  const active = prop.comparisons.find((c) => c.claim_id === state.selectedComparison);
  const graph = active ? active.graph : prop.main;
  return panel("Propagation Graph", "propagation",
    h("label", { class: "comparison-label" }, "compare with: ", selector),
    drawTree(graph),
    h("p", { class: "panel-note" }, `tree ${graph.tree_id}, ${graph.size} tweets`));
}

function mapPanel(result: RumourResult): HTMLElement {
  const points = result.panels.map;
  const width = 360;
  const height = 180;
  const chart = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart map-chart" });
  for (const ring of WORLD_OUTLINE) {
    const d = ring.map(([lon, lat], i) => {
      const [x, y] = project(lon, lat, width, height);
      return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
    }).join(" ") + " Z";
    chart.append(svg("path", { d, fill: "#e2e8f0", stroke: "#cbd5e1" }));
  }
  for (const point of points) {
    const [x, y] = project(point.lon, point.lat, width, height);
    chart.append(svg("circle", {
      cx: x.toFixed(1), cy: y.toFixed(1), r: "3",
      fill: point.color, class: `map-point stance-${point.stance.toLowerCase()}`,
      "data-stance": point.stance,
    }));
  }
  const body: (Node | string)[] = [chart];
  if (!points.length) body.push(emptyState("no locatable tweets"));
  return panel("Tweet Map", "map", ...body);
}

export function renderDashboard(job: JobView<RumourResult>, state: ViewState,
                                handlers: DashboardHandlers): HTMLElement {
  if (job.state === "Failed") return renderFailedJob(job, handlers.onRetry);
  const result = job.result;
  if (!result) return emptyState("no result payload");
  const root = h("div", { class: "rumour-dashboard" });

  if (result.status === "ok" && result.aggregate_score !== null) {
    const score = result.aggregate_score;
    root.append(h("div", { class: "aggregate-banner" },
      h("span", { class: "aggregate-label" }, "rumour score"),
      h("span", { class: "aggregate-value" }, score.toFixed(3)),
      h("span", { class: "aggregate-trees" },
        `${result.tree_scores.length} propagation trees`)));
  }
  root.append(
    tweetCountPanel(result),
    wordCloudPanel(result),
    topicsPanel(result, state, handlers),
    spreadPanel(result),
    propagationPanel(result, state, handlers),
    mapPanel(result),
  );
  return root;
}
