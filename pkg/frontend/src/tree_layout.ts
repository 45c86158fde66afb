// Tidy-ish layout for propagation trees: x from left-to-right leaf order,
// y from depth.

import type { GraphDoc } from "./types";

export interface LaidOutNode {
  tweet_id: string;
  parent_id: string | null;
  x: number;
  y: number;
  depth: number;
}

export function layoutTree(graph: GraphDoc): LaidOutNode[] {
  const children = new Map<string, string[]>();
  let root: string | null = null;
  for (const node of graph.nodes) {
    if (node.parent_id === null) {
      root = node.tweet_id;
    } else {
      const kids = children.get(node.parent_id) ?? [];
      kids.push(node.tweet_id);
      children.set(node.parent_id, kids);
    }
  }
  if (root === null) return [];
  for (const kids of children.values()) kids.sort();

  const xs = new Map<string, number>();
  let nextLeaf = 0;
  const assign = (id: string): number => {
    const kids = children.get(id) ?? [];
    if (!kids.length) {
      const x = nextLeaf;
      nextLeaf += 1;
      xs.set(id, x);
      return x;
    }
    const positions = kids.map(assign);
    const x = (Math.min(...positions) + Math.max(...positions)) / 2;
    xs.set(id, x);
    return x;
  };
  assign(root);

  const width = Math.max(nextLeaf - 1, 1);
  return graph.nodes.map((node) => ({
    tweet_id: node.tweet_id,
    parent_id: node.parent_id,
    x: (xs.get(node.tweet_id) ?? 0) / width,
    y: node.depth,
    depth: node.depth,
  }));
}
