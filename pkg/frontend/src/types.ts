// Payload shapes of the documented service API.

export type StanceName = "Support" | "Neutral" | "Refute";

export interface StanceTriplet {
  contradiction: number;
  neutral: number;
  entailment: number;
}

export interface EvidenceRecord {
  unit_id: string;
  text: string;
  relevance: number;
  stance: StanceName;
  stance_triplet: StanceTriplet;
  source: string;
  doc_type: string;
  kind: "Document" | "Sentence";
  char_start: number | null;
  char_end: number | null;
}

export interface FactCheckResult {
  claim: string;
  status: "ok" | "no_evidence";
  verdict: "True" | "False" | null;
  p_true: number | null;
  stance_distribution: Record<StanceName, number>;
  documents: EvidenceRecord[];
  sentences: EvidenceRecord[];
}

export interface TreeScore {
  tree_id: string;
  r: number;
  n: number;
}

export interface CountPoint {
  date: string;
  count: number;
}

export type WordCount = [string, number];

export interface TopicInfo {
  topic: number;
  weight: number;
  top_words: [string, number][];
  representative_tweet: { tweet_id: string; text: string };
}

export interface TopicsPanel {
  points: { topic: number; x: number; y: number; weight: number }[];
  topics: TopicInfo[];
}

export interface SpreadPoint {
  tweet_id: string;
  direct: number;
  total: number;
  post_time: string;
  tree_id: string;
}

export interface GraphNode {
  tweet_id: string;
  parent_id: string | null;
  depth: number;
  post_time: string;
  retweet_count: number;
}

export interface GraphDoc {
  tree_id: string;
  size: number;
  nodes: GraphNode[];
  edges: [string, string][];
}

export interface PropagationPanel {
  main: GraphDoc | null;
  comparisons: { claim_id: string; graph: GraphDoc }[];
}

export interface MapPoint {
  tweet_id: string;
  lat: number;
  lon: number;
  stance: StanceName;
  color: "red" | "yellow" | "blue";
}

export interface RumourPanels {
  tweet_count: CountPoint[];
  word_cloud: { Support: WordCount[]; Refute: WordCount[] };
  topics: TopicsPanel;
  spread: SpreadPoint[];
  propagation: PropagationPanel;
  map: MapPoint[];
}

export interface RumourResult {
  claim: string;
  status: "ok" | "no_trees";
  aggregate_score: number | null;
  tree_scores: TreeScore[];
  panels: RumourPanels;
}

export type JobState = "Queued" | "Running" | "Done" | "Failed";

export interface JobView<R> {
  job_id: string;
  kind: "FactCheck" | "Rumour";
  claim: string;
  state: JobState;
  submitted_at: number;
  started_at: number | null;
  finished_at: number | null;
  error: string | null;
  result?: R;
  queue_position?: number;
}

export interface Suggestion {
  claim_id: string;
  text: string;
  label: string;
}
