// Payload shapes as served by the tabpilot HTTP API. The UI renders these
// verbatim; it never recomputes scores, bins or curves client-side.

export type DType = 'numeric' | 'categorical' | 'temporal' | 'text';
export type TaskType = 'regression' | 'classification';
export type MetricName =
  | 'accuracy' | 'precision' | 'recall' | 'f1'
  | 'mae' | 'mse' | 'rmse' | 'r2';

export interface Provenance {
  kind: string;
  operation: string | null;
  parents: string[];
}

export interface ColumnInfo {
  name: string;
  dtype: DType;
  granularity?: string | null;
}

export interface DatasetSummary {
  name: string;
  row_count: number;
  provenance: Provenance;
  columns: ColumnInfo[];
}

export interface DatasetList {
  datasets: DatasetSummary[];
}

// numeric/temporal histograms are [lo, hi, count]; categorical are [label, count]
export type NumericBin = [number, number, number];
export type CategoryBin = [string, number];

export interface ColumnProfile {
  name: string;
  dtype: DType;
  missing_count: number;
  distinct_count: number;
  min: number | null;
  max: number | null;
  mean: number | null;
  std: number | null;
  histogram: NumericBin[] | CategoryBin[];
  temporal_range: [string, string] | null;
}

export interface DatasetProfile extends DatasetSummary {
  profiles: ColumnProfile[];
}

export interface BudgetSpec {
  max_pipelines: number;
  time_limit_seconds: number;
}

export interface EvalMethodSpec {
  kind: 'kfold' | 'holdout';
  k?: number;
  test_fraction?: number;
}

export interface ProblemSpecPayload {
  task_type: TaskType;
  target: string;
  features: string[];
  primary_metric: MetricName;
  report_metrics?: MetricName[];
  budget: BudgetSpec;
  eval_method: EvalMethodSpec;
}

export interface ProblemRecord {
  problem_id: string;
  dataset: string;
  spec: Required<ProblemSpecPayload>;
  feature_dtypes: Record<string, DType>;
  usable_row_count: number;
}

export interface PipelineStep {
  name: string;
  hyperparams: Record<string, unknown>;
}

export interface PipelinePayload {
  id: string;
  steps: PipelineStep[];
}

export interface OofPrediction {
  fold: number;
  row: number;
  y_pred: number | string;
  y_true: number | string;
}

export interface SolutionReport {
  metrics: Record<string, number | null>;
  predictions: OofPrediction[];
  warnings: string[];
}

export interface Solution {
  solution_id: string;
  status: 'scored' | 'failed';
  pipeline: PipelinePayload;
  report: SolutionReport | null;
  reason: string | null;
  created_at: number;
}

export interface SolutionsPage {
  metric: MetricName;
  ranking: string[];
  solutions: Solution[];
  failed: Solution[];
}

export interface RunEvent {
  seq: number;
  kind: 'solution' | 'finished';
  solution: Solution | null;
  reason: string | null;
}

export interface EventsPage {
  events: RunEvent[];
  cursor: number;
  state: string;
  finish_reason: string | null;
}

export interface StartedRun {
  run_id: string;
  state: string;
  seed: number;
}

export interface ScoreBin {
  lo: number;
  hi: number;
  count: number;
}

export interface ScoreSummary {
  metric: MetricName;
  bins: ScoreBin[];
  bin_of: Record<string, number>;
}

export interface ParallelCoords {
  metrics: MetricName[];
  ranges: Record<string, { min: number; max: number }>;
  solutions: { solution_id: string; values: (number | null)[] }[];
}

export interface PdpFeatureList {
  features: string[];
}

export interface PdpCurve {
  feature: string;
  grid: number[];
  values: number[];
  bin_counts: number[];
  warnings: string[];
}

export interface ScatterView {
  pairs: [number, number][];
  degenerate: boolean;
}

export interface RulePredicate {
  feature: string;
  op: '<=' | '>' | '=';
  value: number | string;
}

export interface Rule {
  predicates: RulePredicate[];
  predicted_class: string;
  support: number;
  confidence: number;
  distribution: Record<string, number>;
}

export interface RuleSet {
  rules: Rule[];
  fidelity: number;
  low_fidelity: boolean;
  degenerate: boolean;
  depth_limit: number;
}

export interface ConfusionView {
  labels: string[];
  counts: number[][];
}

export interface StepDiffEntry {
  label: 'same' | 'changed' | 'only-in-p1' | 'only-in-p2';
  name: string;
  p1_hyperparams: Record<string, unknown> | null;
  p2_hyperparams: Record<string, unknown> | null;
}

export interface ComparePayload {
  a: Solution;
  b: Solution;
  diff: StepDiffEntry[];
}

export interface AugmentEntry {
  name: string;
  description: string;
  keywords: string[];
  columns: ColumnInfo[];
}

export interface AugmentPlan {
  kind: 'exact' | 'temporal';
  key_pairs: [string, string][];
  aggregations: [string, string][];
  target_granularity: string | null;
}

export interface AugmentPreview {
  columns: string[];
  rows: (string | null)[][];
  profiles: ColumnProfile[];
}

export interface AugmentCandidate {
  candidate_id: string;
  entry: AugmentEntry;
  operation: 'join' | 'union';
  plan: AugmentPlan | null;
  column_mapping: Record<string, string>;
  relevance: number;
  key_overlap: number;
  preview: AugmentPreview;
}

export interface AugmentSearchResult {
  keywords: string[];
  candidates: AugmentCandidate[];
  warnings: string[];
}
