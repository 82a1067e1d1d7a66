/** Wire types for the rule-service JSON API. */

export type Mode = 'simple' | 'advanced' | 'inference';

export interface Health {
  status: string;
  mode: Mode;
}

export interface RowJson {
  id: number;
  text: string;
  penman: string;
  labels: string[];
  split: string;
}

export interface RowsPage {
  rows: RowJson[];
  page: number;
  page_size: number;
  total: number;
  total_pages: number;
}

export interface ClauseJson {
  penman: string;
  negated: boolean;
}

export interface RuleJson {
  clauses: ClauseJson[];
}

export interface RulesFile {
  classes: Record<string, RuleJson[]>;
}

export interface MetricRecord {
  tp: number;
  fp: number;
  fn: number;
  tn: number;
  precision: number;
  recall: number;
  f1: number;
  true_positive_ids: number[];
  false_positive_ids: number[];
  false_negative_ids: number[];
}

export interface EvalReport {
  class: string;
  split: string;
  rules: (MetricRecord & { index: number })[];
  total: MetricRecord;
}

export interface Suggestion {
  penman: string;
  tp: number;
  fp: number;
  precision: number;
  recall: number;
  score: number;
  method: string;
}

export interface SuggestResponse {
  class: string;
  method: string;
  suggestions: Suggestion[];
}

export interface LabelStats {
  label: string;
  tp: number;
  fp: number;
  precision: number;
  recall: number;
}

export interface RefineResponse {
  class: string;
  rule_index: number;
  clause_index: number;
  threshold: number;
  applied: boolean;
  rule: ClauseJson[];
  penman: string;
  accepted: LabelStats[];
  rejected: LabelStats[];
}

export interface Proposal {
  row_id: number;
  labels: string[];
  provenance: { class: string; rule_index: number }[];
}
