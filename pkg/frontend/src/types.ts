// Wire types mirroring the advisor API's JSON contracts.

export interface SystemRecord {
  system_type: string;
  security_lifetime: number;
  crypto_method: string;
  key_size: number;
  system_complexity: number;
  integration_complexity: number;
  data_sensitivity: number;
}

export type RecordField = keyof SystemRecord;

export interface Alternative {
  strategy: string;
  probability: number;
}

export interface Recommendation {
  strategy: string;
  confidence: number;
  alternatives: Alternative[];
}

export interface WhatIfResult {
  value: string | number;
  recommendation: Recommendation;
}

export type ImportanceMap = Record<string, number>;

export interface HeatmapTable {
  kind: "percent" | "score";
  row_labels: string[];
  col_labels: string[];
  values: number[][];
}

export interface DatasetSummary {
  class_counts: Record<string, number>;
  method_strategy_heatmap: HeatmapTable;
  system_vulnerability_scores: HeatmapTable;
}

export interface ApiError {
  error: string;
  field?: string;
}
