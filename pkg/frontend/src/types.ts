/** Wire types for the gp4nldr HTTP API (mirrors the service schemas). */

export type FitnessId = "gpmal" | "gpmal2" | "nrmse";
export type BloatMethod = "none" | "lexicographic" | "double_tournament" | "tarpeian";

export interface BloatBody {
  method: BloatMethod;
  order_fitness_first: boolean;
  p_smaller: number;
  p_tarpeian: number;
}

export interface RunConfigBody {
  population_size: number;
  generations: number;
  final_dimensions: number;
  fitness_id: FitnessId;
  bloat: BloatBody;
  seed: number;
  max_depth: number;
  tournament_size: number;
  crossover_rate: number;
  mutation_rate: number;
  elitism_count: number;
}

export interface DatasetMeta {
  id: string;
  name: string;
  num_instances: number;
  num_features: number;
  feature_names: string[];
  class_names: string[];
}

export interface DatasetPreview {
  name: string;
  feature_names: string[];
  rows: number[][];
  scaled: number[][];
  labels: string[];
  num_instances: number;
  num_features: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobSnapshot {
  id: string;
  state: JobState;
  progress: number;
  generations_total: number;
  created_at: string;
  updated_at: string;
  fitness_history: number[];
  error: string | null;
  result_summary: ResultSummary | null;
}

export interface ResultSummary {
  dataset_name: string;
  final_dimensions: number;
  fitness_id: string;
  generations: number;
  population_size: number;
  bloat_method: string;
  best_fitness: number;
  accuracy_original: number | null;
  accuracy_embedding: number | null;
}

export interface SessionArchive {
  format_version: string;
  config: RunConfigBody;
  dataset: {
    name: string;
    feature_names: string[];
    class_names: string[];
    instance_labels: string[];
    num_features: number;
    num_instances: number;
  };
  expressions: string[];
  best_fitness: number;
  embedding: number[][];
  accuracies: { original: number | null; embedding: number | null };
  fitness_history: number[];
  chat: {
    word_limit: number;
    model_id: string;
    messages: ChatMessage[];
  };
}

export interface ChatMessage {
  role: "human" | "ai";
  text: string;
  timestamp: string;
}

export interface ExampleListEntry extends ResultSummary {
  id: string;
}

export interface SessionPayload {
  session_id: string;
  run_ref: string;
  word_limit: number;
  model_id: string;
  messages: ChatMessage[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
}
