/** Client-side RunConfig validation; mirrors the server's rules exactly. */

import type { RunConfigBody } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

const FITNESS_IDS = new Set(["gpmal", "gpmal2", "nrmse"]);
const BLOAT_METHODS = new Set(["none", "lexicographic", "double_tournament", "tarpeian"]);

export function defaultConfig(): RunConfigBody {
  return {
    population_size: 100,
    generations: 100,
    final_dimensions: 2,
    fitness_id: "gpmal",
    bloat: {
      method: "lexicographic",
      order_fitness_first: true,
      p_smaller: 0.7,
      p_tarpeian: 0.3,
    },
    seed: 0,
    max_depth: 8,
    tournament_size: 7,
    crossover_rate: 0.8,
    mutation_rate: 0.15,
    elitism_count: 1,
  };
}

export function validateConfig(config: RunConfigBody): FieldError[] {
  const errors: FieldError[] = [];
  const positive: Array<[string, number]> = [
    ["population_size", config.population_size],
    ["generations", config.generations],
    ["final_dimensions", config.final_dimensions],
    ["max_depth", config.max_depth],
    ["tournament_size", config.tournament_size],
  ];
  for (const [field, value] of positive) {
    if (!Number.isInteger(value) || value < 1) {
      errors.push({ field, message: `${field} must be a positive integer` });
    }
  }
  if (!FITNESS_IDS.has(config.fitness_id)) {
    errors.push({ field: "fitness_id", message: "unknown fitness function" });
  }
  if (!BLOAT_METHODS.has(config.bloat.method)) {
    errors.push({ field: "bloat", message: "unknown bloat-control method" });
  }
  for (const [field, value] of [
    ["crossover_rate", config.crossover_rate],
    ["mutation_rate", config.mutation_rate],
    ["bloat.p_smaller", config.bloat.p_smaller],
    ["bloat.p_tarpeian", config.bloat.p_tarpeian],
  ] as Array<[string, number]>) {
    if (!(value >= 0 && value <= 1)) {
      errors.push({ field, message: `${field} must be in [0, 1]` });
    }
  }
  if (config.crossover_rate + config.mutation_rate > 1) {
    errors.push({
      field: "crossover_rate",
      message: "crossover_rate + mutation_rate must not exceed 1",
    });
  }
  if (
    !Number.isInteger(config.elitism_count) ||
    config.elitism_count < 0 ||
    config.elitism_count > config.population_size
  ) {
    errors.push({
      field: "elitism_count",
      message: "elitism_count must be in [0, population_size]",
    });
  }
  if (!Number.isInteger(config.seed)) {
    errors.push({ field: "seed", message: "seed must be an integer" });
  }
  return errors;
}
