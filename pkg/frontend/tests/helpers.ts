/** Shared test scaffolding: canned API payloads and a scripted fetch. */

import type { SessionArchive, ChatMessage } from "../src/types.js";

export function archiveFixture(dims = 2): SessionArchive {
  const labels = ["red", "blue", "red", "blue", "green", "green"];
  const embedding = labels.map((_, i) =>
    Array.from({ length: dims }, (_, d) => Math.sin(i + d) * (d + 1)),
  );
  return {
    format_version: "1",
    config: {
      population_size: 100,
      generations: 100,
      final_dimensions: dims,
      fitness_id: "gpmal",
      bloat: {
        method: "lexicographic",
        order_fitness_first: true,
        p_smaller: 0.7,
        p_tarpeian: 0.3,
      },
      seed: 42,
      max_depth: 8,
      tournament_size: 7,
      crossover_rate: 0.8,
      mutation_rate: 0.15,
      elitism_count: 1,
    },
    dataset: {
      name: "Toy",
      feature_names: ["alpha", "beta", "gamma"],
      class_names: ["red", "blue", "green"],
      instance_labels: labels,
      num_features: 3,
      num_instances: labels.length,
    },
    expressions: Array.from({ length: dims }, (_, d) => `(add alpha f${d})`),
    best_fitness: 0.321,
    embedding,
    accuracies: { original: 0.9833, embedding: 0.9333 },
    fitness_history: Array.from({ length: 100 }, (_, g) => 0.6 - g * 0.002),
    chat: { word_limit: 80, model_id: "gpt-3.5-turbo", messages: [] },
  };
}

export function initialMessages(): ChatMessage[] {
  return [
    {
      role: "human",
      text: "Provide an exciting summary of the results",
      timestamp: "2024-01-01T00:00:00+00:00",
    },
    {
      role: "ai",
      text: "The reduction kept 93% accuracy with two readable expressions.",
      timestamp: "2024-01-01T00:00:01+00:00",
    },
  ];
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
  headers: Record<string, string>;
}

/** A fetch stand-in driven by a url-pattern -> responder table. */
export function scriptedFetch(
  routes: Array<[RegExp, (call: RecordedCall) => { status?: number; body: unknown }]>,
) {
  const calls: RecordedCall[] = [];
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const call: RecordedCall = {
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" && init.body ? safeParse(init.body) : null,
      headers: (init?.headers as Record<string, string>) ?? {},
    };
    calls.push(call);
    for (const [pattern, responder] of routes) {
      if (pattern.test(url)) {
        const { status = 200, body } = responder(call);
        return new Response(typeof body === "string" ? body : JSON.stringify(body), {
          status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    throw new Error(`no scripted route for ${url}`);
  }) as typeof fetch;
  return { fetchFn, calls };
}

function safeParse(text: string): unknown {
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}
