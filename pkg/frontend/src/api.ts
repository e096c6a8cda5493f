/* Typed access to the dictionary engine's JSON API.
 *
 * The UI never recomputes statistics: every number it shows is taken
 * verbatim from one of these payloads.
 */

export interface HealthPayload {
  status: string;
  docs: Record<string, number>;
  terms: number;
  communities: { slot: number; label: string; name: string }[];
}

export interface ComparativePayload {
  higher_rate: number | "tie";
  rate_delta: number;
  higher_sentiment: number | "tie" | null;
  sentiment_delta: number | null;
}

export interface StatsPayload {
  term: string;
  communities: [string, string];
  doc_count: [number, number];
  rate_per_k: [number, number];
  share: [number, number] | null;
  sentiment_mean: [number | null, number | null];
  comparative: ComparativePayload;
}

export interface GenerationPayload {
  term: string;
  kind: "summary" | "definition";
  community: number;
  name: string;
  seed: number;
  text: string;
  provenance: string[];
  model_id: string;
  backend: string;
  truncated: boolean;
}

export interface AlternativesPayload {
  term: string;
  kind: "alternatives";
  seed: number;
  text: string;
  provenance: { "1": string[]; "2": string[] };
  model_id: string;
  backend: string;
  truncated: boolean;
}

export interface ScatterApiPayload {
  term: string;
  x: number[];
  y: number[];
  label: number[];
  community: number[];
  doc_id: string[];
  text: string[];
  params: Record<string, unknown>;
}

export interface SamplesPayload {
  term: string;
  community: number;
  name: string;
  seed: number;
  doc_ids: string[];
  texts: string[];
}

export interface CuratedPayload {
  count: number;
  terms: { term: string; trigger: string; rank_key: number }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public code: string = "unknown",
  ) {
    super(message);
  }
}

export type FetchJson = (path: string, params?: Record<string, string>) => Promise<unknown>;

export function makeFetchJson(baseUrl = ""): FetchJson {
  return async (path, params) => {
    const query = params ? `?${new URLSearchParams(params)}` : "";
    const resp = await fetch(`${baseUrl}${path}${query}`);
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    if (!resp.ok) {
      const err = (body ?? {}) as { error?: string; code?: string };
      throw new ApiError(resp.status, err.error ?? `HTTP ${resp.status}`, err.code);
    }
    return body;
  };
}

export class ApiClient {
  constructor(private fetchJson: FetchJson) {}

  health(): Promise<HealthPayload> {
    return this.fetchJson("/api/health") as Promise<HealthPayload>;
  }

  stats(term: string): Promise<StatsPayload> {
    return this.fetchJson("/api/stats", { term }) as Promise<StatsPayload>;
  }

  summary(term: string, community: 1 | 2): Promise<GenerationPayload> {
    return this.fetchJson("/api/summary", {
      term,
      community: String(community),
    }) as Promise<GenerationPayload>;
  }

  definition(term: string, community: 1 | 2): Promise<GenerationPayload> {
    return this.fetchJson("/api/definition", {
      term,
      community: String(community),
    }) as Promise<GenerationPayload>;
  }

  alternatives(term: string): Promise<AlternativesPayload> {
    return this.fetchJson("/api/alternatives", { term }) as Promise<AlternativesPayload>;
  }

  scatter(term: string): Promise<ScatterApiPayload> {
    return this.fetchJson("/api/scatter", { term }) as Promise<ScatterApiPayload>;
  }

  samples(term: string, community: 1 | 2): Promise<SamplesPayload> {
    return this.fetchJson("/api/samples", {
      term,
      community: String(community),
    }) as Promise<SamplesPayload>;
  }

  curated(): Promise<CuratedPayload> {
    return this.fetchJson("/api/curated") as Promise<CuratedPayload>;
  }
}
