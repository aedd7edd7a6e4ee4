/**
 * Thin typed client for the matching service's JSON HTTP API.
 *
 * The UI performs no scoring of its own; everything shown comes straight
 * from these endpoints, in the order the service returns it.
 */

export interface Match {
  rank: number;
  doc_id: string;
  position: number;
  date: string | null;
  fast_score: number;
  rerank_score: number | null;
  missing_parse: boolean;
  sentence: string;
  context_before: string | null;
  context_after: string | null;
}

export interface Measurement {
  bin_start: string[];
  counts: number[];
  undated_matches: number;
  query?: string;
}

export interface Rating {
  rater: string;
  query: string;
  doc_id: string;
  position: number;
  score: number;
}

export interface MatchParams {
  k?: number;
  n?: number;
  filter?: "averaging" | "tfidf";
  rerank?: "none" | "lr" | "lstm";
  model?: string;
}

export interface CorpusMeta {
  id: string;
  n_documents: number;
  n_sentences: number;
  parsed: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`${status}: ${detail}`);
  }
}

type Fetch = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, (body as { detail?: string }).detail ?? resp.statusText);
    }
    return body as T;
  }

  listCorpora(): Promise<CorpusMeta[]> {
    return this.request<{ corpora: CorpusMeta[] }>("/corpora").then((b) => b.corpora);
  }

  createQuery(text: string, corpusId: string): Promise<{ id: string; parsed: boolean }> {
    return this.request("/queries", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text, corpus_id: corpusId }),
    });
  }

  getMatches(queryId: string, params: MatchParams = {}, signal?: AbortSignal): Promise<Match[]> {
    const q = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) q.set(key, String(value));
    }
    const suffix = q.toString() ? `?${q.toString()}` : "";
    return this.request<{ matches: Match[] }>(
      `/queries/${encodeURIComponent(queryId)}/matches${suffix}`,
      { signal },
    ).then((b) => b.matches);
  }

  getMeasurement(queryId: string, params: MatchParams = {}): Promise<Measurement> {
    const q = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) q.set(key, String(value));
    }
    const suffix = q.toString() ? `?${q.toString()}` : "";
    return this.request(`/queries/${encodeURIComponent(queryId)}/measurement${suffix}`);
  }

  postRating(rating: Rating): Promise<{ status: string }> {
    return this.request("/ratings", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(rating),
    });
  }

  getRatings(): Promise<Rating[]> {
    return this.request<{ ratings: Rating[] }>("/ratings").then((b) => b.ratings);
  }

  getAlpha(): Promise<number> {
    return this.request<{ alpha: number }>("/ratings/alpha").then((b) => b.alpha);
  }

  listModels(): Promise<{ name: string; kind: string | null }[]> {
    return this.request<{ models: { name: string; kind: string | null }[] }>("/models").then(
      (b) => b.models,
    );
  }
}
