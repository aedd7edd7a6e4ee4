/**
 * Query session state: one query, one chosen pipeline configuration, at
 * most one in-flight match request (a new run cancels the previous one).
 */

import { ApiClient, ApiError, Match, MatchParams } from "./api.js";

export interface SessionConfig {
  filter: "averaging" | "tfidf";
  rerank: "none" | "lr" | "lstm";
  k: number;
  n: number;
}

export function validateConfig(config: SessionConfig): string | null {
  if (config.k < 1) return "k must be at least 1";
  if (config.n < 1) return "n must be at least 1";
  if (config.n > config.k) return "n must not exceed k";
  return null;
}

export class QuerySession {
  queryId: string | null = null;
  matches: Match[] = [];
  error: string | null = null;
  private inFlight: AbortController | null = null;

  constructor(
    private api: ApiClient,
    public config: SessionConfig = { filter: "averaging", rerank: "none", k: 250, n: 25 },
  ) {}

  async submit(text: string, corpusId: string): Promise<void> {
    const problem = validateConfig(this.config);
    if (problem) {
      this.error = problem;
      return;
    }
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    this.error = null;
    try {
      const { id } = await this.api.createQuery(text, corpusId);
      this.queryId = id;
      this.matches = await this.api.getMatches(id, this.params(), controller.signal);
    } catch (err) {
      // a canceled request is not an error; anything else clears the view
      if (err instanceof DOMException && err.name === "AbortError") return;
      this.matches = [];
      this.error = err instanceof ApiError ? err.message : String(err);
    } finally {
      if (this.inFlight === controller) this.inFlight = null;
    }
  }

  params(): MatchParams {
    return {
      k: this.config.k,
      n: this.config.n,
      filter: this.config.filter,
      rerank: this.config.rerank,
    };
  }
}

/** A service failure renders as a banner instead of a partial result list. */
export function renderErrorBanner(container: HTMLElement, message: string): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const banner = doc.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  container.appendChild(banner);
}
