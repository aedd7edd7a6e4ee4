/**
 * Match list view: one card per ranked match, candidate sentence bolded
 * between its context sentences, with a 1-5 rating widget per card.
 */

import { Match, Rating } from "./api.js";

/** Rating guidance, shown for the hovered/focused score button. */
export const RATING_GUIDANCE: Record<number, string> = {
  1: "The candidate sentence is completely unrelated to the idea sentence.",
  2: "The candidate sentence is tangentially related to the idea sentence.",
  3: "The candidate sentence is related to but does not adequately express the idea sentence.",
  4: "The candidate sentence almost expresses the idea sentence.",
  5: "The candidate sentence expresses the idea sentence in its entirety.",
};

export const MISSING_CONTEXT_PLACEHOLDER = "(no adjacent sentence)";

export interface MatchListOptions {
  queryId: string;
  rater: string;
  onRate: (rating: Rating) => void;
}

function scoreLine(match: Match): string {
  const parts = [`fast ${match.fast_score.toFixed(4)}`];
  if (match.rerank_score !== null) parts.push(`rerank ${match.rerank_score.toFixed(4)}`);
  if (match.missing_parse) parts.push("no parse");
  return parts.join(" · ");
}

function contextDiv(doc: Document, text: string | null): HTMLElement {
  const div = doc.createElement("div");
  div.className = text === null ? "context context-missing" : "context";
  div.textContent = text ?? MISSING_CONTEXT_PLACEHOLDER;
  return div;
}

function ratingWidget(doc: Document, match: Match, opts: MatchListOptions): HTMLElement {
  const wrap = doc.createElement("div");
  wrap.className = "rating";
  const guidance = doc.createElement("div");
  guidance.className = "rating-guidance";
  for (let score = 1; score <= 5; score++) {
    const btn = doc.createElement("button");
    btn.className = "rating-button";
    btn.textContent = String(score);
    btn.dataset.score = String(score);
    const show = () => {
      guidance.textContent = RATING_GUIDANCE[score];
    };
    btn.addEventListener("mouseenter", show);
    btn.addEventListener("focus", show);
    btn.addEventListener("click", () => {
      wrap.querySelectorAll(".rating-button").forEach((b) => b.classList.remove("selected"));
      btn.classList.add("selected");
      opts.onRate({
        rater: opts.rater,
        query: opts.queryId,
        doc_id: match.doc_id,
        position: match.position,
        score,
      });
    });
    wrap.appendChild(btn);
  }
  wrap.appendChild(guidance);
  return wrap;
}

export function renderMatches(
  container: HTMLElement,
  matches: Match[],
  opts: MatchListOptions,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const match of matches) {
    const card = doc.createElement("article");
    card.className = "match-card";
    card.dataset.rank = String(match.rank);
    card.dataset.doc = match.doc_id;
    card.dataset.position = String(match.position);

    const header = doc.createElement("header");
    header.textContent =
      `#${match.rank} · ${match.doc_id}:${match.position} · ` +
      `${match.date ?? "undated"} · ${scoreLine(match)}`;
    card.appendChild(header);

    card.appendChild(contextDiv(doc, match.context_before));
    const candidate = doc.createElement("strong");
    candidate.className = "candidate";
    candidate.textContent = match.sentence;
    card.appendChild(candidate);
    card.appendChild(contextDiv(doc, match.context_after));

    card.appendChild(ratingWidget(doc, match, opts));
    container.appendChild(card);
  }
}

/** Mark already-recorded ratings as selected so a reload shows them. */
export function applyRecordedRatings(container: HTMLElement, ratings: Rating[], queryId: string): void {
  for (const rating of ratings) {
    if (rating.query !== queryId) continue;
    const card = container.querySelector(
      `.match-card[data-doc="${rating.doc_id}"][data-position="${rating.position}"]`,
    );
    if (!card) continue;
    card.querySelectorAll(".rating-button").forEach((b) => b.classList.remove("selected"));
    const btn = card.querySelector(`.rating-button[data-score="${rating.score}"]`);
    btn?.classList.add("selected");
  }
}
