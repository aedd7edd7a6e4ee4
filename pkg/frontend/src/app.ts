/**
 * Wires the widgets to a live service. Expects index.html to provide the
 * #query-form, #matches, #histogram, and #error containers.
 */

import { ApiClient } from "./api.js";
import { renderMeasurement } from "./histogram.js";
import { applyRecordedRatings, renderMatches } from "./matches.js";
import { QuerySession, renderErrorBanner } from "./session.js";

export function mount(root: Document, baseUrl = ""): QuerySession {
  const api = new ApiClient(baseUrl);
  const session = new QuerySession(api);

  const form = root.querySelector<HTMLFormElement>("#query-form")!;
  const matchesEl = root.querySelector<HTMLElement>("#matches")!;
  const histogramEl = root.querySelector<HTMLElement>("#histogram")!;
  const errorEl = root.querySelector<HTMLElement>("#error")!;

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const text = String(data.get("query") ?? "");
    const corpus = String(data.get("corpus") ?? "");
    const rater = String(data.get("rater") ?? "anonymous");

    await session.submit(text, corpus);
    if (session.error !== null) {
      renderErrorBanner(errorEl, session.error);
      matchesEl.replaceChildren();
      histogramEl.replaceChildren();
      return;
    }
    errorEl.replaceChildren();
    const queryId = session.queryId!;
    renderMatches(matchesEl, session.matches, {
      queryId,
      rater,
      onRate: (rating) => void api.postRating(rating),
    });
    const [ratings, measurement] = await Promise.all([
      api.getRatings(),
      api.getMeasurement(queryId, session.params()),
    ]);
    applyRecordedRatings(matchesEl, ratings, queryId);
    renderMeasurement(histogramEl, measurement);
  });

  return session;
}
