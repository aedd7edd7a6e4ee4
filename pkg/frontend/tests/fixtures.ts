/** Shared mocked-API fixtures: a 3-match response, the [2,0,1] measurement
 * series, and a fake fetch implementing just enough of the service. */

import { Match, Measurement, Rating } from "../src/api.js";

export const MATCHES: Match[] = [
  {
    rank: 1,
    doc_id: "d1",
    position: 0,
    date: "2011-02-10",
    fast_score: 0.97,
    rerank_score: null,
    missing_parse: false,
    sentence: "Taxes rise fast.",
    context_before: null,
    context_after: "Other filler sentence.",
  },
  {
    rank: 2,
    doc_id: "d2",
    position: 0,
    date: "2011-03-01",
    fast_score: 0.91,
    rerank_score: null,
    missing_parse: false,
    sentence: "Taxes rise again.",
    context_before: null,
    context_after: null,
  },
  {
    rank: 3,
    doc_id: "d3",
    position: 1,
    date: "2011-08-15",
    fast_score: 0.88,
    rerank_score: 0.42,
    missing_parse: false,
    sentence: "Taxes rise slowly.",
    context_before: "An earlier sentence.",
    context_after: "A later sentence.",
  },
];

export const MEASUREMENT: Measurement = {
  bin_start: ["2011-01-01", "2011-04-01", "2011-07-01"],
  counts: [2, 0, 1],
  undated_matches: 0,
};

/**
 * Minimal in-memory service: serves the fixtures above and keeps posted
 * ratings so GET /ratings round-trips.
 */
export function fakeService() {
  const ratings: Rating[] = [];
  const calls: { method: string; url: string }[] = [];

  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({ method, url });

    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });

    if (method === "POST" && url.endsWith("/ratings")) {
      ratings.push(JSON.parse(String(init?.body)) as Rating);
      return respond(201, { status: "recorded" });
    }
    if (method === "GET" && url.endsWith("/ratings")) {
      return respond(200, { ratings });
    }
    if (method === "POST" && url.endsWith("/queries")) {
      return respond(201, { id: "q0001", parsed: false });
    }
    if (url.includes("/matches")) {
      return respond(200, { query: "q0001", matches: MATCHES });
    }
    if (url.includes("/measurement")) {
      return respond(200, { ...MEASUREMENT, query: "q0001" });
    }
    return respond(404, { detail: `no route for ${method} ${url}` });
  }) as typeof fetch;

  return { fetchImpl, ratings, calls };
}
