/**
 * Side-by-side comparison of two pipeline configurations for one query,
 * e.g. averaging+none against averaging+lstm.
 */

import { ApiClient, Match, MatchParams } from "./api.js";
import { renderMatches, MatchListOptions } from "./matches.js";

export interface ComparisonColumn {
  label: string;
  params: MatchParams;
}

export async function renderComparison(
  container: HTMLElement,
  api: ApiClient,
  queryId: string,
  left: ComparisonColumn,
  right: ComparisonColumn,
  opts: MatchListOptions,
): Promise<{ left: Match[]; right: Match[] }> {
  const [leftMatches, rightMatches] = await Promise.all([
    api.getMatches(queryId, left.params),
    api.getMatches(queryId, right.params),
  ]);

  const doc = container.ownerDocument;
  container.replaceChildren();
  const columns: [ComparisonColumn, Match[]][] = [
    [left, leftMatches],
    [right, rightMatches],
  ];
  for (const [column, matches] of columns) {
    const section = doc.createElement("section");
    section.className = "compare-column";
    const heading = doc.createElement("h3");
    heading.textContent = column.label;
    section.appendChild(heading);
    const list = doc.createElement("div");
    list.className = "compare-matches";
    renderMatches(list, matches, opts);
    section.appendChild(list);
    container.appendChild(section);
  }
  return { left: leftMatches, right: rightMatches };
}
