/**
 * Quarterly measurement histogram: one bar per quarter, empty quarters
 * rendered at zero height, undated matches reported in a caption.
 */

import { Measurement } from "./api.js";

export const EMPTY_PLACEHOLDER = "no dated matches";

export function renderMeasurement(container: HTMLElement, series: Measurement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  if (series.bin_start.length === 0) {
    const placeholder = doc.createElement("div");
    placeholder.className = "histogram-empty";
    placeholder.textContent = EMPTY_PLACEHOLDER;
    container.appendChild(placeholder);
    if (series.undated_matches > 0) {
      container.appendChild(undatedCaption(doc, series.undated_matches));
    }
    return;
  }

  const maxCount = Math.max(...series.counts, 1);
  const chart = doc.createElement("div");
  chart.className = "histogram";
  series.bin_start.forEach((quarter, i) => {
    const count = series.counts[i];
    const bar = doc.createElement("div");
    bar.className = "bar";
    bar.dataset.quarter = quarter;
    bar.dataset.count = String(count);
    // zero counts keep their slot so the quarter axis stays contiguous
    bar.style.height = `${(count / maxCount) * 100}%`;
    bar.title = `${quarter}: ${count}`;
    chart.appendChild(bar);
  });
  container.appendChild(chart);
  if (series.undated_matches > 0) {
    container.appendChild(undatedCaption(doc, series.undated_matches));
  }
}

function undatedCaption(doc: Document, undated: number): HTMLElement {
  const caption = doc.createElement("div");
  caption.className = "histogram-undated";
  caption.textContent = `${undated} undated match${undated === 1 ? "" : "es"} not shown`;
  return caption;
}
