/* Statistics panel: per-community table, share pie, comparative coloring.
 * Every number shown comes straight from the stats payload.
 */

import type { StatsPayload } from "../api.js";
import { formatCount, formatRate, formatSentiment, formatShare } from "../format.js";
import type { Palette } from "../palette.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function winnerColor(
  winner: number | "tie" | null,
  slot: number,
  palette: Palette,
): string {
  if (winner === null || winner === "tie") {
    return palette.neutral;
  }
  return winner === slot ? palette.community[slot - 1] : palette.neutral;
}

function pieSlicePath(startFrac: number, endFrac: number, r = 50): string {
  const tau = Math.PI * 2;
  const a0 = startFrac * tau - Math.PI / 2;
  const a1 = endFrac * tau - Math.PI / 2;
  const x0 = r + r * Math.cos(a0);
  const y0 = r + r * Math.sin(a0);
  const x1 = r + r * Math.cos(a1);
  const y1 = r + r * Math.sin(a1);
  const large = endFrac - startFrac > 0.5 ? 1 : 0;
  return `M ${r} ${r} L ${x0} ${y0} A ${r} ${r} 0 ${large} 1 ${x1} ${y1} Z`;
}

function renderPie(shares: [number, number], palette: Palette): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 100 100");
  svg.setAttribute("class", "share-pie");
  svg.setAttribute("role", "img");
  shares.forEach((share, i) => {
    if (share <= 0) {
      return;
    }
    let node: SVGElement;
    if (share >= 1) {
      node = document.createElementNS(SVG_NS, "circle");
      node.setAttribute("cx", "50");
      node.setAttribute("cy", "50");
      node.setAttribute("r", "50");
    } else {
      node = document.createElementNS(SVG_NS, "path");
      const start = i === 0 ? 0 : shares[0];
      node.setAttribute("d", pieSlicePath(start, start + share));
    }
    node.setAttribute("fill", palette.community[i]);
    node.setAttribute("data-testid", `pie-slice-${i + 1}`);
    node.setAttribute("data-share", String(share));
    svg.appendChild(node);
  });
  return svg;
}

export function renderStatistics(
  container: HTMLElement,
  stats: StatsPayload,
  palette: Palette,
): void {
  container.replaceChildren();
  container.classList.add("panel-statistics");

  const table = document.createElement("table");
  table.className = "stats-table";
  const head = table.createTHead().insertRow();
  for (const text of ["", "Matching posts", "Matches per 1,000", "Share", "Sentiment"]) {
    const cell = document.createElement("th");
    cell.textContent = text;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  stats.communities.forEach((name, i) => {
    const slot = i + 1;
    const row = body.insertRow();
    const nameCell = row.insertCell();
    nameCell.textContent = name;
    nameCell.style.color = palette.community[i];

    const countCell = row.insertCell();
    countCell.textContent = formatCount(stats.doc_count[i]);
    countCell.dataset.testid = `stats-count-${slot}`;

    const rateCell = row.insertCell();
    rateCell.textContent = formatRate(stats.rate_per_k[i]);
    rateCell.dataset.testid = `stats-rate-${slot}`;
    rateCell.style.color = winnerColor(stats.comparative.higher_rate, slot, palette);

    const shareCell = row.insertCell();
    shareCell.textContent = stats.share === null ? "—" : formatShare(stats.share[i]);
    shareCell.dataset.testid = `stats-share-${slot}`;

    const sentCell = row.insertCell();
    sentCell.textContent = formatSentiment(stats.sentiment_mean[i]);
    sentCell.dataset.testid = `stats-sent-${slot}`;
    sentCell.style.color = winnerColor(stats.comparative.higher_sentiment, slot, palette);
  });
  container.appendChild(table);

  if (stats.share !== null) {
    container.appendChild(renderPie(stats.share, palette));
  } else {
    const empty = document.createElement("p");
    empty.className = "pie-empty";
    empty.dataset.testid = "pie-empty";
    empty.textContent = "no matching posts";
    container.appendChild(empty);
  }
}
