/* Topic scatterplot: cluster-colored markers, community-shaped outlines,
 * hover tooltips with the original text, and per-community visibility
 * toggles that never refetch.
 */

import type { ScatterApiPayload } from "../api.js";
import { clusterColor, type Palette } from "../palette.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const MARKER_R = 0.035;

export interface ScatterController {
  highlight(docIds: Set<string>): number;
  clearHighlight(): void;
  setCommunityVisible(slot: 1 | 2, visible: boolean): void;
}

export function renderScatter(
  container: HTMLElement,
  payload: ScatterApiPayload,
  names: [string, string],
  palette: Palette,
): ScatterController {
  container.replaceChildren();
  container.classList.add("panel-scatter");

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "-1.15 -1.15 2.3 2.3");
  svg.setAttribute("class", "scatter-plot");

  const tooltip = document.createElement("div");
  tooltip.className = "scatter-tooltip";
  tooltip.hidden = true;

  const markers: SVGElement[] = [];
  payload.x.forEach((x, i) => {
    const slot = payload.community[i];
    const y = -payload.y[i]; // SVG y grows downward
    let marker: SVGElement;
    if (slot === 1) {
      marker = document.createElementNS(SVG_NS, "circle");
      marker.setAttribute("cx", String(x));
      marker.setAttribute("cy", String(y));
      marker.setAttribute("r", String(MARKER_R));
    } else {
      marker = document.createElementNS(SVG_NS, "rect");
      marker.setAttribute("x", String(x - MARKER_R));
      marker.setAttribute("y", String(y - MARKER_R));
      marker.setAttribute("width", String(2 * MARKER_R));
      marker.setAttribute("height", String(2 * MARKER_R));
    }
    marker.classList.add("marker");
    marker.setAttribute("fill", clusterColor(palette, payload.label[i]));
    marker.setAttribute("stroke", palette.community[slot - 1]);
    marker.setAttribute("stroke-width", "0.008");
    marker.dataset.index = String(i);
    marker.dataset.community = String(slot);
    marker.dataset.cluster = String(payload.label[i]);
    marker.dataset.docId = payload.doc_id[i];
    marker.addEventListener("mouseenter", () => {
      tooltip.hidden = false;
      tooltip.replaceChildren();
      const who = document.createElement("b");
      who.textContent = names[slot - 1];
      const what = document.createElement("span");
      what.textContent = payload.text[i];
      tooltip.append(who, document.createElement("br"), what);
    });
    marker.addEventListener("mouseleave", () => {
      tooltip.hidden = true;
    });
    markers.push(marker);
    svg.appendChild(marker);
  });

  const legend = document.createElement("div");
  legend.className = "scatter-legend";
  const toggles: HTMLInputElement[] = [];
  names.forEach((name, i) => {
    const slot = (i + 1) as 1 | 2;
    const label = document.createElement("label");
    label.style.color = palette.community[i];
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.dataset.testid = `toggle-community-${slot}`;
    box.addEventListener("change", () => setCommunityVisible(slot, box.checked));
    label.append(box, document.createTextNode(` ${name}`));
    legend.appendChild(label);
    toggles.push(box);
  });

  function setCommunityVisible(slot: 1 | 2, visible: boolean): void {
    for (const marker of markers) {
      if (marker.dataset.community === String(slot)) {
        marker.style.display = visible ? "" : "none";
      }
    }
  }

  container.append(legend, svg, tooltip);

  return {
    highlight(docIds: Set<string>): number {
      let hit = 0;
      for (const marker of markers) {
        const match = docIds.has(marker.dataset.docId ?? "");
        marker.classList.toggle("highlight", match);
        if (match) {
          hit += 1;
        }
      }
      return hit;
    },
    clearHighlight(): void {
      for (const marker of markers) {
        marker.classList.remove("highlight");
      }
    },
    setCommunityVisible,
  };
}
