/* Per-community sample lists; generated-text panels highlight their
 * provenance here so readers can see exactly what the model saw.
 */

import type { SamplesPayload } from "../api.js";
import type { Palette } from "../palette.js";

export interface SamplesController {
  highlight(docIds: Set<string>): number;
  clearHighlight(): void;
}

export function renderSamples(
  container: HTMLElement,
  payload: SamplesPayload,
  palette: Palette,
): SamplesController {
  container.replaceChildren();
  container.classList.add("panel-samples");

  const heading = document.createElement("h3");
  heading.textContent = `${payload.name} — ${payload.doc_ids.length} sampled posts`;
  heading.style.color = palette.community[payload.community - 1];
  container.appendChild(heading);

  const list = document.createElement("ol");
  list.className = "sample-list";
  const items: HTMLLIElement[] = [];
  payload.doc_ids.forEach((docId, i) => {
    const item = document.createElement("li");
    item.dataset.docId = docId;
    item.textContent = payload.texts[i];
    item.title = docId;
    list.appendChild(item);
    items.push(item);
  });
  container.appendChild(list);

  return {
    highlight(docIds: Set<string>): number {
      let hit = 0;
      for (const item of items) {
        const match = docIds.has(item.dataset.docId ?? "");
        item.classList.toggle("highlight", match);
        if (match) {
          hit += 1;
        }
      }
      return hit;
    },
    clearHighlight(): void {
      for (const item of items) {
        item.classList.remove("highlight");
      }
    },
  };
}
