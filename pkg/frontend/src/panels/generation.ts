/* Generated-text panels (summary, definition, alternatives) with links from
 * each text to the sample ids it was grounded on. Headings show community
 * display names; the underlying prompts never did (enforced server-side).
 */

import type { AlternativesPayload, GenerationPayload } from "../api.js";
import type { Palette } from "../palette.js";

export type ProvenanceHandler = (docIds: string[], slot: 1 | 2 | null) => void;

function provenanceButton(
  docIds: string[],
  slot: 1 | 2 | null,
  onProvenance: ProvenanceHandler,
): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.className = "provenance-link";
  button.textContent = `based on ${docIds.length} posts`;
  button.dataset.provenance = JSON.stringify(docIds);
  button.addEventListener("click", () => onProvenance(docIds, slot));
  return button;
}

export function renderGeneration(
  container: HTMLElement,
  payload: GenerationPayload,
  palette: Palette,
  onProvenance: ProvenanceHandler,
): void {
  container.replaceChildren();
  container.classList.add("panel-generation");

  const heading = document.createElement("h3");
  heading.textContent = payload.name;
  heading.style.color = palette.community[payload.community - 1];
  const text = document.createElement("p");
  text.className = "generated-text";
  text.dataset.testid = `${payload.kind}-text-${payload.community}`;
  text.textContent = payload.text;
  container.append(
    heading,
    text,
    provenanceButton(payload.provenance, payload.community as 1 | 2, onProvenance),
  );
}

export function renderAlternatives(
  container: HTMLElement,
  payload: AlternativesPayload,
  onProvenance: ProvenanceHandler,
): void {
  container.replaceChildren();
  container.classList.add("panel-generation");
  if (!payload.text.trim()) {
    container.hidden = true;
    return;
  }
  container.hidden = false;
  const heading = document.createElement("h3");
  heading.textContent = "Alternative phrasings";
  const text = document.createElement("p");
  text.className = "generated-text";
  text.dataset.testid = "alternatives-text";
  text.textContent = payload.text;
  const both = [...payload.provenance["1"], ...payload.provenance["2"]];
  container.append(heading, text, provenanceButton(both, null, onProvenance));
}
