/* Single-page app: one search box drives six independently-loading panels
 * (statistics, summary x2, definition x2, alternatives, scatterplot, sample
 * lists). Responses for superseded searches are discarded via a request
 * generation token; a failing panel never blanks the others.
 */

import {
  ApiClient,
  ApiError,
  type FetchJson,
  type ScatterApiPayload,
  type StatsPayload,
  makeFetchJson,
} from "./api.js";
import { DEFAULT_PALETTE, type Palette } from "./palette.js";
import { renderAlternatives, renderGeneration } from "./panels/generation.js";
import { renderSamples, type SamplesController } from "./panels/samples.js";
import { renderScatter, type ScatterController } from "./panels/scatter.js";
import { renderStatistics } from "./panels/statistics.js";

export interface AppOptions {
  fetchJson?: FetchJson;
  palette?: Palette;
  names?: [string, string];
}

const PANEL_IDS = [
  "statistics",
  "summary-1",
  "summary-2",
  "definition-1",
  "definition-2",
  "alternatives",
  "scatter",
  "samples-1",
  "samples-2",
] as const;

type PanelId = (typeof PANEL_IDS)[number];

export class App {
  readonly root: HTMLElement;
  readonly api: ApiClient;
  readonly palette: Palette;
  names: [string, string];

  private token = 0;
  private input!: HTMLInputElement;
  private hint!: HTMLElement;
  private datalist!: HTMLDataListElement;
  private panels = new Map<PanelId, HTMLElement>();
  private scatterControl: ScatterController | null = null;
  private samplesControl = new Map<1 | 2, SamplesController>();
  private autocompleteLoaded = false;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.api = new ApiClient(options.fetchJson ?? makeFetchJson());
    this.palette = options.palette ?? DEFAULT_PALETTE;
    this.names = options.names ?? ["Community 1", "Community 2"];
    this.buildSkeleton();
  }

  private buildSkeleton(): void {
    this.root.replaceChildren();
    const form = document.createElement("form");
    form.className = "search-form";
    this.input = document.createElement("input");
    this.input.type = "search";
    this.input.placeholder = "type a term, e.g. climate change";
    this.input.setAttribute("list", "curated-terms");
    this.input.dataset.testid = "search-input";
    this.datalist = document.createElement("datalist");
    this.datalist.id = "curated-terms";
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "look up";
    this.hint = document.createElement("span");
    this.hint.className = "search-hint";
    this.hint.dataset.testid = "search-hint";
    form.append(this.input, this.datalist, button, this.hint);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.search(this.input.value);
    });
    this.input.addEventListener("focus", () => void this.loadAutocomplete());
    this.root.appendChild(form);

    const grid = document.createElement("div");
    grid.className = "panel-grid";
    for (const id of PANEL_IDS) {
      const section = document.createElement("section");
      section.className = "panel";
      section.dataset.panel = id;
      grid.appendChild(section);
      this.panels.set(id, section);
    }
    this.root.appendChild(grid);
  }

  panel(id: PanelId): HTMLElement {
    const node = this.panels.get(id);
    if (!node) {
      throw new Error(`no panel ${id}`);
    }
    return node;
  }

  private async loadAutocomplete(): Promise<void> {
    if (this.autocompleteLoaded) {
      return;
    }
    this.autocompleteLoaded = true;
    try {
      const curated = await this.api.curated();
      this.datalist.replaceChildren(
        ...curated.terms.map((entry) => {
          const option = document.createElement("option");
          option.value = entry.term;
          return option;
        }),
      );
    } catch {
      // autocomplete is best-effort; a 404 just means nothing is curated yet
    }
  }

  private setLoading(id: PanelId): void {
    const node = this.panel(id);
    node.replaceChildren();
    const status = document.createElement("p");
    status.className = "panel-status loading";
    status.textContent = "loading…";
    node.appendChild(status);
  }

  private setError(id: PanelId, error: unknown, retry: () => void): void {
    const node = this.panel(id);
    node.replaceChildren();
    const status = document.createElement("p");
    status.className = "panel-status error";
    if (error instanceof ApiError && error.status === 422) {
      status.classList.remove("error");
      status.classList.add("empty");
      status.textContent = "insufficient data";
      node.appendChild(status);
      return;
    }
    status.textContent =
      error instanceof ApiError ? `error: ${error.message}` : "error: request failed";
    const button = document.createElement("button");
    button.type = "button";
    button.className = "retry";
    button.textContent = "retry";
    button.addEventListener("click", retry);
    node.append(status, button);
  }

  /** Run one panel's fetch+render, isolated from every other panel. */
  private panelTask<T>(
    id: PanelId,
    token: number,
    fetcher: () => Promise<T>,
    render: (payload: T) => void,
  ): Promise<void> {
    this.setLoading(id);
    const attempt = async (): Promise<void> => {
      try {
        const payload = await fetcher();
        if (token !== this.token) {
          return; // superseded by a newer search
        }
        render(payload);
      } catch (error) {
        if (token !== this.token) {
          return;
        }
        this.setError(id, error, () => void attempt());
      }
    };
    return attempt();
  }

  highlightProvenance(docIds: string[], slot: 1 | 2 | null): void {
    const wanted = new Set(docIds);
    for (const [sampleSlot, control] of this.samplesControl) {
      if (slot === null || sampleSlot === slot) {
        control.highlight(wanted);
      } else {
        control.clearHighlight();
      }
    }
    this.scatterControl?.highlight(wanted);
  }

  async search(rawTerm: string): Promise<void> {
    const term = rawTerm.trim();
    if (!term) {
      this.hint.textContent = "enter a term first";
      return;
    }
    this.hint.textContent = "";
    const token = ++this.token;
    this.scatterControl = null;
    this.samplesControl.clear();

    const onProvenance = (ids: string[], slot: 1 | 2 | null) =>
      this.highlightProvenance(ids, slot);

    const tasks: Promise<void>[] = [
      // statistics first: it answers fastest and anchors the page
      this.panelTask(
        "statistics",
        token,
        () => this.api.stats(term),
        (stats: StatsPayload) => {
          this.names = stats.communities;
          renderStatistics(this.panel("statistics"), stats, this.palette);
        },
      ),
    ];

    for (const slot of [1, 2] as const) {
      tasks.push(
        this.panelTask(
          `summary-${slot}` as PanelId,
          token,
          () => this.api.summary(term, slot),
          (payload) =>
            renderGeneration(this.panel(`summary-${slot}` as PanelId), payload, this.palette, onProvenance),
        ),
        this.panelTask(
          `definition-${slot}` as PanelId,
          token,
          () => this.api.definition(term, slot),
          (payload) =>
            renderGeneration(this.panel(`definition-${slot}` as PanelId), payload, this.palette, onProvenance),
        ),
        this.panelTask(
          `samples-${slot}` as PanelId,
          token,
          () => this.api.samples(term, slot),
          (payload) => {
            const control = renderSamples(this.panel(`samples-${slot}` as PanelId), payload, this.palette);
            this.samplesControl.set(slot, control);
          },
        ),
      );
    }

    tasks.push(
      this.panelTask(
        "alternatives",
        token,
        () => this.api.alternatives(term),
        (payload) => renderAlternatives(this.panel("alternatives"), payload, onProvenance),
      ),
      this.panelTask(
        "scatter",
        token,
        () => this.api.scatter(term),
        (payload: ScatterApiPayload) => {
          this.scatterControl = renderScatter(
            this.panel("scatter"),
            payload,
            this.names,
            this.palette,
          );
        },
      ),
    );

    await Promise.all(tasks);
  }
}

export function createApp(root: HTMLElement, options: AppOptions = {}): App {
  return new App(root, options);
}
