/** Browser wiring: DOM in, API calls out.
 *
 * Rendering is a pure function of the last view document, and at most
 * one mutation is in flight (controls are disabled while pending),
 * mirroring the server's conflict answer for concurrent mutations.
 */

import { ApiError, ExplorationApi } from "./api.js";
import { describeReport, layoutColumns, renderModel } from "./model.js";
import { indexResources, searchResources, type ResourceEntry } from "./search.js";
import type { DatasetInfo, ViewDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

class App {
  private api = new ExplorationApi("");
  private dataset: DatasetInfo | null = null;
  private resources: ResourceEntry[] = [];
  private sessionId: string | null = null;
  private lastView: ViewDoc | null = null;
  private pending = false;

  mount(): void {
    byId<HTMLButtonElement>("upload-btn").addEventListener("click", () => this.upload());
    byId<HTMLButtonElement>("start-btn").addEventListener("click", () => this.start());
    byId<HTMLButtonElement>("rollup-btn").addEventListener("click", () => {
      void this.mutate(() => this.api.rollup(this.sessionId!));
    });
    byId<HTMLButtonElement>("reshape-degree-btn").addEventListener("click", () => {
      void this.adapt({ degree: Number(byId<HTMLInputElement>("reshape-degree").value) });
    });
    byId<HTMLButtonElement>("reshape-leaves-btn").addEventListener("click", () => {
      void this.adapt({ leaves: Number(byId<HTMLInputElement>("reshape-leaves").value) });
    });
    byId<HTMLInputElement>("res-query").addEventListener("input", () => this.suggest());
    for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=scenario]")) {
      radio.addEventListener("change", () => this.scenarioChanged());
    }
    this.scenarioChanged();
    this.setPending(false);
  }

  private status(text: string, isError = false): void {
    const box = byId<HTMLElement>("status");
    box.textContent = text;
    box.className = isError ? "status error" : "status";
  }

  private setPending(pending: boolean): void {
    this.pending = pending;
    for (const button of document.querySelectorAll<HTMLButtonElement>("button")) {
      button.disabled = pending;
    }
    byId<HTMLButtonElement>("rollup-btn").disabled = pending || !this.sessionId;
  }

  private scenario(): "BSC" | "RES" | "RAN" {
    const checked = document.querySelector<HTMLInputElement>("input[name=scenario]:checked");
    return (checked?.value as "BSC" | "RES" | "RAN") ?? "BSC";
  }

  private scenarioChanged(): void {
    const scenario = this.scenario();
    byId<HTMLElement>("res-controls").hidden = scenario !== "RES";
    byId<HTMLElement>("ran-controls").hidden = scenario !== "RAN";
  }

  private async upload(): Promise<void> {
    const input = byId<HTMLInputElement>("file-input");
    const file = input.files?.[0];
    if (!file) {
      this.status("choose a file first", true);
      return;
    }
    const format = byId<HTMLSelectElement>("format-select").value as "ntriples" | "csv";
    const predicate = byId<HTMLInputElement>("predicate-input").value.trim() || undefined;
    this.setPending(true);
    try {
      const text = await file.text();
      this.dataset = await this.api.uploadDataset(file.name, text, format, predicate);
      this.resources = indexResources(text, format);
      this.status(
        `dataset ${this.dataset.dataset_id}: ${this.dataset.size} ${this.dataset.kind} objects ` +
          `in [${this.dataset.minv}, ${this.dataset.maxv}]`,
      );
      const lo = byId<HTMLInputElement>("ran-lower");
      const hi = byId<HTMLInputElement>("ran-upper");
      lo.min = hi.min = String(this.dataset.minv);
      lo.max = hi.max = String(this.dataset.maxv);
      lo.value = String(this.dataset.minv);
      hi.value = String(this.dataset.maxv);
    } catch (error) {
      this.status(this.explain(error), true);
    } finally {
      this.setPending(false);
    }
  }

  private suggest(): void {
    const query = byId<HTMLInputElement>("res-query").value;
    const list = byId<HTMLDataListElement>("res-options");
    list.replaceChildren();
    for (const hit of searchResources(this.resources, query)) {
      const option = document.createElement("option");
      option.value = hit.subject;
      option.label = `${hit.subject} = ${hit.value}`;
      list.appendChild(option);
    }
  }

  private sessionRequest(): SessionRequestShape | null {
    if (!this.dataset) {
      this.status("upload a dataset first", true);
      return null;
    }
    const request: SessionRequestShape = {
      dataset_id: this.dataset.dataset_id,
      scenario: this.scenario(),
      variant: byId<HTMLSelectElement>("variant-select").value as "C" | "R",
      incremental: byId<HTMLInputElement>("incremental-check").checked,
    };
    const leaves = byId<HTMLInputElement>("leaves-input").value.trim();
    const degree = byId<HTMLInputElement>("degree-input").value.trim();
    if (leaves && degree) {
      request.leaves = Number(leaves);
      request.degree = Number(degree);
    }
    if (request.scenario === "RES") {
      request.resource = byId<HTMLInputElement>("res-query").value.trim();
    }
    if (request.scenario === "RAN") {
      request.range = [
        Number(byId<HTMLInputElement>("ran-lower").value),
        Number(byId<HTMLInputElement>("ran-upper").value),
      ];
    }
    return request;
  }

  private async start(): Promise<void> {
    const request = this.sessionRequest();
    if (!request) return;
    this.setPending(true);
    try {
      const response = await this.api.createSession(request);
      this.sessionId = response.session_id;
      this.render(response.view);
      this.status(`session ${response.session_id} started`);
    } catch (error) {
      this.status(this.explain(error), true);
    } finally {
      this.setPending(false);
    }
  }

  private async mutate(call: () => Promise<ViewDoc>): Promise<void> {
    if (!this.sessionId || this.pending) return;
    this.setPending(true);
    try {
      this.render(await call());
    } catch (error) {
      this.status(this.explain(error), true);
    } finally {
      this.setPending(false);
    }
  }

  private async adapt(change: { degree?: number; leaves?: number }): Promise<void> {
    if (!this.sessionId || this.pending) return;
    this.setPending(true);
    try {
      const response = await this.api.adapt(this.sessionId, change);
      const box = byId<HTMLElement>("report-box");
      box.replaceChildren(
        ...describeReport(response.adaptation_report).map((line) => {
          const p = document.createElement("p");
          p.textContent = line;
          return p;
        }),
      );
      this.render(response.view);
    } catch (error) {
      this.status(this.explain(error), true);
    } finally {
      this.setPending(false);
    }
  }

  /** Jump to breadcrumb depth k by rolling up the difference, serially. */
  private async jumpTo(depth: number): Promise<void> {
    if (!this.sessionId || !this.lastView || this.pending) return;
    let steps = this.lastView.breadcrumb.length - 1 - depth;
    if (this.lastView.kind === "objects") steps += 1;
    this.setPending(true);
    try {
      let view = this.lastView;
      for (let i = 0; i < steps; i += 1) {
        view = await this.api.rollup(this.sessionId);
      }
      this.render(view);
    } catch (error) {
      this.status(this.explain(error), true);
    } finally {
      this.setPending(false);
    }
  }

  private explain(error: unknown): string {
    if (error instanceof ApiError) return `server said ${error.status}: ${error.message}`;
    return String(error);
  }

  private render(view: ViewDoc): void {
    this.lastView = view;
    const model = renderModel(view);

    byId<HTMLElement>("counters-badge").textContent = model.countersLine;

    const crumbs = byId<HTMLElement>("breadcrumb");
    crumbs.replaceChildren(
      ...model.breadcrumb.map((label, depth) => {
        const link = document.createElement("a");
        link.textContent = label;
        link.href = "#";
        link.addEventListener("click", (event) => {
          event.preventDefault();
          void this.jumpTo(depth);
        });
        return link;
      }),
    );

    const svg = byId<HTMLElement>("chart") as unknown as SVGSVGElement;
    const width = svg.clientWidth || 900;
    const height = svg.clientHeight || 360;
    svg.replaceChildren();
    const tooltip = byId<HTMLElement>("tooltip");
    for (const rect of layoutColumns(model, width, height)) {
      const bar = document.createElementNS(SVG_NS, "rect");
      bar.setAttribute("x", String(rect.x));
      bar.setAttribute("y", String(rect.y));
      bar.setAttribute("width", String(rect.width));
      bar.setAttribute("height", String(rect.height));
      bar.setAttribute("class", model.mode === "groups" ? "bar group" : "bar object");
      bar.addEventListener("mouseenter", () => {
        tooltip.textContent = rect.column.tooltip;
      });
      if (model.mode === "groups" && rect.column.nodeId !== undefined) {
        const nodeId = rect.column.nodeId;
        bar.addEventListener("click", () => {
          void this.mutate(() => this.api.drill(this.sessionId!, nodeId));
        });
      }
      svg.appendChild(bar);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(rect.x + rect.width / 2));
      label.setAttribute("y", String(height - 2));
      label.setAttribute("class", "bar-label");
      label.textContent = rect.column.label;
      svg.appendChild(label);
    }
    byId<HTMLElement>("mode-line").textContent =
      model.mode === "groups"
        ? `${model.columns.length} groups — click a column to drill down`
        : `${model.columns.length} data objects at the leaf level`;
  }
}

interface SessionRequestShape {
  dataset_id: string;
  scenario: "BSC" | "RES" | "RAN";
  variant: "C" | "R";
  incremental: boolean;
  leaves?: number;
  degree?: number;
  resource?: string;
  range?: [number, number];
}

new App().mount();
