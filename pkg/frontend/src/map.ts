/**
 * The map pane: a canvas with the dataset points, an SVG layer for dense
 * region polygons, DOM markers for highlights, and a feedback side panel.
 * Overlays are rebuilt off-DOM and swapped in atomically, so a malformed
 * update can never leave a half-drawn state; the previous overlays stay up
 * and an error toast is shown instead.
 */

import { buildOverlay, feedbackRows, geoToScreen } from "./overlay";
import type { GeoPointDoc, PipelineResultDoc, Viewport } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface MapCallbacks {
  onMove?: (x: number, y: number, t: number) => void; // centered pixels, +y north
}

export class MapView {
  readonly root: HTMLElement;
  private canvas: HTMLCanvasElement;
  private svg: SVGSVGElement;
  private markerLayer: HTMLDivElement;
  private panel: HTMLDivElement;
  private toast: HTMLDivElement;
  private width: number;
  private height: number;
  private viewport: Viewport;
  private points: GeoPointDoc[] = [];
  private lastResult: PipelineResultDoc | null = null;

  constructor(
    container: HTMLElement,
    viewport: Viewport,
    width = 800,
    height = 600,
    callbacks: MapCallbacks = {},
    now: () => number = () => Date.now(),
  ) {
    this.root = container;
    this.width = width;
    this.height = height;
    this.viewport = viewport;

    container.classList.add("map-root");
    this.canvas = document.createElement("canvas");
    this.canvas.width = width;
    this.canvas.height = height;
    this.canvas.className = "map-canvas";
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("class", "map-overlay");
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));
    this.markerLayer = document.createElement("div");
    this.markerLayer.className = "marker-layer";
    this.panel = document.createElement("div");
    this.panel.className = "feedback-panel";
    this.panel.innerHTML = "<h3>Feedback</h3><p class='empty'>no feedback yet</p>";
    this.toast = document.createElement("div");
    this.toast.className = "toast hidden";
    container.append(this.canvas, this.svg, this.markerLayer, this.panel, this.toast);

    container.addEventListener("mousemove", (event: MouseEvent) => {
      if (!callbacks.onMove) return;
      const rect = container.getBoundingClientRect();
      const sx = event.clientX - rect.left;
      const sy = event.clientY - rect.top;
      callbacks.onMove(sx - this.width / 2, this.height / 2 - sy, now());
    });
  }

  setViewport(viewport: Viewport): void {
    this.viewport = viewport;
    this.drawPoints();
    if (this.lastResult) {
      this.applyResult(this.lastResult); // re-project overlays under the new viewport
    }
  }

  setPoints(points: GeoPointDoc[]): void {
    this.points = points;
    this.drawPoints();
  }

  get currentResult(): PipelineResultDoc | null {
    return this.lastResult;
  }

  /** Render a pipeline result; replaces all overlays atomically. */
  applyResult(doc: PipelineResultDoc): void {
    let polygonNodes: SVGElement[];
    let markerNodes: HTMLElement[];
    let panelNode: HTMLElement;
    try {
      const overlay = buildOverlay(doc, this.viewport, this.width, this.height);
      polygonNodes = overlay.polygons.flatMap((poly) => {
        const el = document.createElementNS(SVG_NS, "polygon");
        el.setAttribute("points", poly.points.map((p) => `${p.x},${p.y}`).join(" "));
        el.setAttribute("fill", poly.fill);
        el.setAttribute("stroke", "#333");
        el.setAttribute("data-idr-id", String(poly.id));
        el.setAttribute("class", "idr-polygon");
        const label = document.createElementNS(SVG_NS, "text");
        label.setAttribute("x", String(poly.labelAt.x));
        label.setAttribute("y", String(poly.labelAt.y));
        label.setAttribute("class", "idr-label");
        label.textContent = poly.label;
        return [el, label];
      });
      markerNodes = overlay.markers.map((m) => {
        const el = document.createElement("div");
        el.className = "highlight-marker";
        el.dataset.id = String(m.id);
        el.title = m.title;
        el.style.left = `${m.x}px`;
        el.style.top = `${m.y}px`;
        el.textContent = "*";
        return el;
      });
      panelNode = this.buildPanel(doc);
    } catch (err) {
      this.showToast(`bad pipeline result: ${(err as Error).message}`);
      return; // previous overlays stay in place
    }
    this.svg.replaceChildren(...polygonNodes);
    this.markerLayer.replaceChildren(...markerNodes);
    this.panel.replaceChildren(...Array.from(panelNode.childNodes));
    this.lastResult = doc;
  }

  private buildPanel(doc: PipelineResultDoc): HTMLElement {
    const wrap = document.createElement("div");
    const heading = document.createElement("h3");
    heading.textContent = "Feedback";
    wrap.append(heading);
    const rows = feedbackRows(doc);
    if (!rows.length) {
      const p = document.createElement("p");
      p.className = "empty";
      p.textContent = doc.highlights.cold_start ? "cold start: no feedback yet" : "all weights zero";
      wrap.append(p);
      return wrap;
    }
    const table = document.createElement("table");
    table.className = "facet-table";
    for (const row of rows) {
      const tr = document.createElement("tr");
      tr.dataset.facet = `${row.attribute}=${row.value}`;
      const name = document.createElement("td");
      name.textContent = `${row.attribute}: ${row.value}`;
      const weight = document.createElement("td");
      weight.textContent = row.weight.toFixed(3);
      tr.append(name, weight);
      table.append(tr);
    }
    wrap.append(table);
    const summary = document.createElement("p");
    summary.className = "coverage";
    summary.textContent =
      `${doc.matches.matched_total} matched / coverage ${doc.matches.coverage_pct.toFixed(2)}%`;
    wrap.append(summary);
    return wrap;
  }

  showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.classList.remove("hidden");
    setTimeout(() => this.toast.classList.add("hidden"), 4000);
  }

  private drawPoints(): void {
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = this.canvas.getContext("2d");
    } catch {
      ctx = null; // test environments have no raster canvas; overlays are DOM anyway
    }
    if (!ctx) {
      return;
    }
    ctx.clearRect(0, 0, this.width, this.height);
    ctx.fillStyle = "#8aa";
    for (const p of this.points) {
      const s = geoToScreen(p, this.viewport, this.width, this.height);
      ctx.beginPath();
      ctx.arc(s.x, s.y, 2.5, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}
