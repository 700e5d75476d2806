import { beforeEach, describe, expect, it } from "vitest";

import { MapView } from "../src/map";
import { buildOverlay, feedbackRows } from "../src/overlay";
import type { PipelineResultDoc, Viewport } from "../src/types";
import fixtureJson from "./fixtures/pipeline_result.json";

const fixture = fixtureJson as unknown as PipelineResultDoc;

// the viewport the fixture was computed under
const REF: Viewport = { gamma: 48.85564, theta: 2.3527695, scale: 0.00012240249999999618 };

function freshMap(): MapView {
  document.body.innerHTML = "<div id='map'></div>";
  return new MapView(document.getElementById("map")!, REF, 800, 600);
}

describe("overlay model", () => {
  it("builds one polygon per region and one marker per highlight", () => {
    const overlay = buildOverlay(fixture, REF, 800, 600);
    expect(overlay.polygons.length).toBe(fixture.idrs.count);
    expect(overlay.polygons.map((p) => p.label)).toEqual(["IDR1", "IDR2", "IDR3"]);
    expect(overlay.markers.map((m) => String(m.id))).toEqual(
      fixture.highlights.points.map((p) => String(p.id)),
    );
  });

  it("re-projected polygons land where the engine computed them in pixels", () => {
    const overlay = buildOverlay(fixture, REF, 800, 600);
    for (let i = 0; i < overlay.polygons.length; i += 1) {
      const screen = overlay.polygons[i].points;
      const enginePx = fixture.idrs.idrs[i].vertices_px;
      expect(screen.length).toBe(enginePx.length);
      for (let v = 0; v < screen.length; v += 1) {
        expect(Math.abs(screen[v].x - (400 + enginePx[v][0]))).toBeLessThan(1);
        expect(Math.abs(screen[v].y - (300 - enginePx[v][1]))).toBeLessThan(1);
      }
    }
  });

  it("panel rows are the nonzero facets sorted by weight", () => {
    const rows = feedbackRows(fixture);
    const nonzero = fixture.feedback.facets.filter((f) => f.weight > 0);
    expect(rows.length).toBe(nonzero.length);
    for (let i = 1; i < rows.length; i += 1) {
      expect(rows[i - 1].weight).toBeGreaterThanOrEqual(rows[i].weight);
    }
  });
});

describe("map rendering", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders the fixture's polygon count, labels and highlight ids", () => {
    const map = freshMap();
    map.applyResult(fixture);
    const polygons = document.querySelectorAll("polygon.idr-polygon");
    expect(polygons.length).toBe(fixture.idrs.count);
    const labels = Array.from(document.querySelectorAll("text.idr-label"), (n) => n.textContent);
    expect(labels).toEqual(["IDR1", "IDR2", "IDR3"]);
    const ids = Array.from(
      document.querySelectorAll<HTMLElement>(".highlight-marker"),
      (n) => n.dataset.id,
    );
    expect(ids).toEqual(fixture.highlights.points.map((p) => String(p.id)));
    // hover text carries the similarity score and attributes
    const first = document.querySelector<HTMLElement>(".highlight-marker")!;
    expect(first.title).toContain("similarity");
    expect(first.title).toContain("beds");
  });

  it("renders the feedback panel with matched coverage", () => {
    const map = freshMap();
    map.applyResult(fixture);
    const rows = document.querySelectorAll(".facet-table tr");
    expect(rows.length).toBe(feedbackRows(fixture).length);
    expect(document.querySelector(".coverage")!.textContent).toContain("4 matched");
  });

  it("replaces overlays atomically on the next result", () => {
    const map = freshMap();
    map.applyResult(fixture);
    const emptied: PipelineResultDoc = {
      ...fixture,
      idrs: { ...fixture.idrs, count: 0, idrs: [] },
      highlights: { ...fixture.highlights, points: fixture.highlights.points.slice(0, 1) },
    };
    map.applyResult(emptied);
    expect(document.querySelectorAll("polygon.idr-polygon").length).toBe(0);
    const ids = Array.from(
      document.querySelectorAll<HTMLElement>(".highlight-marker"),
      (n) => n.dataset.id,
    );
    // never renders a highlight absent from the latest result
    expect(ids).toEqual([String(fixture.highlights.points[0].id)]);
  });

  it("keeps previous overlays and shows a toast on a malformed document", () => {
    const map = freshMap();
    map.applyResult(fixture);
    const broken = { bogus: true } as unknown as PipelineResultDoc;
    map.applyResult(broken);
    expect(document.querySelectorAll("polygon.idr-polygon").length).toBe(fixture.idrs.count);
    const toast = document.querySelector(".toast")!;
    expect(toast.classList.contains("hidden")).toBe(false);
    expect(map.currentResult).toBe(fixture);
  });

  it("cold-start results show the empty-feedback note", () => {
    const map = freshMap();
    const cold: PipelineResultDoc = {
      ...fixture,
      feedback: { total_raw: 0, facets: [] },
      highlights: { ...fixture.highlights, cold_start: true },
    };
    map.applyResult(cold);
    expect(document.querySelector(".feedback-panel .empty")!.textContent).toContain("cold start");
  });
});
