/**
 * Pure render-model computation: pipeline result documents to screen-space
 * polygons, markers and panel rows. Kept DOM-free so the mapping from server
 * documents to what gets drawn is directly testable.
 */

import { geoToPixel } from "./projection";
import type { FacetDoc, PipelineResultDoc, Viewport } from "./types";

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface PolygonModel {
  id: number;
  label: string; // IDR1..IDRn
  fill: string;
  points: ScreenPoint[];
  labelAt: ScreenPoint;
}

export interface MarkerModel {
  id: number | string;
  x: number;
  y: number;
  similarity: number;
  title: string; // hover text: score plus key attributes
}

export interface OverlayModel {
  polygons: PolygonModel[];
  markers: MarkerModel[];
}

const FILLS = [
  "rgba(231, 111, 81, 0.35)",
  "rgba(42, 157, 143, 0.35)",
  "rgba(233, 196, 106, 0.40)",
  "rgba(69, 123, 157, 0.35)",
  "rgba(181, 101, 167, 0.35)",
];

/** Centered engine pixels (+y north) to canvas coordinates (+y down). */
export function toScreen(px: { x: number; y: number }, width: number, height: number): ScreenPoint {
  return { x: width / 2 + px.x, y: height / 2 - px.y };
}

export function geoToScreen(
  p: { lat: number; lon: number },
  ref: Viewport,
  width: number,
  height: number,
): ScreenPoint {
  return toScreen(geoToPixel(p, ref), width, height);
}

export function buildOverlay(
  doc: PipelineResultDoc,
  ref: Viewport,
  width: number,
  height: number,
): OverlayModel {
  const polygons = doc.idrs.idrs.map((idr, i) => {
    // geo vertices are authoritative so overlays survive viewport changes
    const points = idr.vertices_geo.map((v) => geoToScreen(v, ref, width, height));
    const cx = points.reduce((acc, p) => acc + p.x, 0) / points.length;
    const cy = points.reduce((acc, p) => acc + p.y, 0) / points.length;
    return {
      id: idr.id,
      label: `IDR${i + 1}`,
      fill: FILLS[i % FILLS.length],
      points,
      labelAt: { x: cx, y: cy },
    };
  });
  const markers = doc.highlights.points.map((p) => {
    const attrs = Object.entries(p.attributes)
      .map(([k, v]) => `${k}: ${v}`)
      .join(", ");
    return {
      id: p.id,
      ...geoToScreen(p, ref, width, height),
      similarity: p.similarity,
      title: `#${p.id} similarity ${p.similarity.toFixed(3)} | ${attrs}`,
    };
  });
  return { polygons, markers };
}

export interface FacetRow {
  attribute: string;
  value: string;
  weight: number;
}

/** Nonzero facets sorted by descending weight for the inspection panel. */
export function feedbackRows(doc: PipelineResultDoc): FacetRow[] {
  return doc.feedback.facets
    .filter((f: FacetDoc) => f.weight > 0)
    .sort((a, b) => b.weight - a.weight || a.attribute.localeCompare(b.attribute))
    .map((f) => ({ attribute: f.attribute, value: String(f.value), weight: f.weight }));
}
