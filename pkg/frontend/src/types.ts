/** Shared document shapes exchanged with the session service. */

export interface Viewport {
  gamma: number; // latitude of the viewport center, degrees
  theta: number; // longitude of the viewport center, degrees
  scale: number; // degrees per pixel
}

export interface GeoPointDoc {
  lat: number;
  lon: number;
}

export interface MoveSample {
  x: number; // centered pixels, +x east
  y: number; // centered pixels, +y north
  t: number; // epoch milliseconds
}

export interface IdrDoc {
  id: number;
  source_segments: number[];
  vertices_px: [number, number][];
  vertices_geo: GeoPointDoc[];
  area_px2: number;
}

export interface HighlightPointDoc {
  id: number | string;
  lat: number;
  lon: number;
  similarity: number;
  attributes: Record<string, unknown>;
}

export interface FacetDoc {
  attribute: string;
  value: unknown;
  weight: number;
  raw_count: number;
}

export interface PipelineResultDoc {
  session_id?: string;
  computed_at: number;
  regions: { per_segment: number[]; total: number };
  idrs: { computed_at: number; count: number; idrs: IdrDoc[] };
  matches: {
    per_idr: Record<string, (number | string)[]>;
    matched_total: number;
    coverage_pct: number;
  };
  feedback: { total_raw: number; facets: FacetDoc[] };
  highlights: {
    anchor: number | string | null;
    cold_start: boolean;
    achieved_diversity_m: number;
    normalized_diversity: number | null;
    swaps: number;
    points: HighlightPointDoc[];
  };
  warnings: string[];
  n_points: number;
}

export interface DatasetInfo {
  dataset_id: string;
  n_points: number;
  bbox: { min_lat: number; min_lon: number; max_lat: number; max_lon: number };
  attributes: { name: string; kind: string; n_facets: number }[];
}

export interface DatasetPoint {
  id: number | string;
  lat: number;
  lon: number;
  attributes: Record<string, unknown>;
}
