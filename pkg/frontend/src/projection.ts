/**
 * Pixel <-> geo transforms, kept numerically identical to the server's
 * equirectangular projection (a contract test pins the agreement to 1 px).
 * Centered pixel coordinates: origin at the viewport center, +y north.
 */

import type { GeoPointDoc, Viewport } from "./types";

const DEG = Math.PI / 180;

export function pixelToGeo(x: number, y: number, ref: Viewport): GeoPointDoc {
  if (Math.abs(ref.gamma) >= 90) {
    throw new Error("viewport centered on a pole");
  }
  const cosGamma = Math.cos(ref.gamma * DEG);
  let lat = y * ref.scale + ref.gamma;
  let lon = (x * ref.scale) / cosGamma + ref.theta;
  lat = Math.min(90, Math.max(-90, lat));
  if (lon <= -180 || lon > 180) {
    lon = ((((lon + 180) % 360) + 360) % 360 || 360) - 180;
  }
  return { lat, lon };
}

export function geoToPixel(p: GeoPointDoc, ref: Viewport): { x: number; y: number } {
  if (Math.abs(ref.gamma) >= 90) {
    throw new Error("viewport centered on a pole");
  }
  const cosGamma = Math.cos(ref.gamma * DEG);
  return {
    x: ((p.lon - ref.theta) * cosGamma) / ref.scale,
    y: (p.lat - ref.gamma) / ref.scale,
  };
}

/**
 * Degrees-per-pixel for a web-mercator-style zoom level: the equator spans
 * 256 * 2^zoom pixels, so one pixel covers 360 / (256 * 2^zoom) degrees of
 * longitude at the viewport center latitude (equirectangular locally).
 */
export function zoomToScale(zoom: number, gamma: number): number {
  return (360 / (256 * 2 ** zoom)) * Math.cos(gamma * DEG);
}
