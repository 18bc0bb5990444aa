// Pure polar-diagram rendering: payload + view settings -> SVG markup.
// Snapshot-testable; no DOM access in here.

import { marchingSquaresMulti } from "./marchingSquares.js";
import type { PhaseMapPayload } from "./types.js";

export interface ViewSettings {
  size: number;
  levels: number;
}

export const DEFAULT_VIEW: ViewSettings = { size: 640, levels: 13 };

const fmt = (x: number): string => x.toFixed(3);

/** Chart projection: eccentricity is the radius, periapsis argument the angle. */
export function project(
  e: number,
  omega: number,
  eMax: number,
  size: number,
): { x: number; y: number } {
  const half = size / 2;
  const radius = 0.44 * size;
  const r = (radius * e) / Math.max(eMax, 1e-12);
  return { x: half + r * Math.cos(omega), y: half - r * Math.sin(omega) };
}

/** Pixel length of one radial grid cell (marker-placement tolerance unit). */
export function gridCellPx(payload: PhaseMapPayload, size: number): number {
  const eMax = payload.e_grid[payload.e_grid.length - 1];
  const de = payload.e_grid.length > 1 ? payload.e_grid[1] - payload.e_grid[0] : eMax;
  return (0.44 * size * de) / Math.max(eMax, 1e-12);
}

export function renderPolarDiagram(
  payload: PhaseMapPayload,
  view: ViewSettings = DEFAULT_VIEW,
): string {
  const { size, levels } = view;
  const half = size / 2;
  const radius = 0.44 * size;
  const eGrid = payload.e_grid;
  const eMax = Math.max(eGrid[eGrid.length - 1], 1e-12);
  const mask = payload.values.map((row) => row.map((v) => v === null));
  const vals = payload.values.map((row) => row.map((v) => (v === null ? 0 : v)));

  const out: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${size}" height="${size}" ` +
      `viewBox="0 0 ${size} ${size}">`,
    `<rect width="${size}" height="${size}" fill="white"/>`,
  ];

  // infeasible annulus greyed out
  let feasEdge: number | null = null;
  for (let i = 0; i < mask.length; i++) {
    if (mask[i].every(Boolean)) {
      feasEdge = eGrid[i];
      break;
    }
  }
  if (feasEdge !== null) {
    out.push(
      `<circle cx="${fmt(half)}" cy="${fmt(half)}" r="${fmt(radius)}" fill="#d8d8d8"/>`,
      `<circle cx="${fmt(half)}" cy="${fmt(half)}" r="${fmt((radius * feasEdge) / eMax)}" fill="white"/>`,
    );
  }

  // contour levels between the finite extrema; omega axis wraps around
  const finite: number[] = [];
  vals.forEach((row, i) =>
    row.forEach((v, j) => {
      if (!mask[i][j]) finite.push(v);
    }),
  );
  if (finite.length > 0) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of finite) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    const span = hi - lo || 1;
    const wWrapped = [...payload.omega_grid, payload.omega_grid[0] + 2 * Math.PI];
    const valsWrapped = vals.map((row) => [...row, row[0]]);
    const maskWrapped = mask.map((row) => [...row, row[0]]);
    const levelValues = Array.from(
      { length: levels },
      (_, k) => lo + (span * (k + 1)) / (levels + 1),
    );
    const perLevel = marchingSquaresMulti(
      eGrid, wWrapped, valsWrapped, maskWrapped, levelValues,
    );
    for (const segs of perLevel) {
      if (segs.length === 0) continue;
      const parts = segs.map(([[e0, w0], [e1, w1]]) => {
        const p0 = project(e0, w0, eMax, size);
        const p1 = project(e1, w1, eMax, size);
        return `M${fmt(p0.x)} ${fmt(p0.y)}L${fmt(p1.x)} ${fmt(p1.y)}`;
      });
      out.push(
        `<path d="${parts.join("")}" stroke="#3465a4" stroke-width="1" fill="none"/>`,
      );
    }
  }

  out.push(
    `<circle cx="${fmt(half)}" cy="${fmt(half)}" r="${fmt(radius)}" ` +
      `stroke="black" stroke-width="1" fill="none"/>`,
  );

  // impact circle, dashed
  if (payload.e_impact < eMax) {
    out.push(
      `<circle class="impact-circle" cx="${fmt(half)}" cy="${fmt(half)}" ` +
        `r="${fmt((radius * payload.e_impact) / eMax)}" stroke="black" ` +
        `stroke-width="1" stroke-dasharray="6 4" fill="none"/>`,
    );
  }

  // frozen-orbit markers: dot = center, cross = saddle
  for (const fo of payload.frozen) {
    const p = project(fo.e, fo.omega, eMax, size);
    if (fo.classification === "center") {
      out.push(
        `<circle class="frozen-center" cx="${fmt(p.x)}" cy="${fmt(p.y)}" r="4" fill="#cc0000"/>`,
      );
    } else {
      const d = 4.5;
      out.push(
        `<path class="frozen-saddle" d="M${fmt(p.x - d)} ${fmt(p.y - d)}L${fmt(p.x + d)} ` +
          `${fmt(p.y + d)}M${fmt(p.x - d)} ${fmt(p.y + d)}L${fmt(p.x + d)} ${fmt(p.y - d)}" ` +
          `stroke="#cc0000" stroke-width="2"/>`,
      );
    }
  }

  const labels: Array<[string, number]> = [
    ["0", 0],
    ["pi/2", Math.PI / 2],
    ["pi", Math.PI],
    ["-pi/2", -Math.PI / 2],
  ];
  for (const [label, w] of labels) {
    const p = project(eMax * 1.07, w, eMax, size);
    out.push(
      `<text x="${fmt(p.x)}" y="${fmt(p.y)}" font-size="12" text-anchor="middle">${label}</text>`,
    );
  }
  out.push("</svg>");
  return out.join("\n");
}
