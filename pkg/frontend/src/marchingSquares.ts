// Marching squares over a structured grid with masked cells.
// Contours are drawn client-side from the value grid so the user can
// re-level without another service round-trip.

export type Segment = [[number, number], [number, number]];

function interp(
  pLo: [number, number],
  pHi: [number, number],
  vLo: number,
  vHi: number,
  level: number,
): [number, number] {
  const t = vHi === vLo ? 0.5 : (level - vLo) / (vHi - vLo);
  return [pLo[0] + t * (pHi[0] - pLo[0]), pLo[1] + t * (pHi[1] - pLo[1])];
}

const EDGE_TABLE: Record<number, Array<[number, number]>> = {
  1: [[3, 0]], 2: [[0, 1]], 3: [[3, 1]], 4: [[1, 2]],
  6: [[0, 2]], 7: [[3, 2]], 8: [[2, 3]], 9: [[0, 2]],
  11: [[1, 2]], 12: [[1, 3]], 13: [[0, 1]], 14: [[3, 0]],
};

function cellSegments(
  x0: number,
  x1: number,
  y0: number,
  y1: number,
  v0: number,
  v1: number,
  v2: number,
  v3: number,
  level: number,
  out: Segment[],
): void {
  let code = 0;
  if (v0 > level) code |= 1;
  if (v1 > level) code |= 2;
  if (v2 > level) code |= 4;
  if (v3 > level) code |= 8;
  if (code === 0 || code === 15) return;
  const edge = (k: number): [number, number] => {
    switch (k) {
      case 0:
        return interp([x0, y0], [x1, y0], v0, v1, level);
      case 1:
        return interp([x1, y0], [x1, y1], v1, v2, level);
      case 2:
        return interp([x0, y1], [x1, y1], v3, v2, level);
      default:
        return interp([x0, y0], [x0, y1], v0, v3, level);
    }
  };
  let pairs: Array<[number, number]>;
  if (code === 5 || code === 10) {
    const centre = (v0 + v1 + v2 + v3) / 4;
    if (code === 5) {
      pairs = centre <= level ? [[3, 0], [1, 2]] : [[3, 2], [1, 0]];
    } else {
      pairs = centre <= level ? [[0, 1], [2, 3]] : [[0, 3], [2, 1]];
    }
  } else {
    pairs = EDGE_TABLE[code];
  }
  for (const [e0, e1] of pairs) {
    out.push([edge(e0), edge(e1)]);
  }
}

/**
 * Contour segments across many levels in one grid pass. values[i][j] sits
 * at (xs[i], ys[j]); cells touching a masked corner are skipped; the two
 * saddle-ambiguous codes are resolved by the cell-centre average. Levels
 * outside a cell's [min, max] skip that cell, which is what keeps
 * re-leveling interactive on 128x128 grids.
 */
export function marchingSquaresMulti(
  xs: number[],
  ys: number[],
  values: number[][],
  mask: boolean[][],
  levels: number[],
): Segment[][] {
  const out: Segment[][] = levels.map(() => []);
  for (let i = 0; i < xs.length - 1; i++) {
    const rowA = values[i];
    const rowB = values[i + 1];
    const maskA = mask[i];
    const maskB = mask[i + 1];
    for (let j = 0; j < ys.length - 1; j++) {
      if (maskA[j] || maskB[j] || maskA[j + 1] || maskB[j + 1]) continue;
      const v0 = rowA[j];
      const v1 = rowB[j];
      const v2 = rowB[j + 1];
      const v3 = rowA[j + 1];
      const lo = Math.min(v0, v1, v2, v3);
      const hi = Math.max(v0, v1, v2, v3);
      for (let k = 0; k < levels.length; k++) {
        const level = levels[k];
        if (level <= lo || level > hi) continue;
        cellSegments(xs[i], xs[i + 1], ys[j], ys[j + 1], v0, v1, v2, v3, level, out[k]);
      }
    }
  }
  return out;
}

/** Single-level convenience wrapper over the multi-level pass. */
export function marchingSquares(
  xs: number[],
  ys: number[],
  values: number[][],
  mask: boolean[][],
  level: number,
): Segment[] {
  return marchingSquaresMulti(xs, ys, values, mask, [level])[0];
}
