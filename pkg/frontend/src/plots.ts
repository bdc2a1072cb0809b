/** Embedding and fitness plots, rendered onto 2-D canvas contexts.
 *
 * The geometry (chart-type choice, class colors, axis scaling, 3-D
 * rotation/projection) is pure and unit-tested; rendering takes any
 * CanvasRenderingContext2D-compatible object, so tests can pass a recorder.
 */

export type ChartKind = "bar-1d" | "scatter-2d" | "scatter-3d" | "table-only";

export function chartKindFor(dimensions: number): ChartKind {
  if (dimensions === 1) return "bar-1d";
  if (dimensions === 2) return "scatter-2d";
  if (dimensions === 3) return "scatter-3d";
  return "table-only";
}

/** Stable, distinguishable palette; cycles past 10 classes. */
const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function classColors(labels: string[]): Map<string, string> {
  const colors = new Map<string, string>();
  for (const label of labels) {
    if (!colors.has(label)) {
      colors.set(label, PALETTE[colors.size % PALETTE.length]);
    }
  }
  return colors;
}

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!isFinite(min)) return { min: 0, max: 1 };
  if (min === max) return { min: min - 0.5, max: max + 0.5 };
  return { min, max };
}

export function scaleTo(value: number, from: Extent, lo: number, hi: number): number {
  return lo + ((value - from.min) / (from.max - from.min)) * (hi - lo);
}

/** Yaw-then-pitch rotation and orthographic projection of 3-D points. */
export function project3d(
  points: number[][],
  yaw: number,
  pitch: number,
): Array<{ x: number; y: number; depth: number }> {
  const cy = Math.cos(yaw), sy = Math.sin(yaw);
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  return points.map(([x, y, z]) => {
    const rx = cy * x + sy * z;
    const rz = -sy * x + cy * z;
    const ry = cp * y - sp * rz;
    const depth = sp * y + cp * rz;
    return { x: rx, y: ry, depth };
  });
}

interface Ctx2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
}

const MARGIN = 28;

export function renderBar1d(
  ctx: Ctx2D,
  width: number,
  height: number,
  embedding: number[][],
  labels: string[],
): void {
  ctx.clearRect(0, 0, width, height);
  const values = embedding.map((row) => row[0]);
  const range = extent(values);
  const colors = classColors(labels);
  const barWidth = Math.max(1, (width - 2 * MARGIN) / values.length);
  const zeroY = scaleTo(Math.max(range.min, 0), range, height - MARGIN, MARGIN);
  values.forEach((value, i) => {
    const x = MARGIN + i * barWidth;
    const y = scaleTo(value, range, height - MARGIN, MARGIN);
    ctx.fillStyle = colors.get(labels[i]) ?? "#444444";
    ctx.fillRect(x, Math.min(y, zeroY), Math.max(1, barWidth - 1), Math.abs(zeroY - y) || 1);
  });
}

export function renderScatter2d(
  ctx: Ctx2D,
  width: number,
  height: number,
  embedding: number[][],
  labels: string[],
): void {
  ctx.clearRect(0, 0, width, height);
  const xs = extent(embedding.map((row) => row[0]));
  const ys = extent(embedding.map((row) => row[1]));
  const colors = classColors(labels);
  embedding.forEach((row, i) => {
    const x = scaleTo(row[0], xs, MARGIN, width - MARGIN);
    const y = scaleTo(row[1], ys, height - MARGIN, MARGIN);
    ctx.fillStyle = colors.get(labels[i]) ?? "#444444";
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
  });
}

export function renderScatter3d(
  ctx: Ctx2D,
  width: number,
  height: number,
  embedding: number[][],
  labels: string[],
  yaw: number,
  pitch: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const projected = project3d(embedding, yaw, pitch);
  const xs = extent(projected.map((p) => p.x));
  const ys = extent(projected.map((p) => p.y));
  const depths = extent(projected.map((p) => p.depth));
  const colors = classColors(labels);
  // far points first so near points draw on top
  const order = projected
    .map((p, i) => ({ ...p, i }))
    .sort((a, b) => a.depth - b.depth);
  for (const point of order) {
    const x = scaleTo(point.x, xs, MARGIN, width - MARGIN);
    const y = scaleTo(point.y, ys, height - MARGIN, MARGIN);
    ctx.globalAlpha = 0.45 + 0.55 * ((point.depth - depths.min) / (depths.max - depths.min || 1));
    ctx.fillStyle = colors.get(labels[point.i]) ?? "#444444";
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.globalAlpha = 1;
}

export function renderFitnessCurve(
  ctx: Ctx2D,
  width: number,
  height: number,
  history: number[],
): void {
  ctx.clearRect(0, 0, width, height);
  if (history.length === 0) return;
  const ys = extent(history);
  ctx.strokeStyle = "#4e79a7";
  ctx.beginPath();
  history.forEach((value, i) => {
    const x = scaleTo(i, { min: 0, max: Math.max(1, history.length - 1) }, MARGIN, width - MARGIN);
    const y = scaleTo(value, ys, height - MARGIN, MARGIN);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}
