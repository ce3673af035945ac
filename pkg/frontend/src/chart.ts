/** SVG path helpers for the live metrics charts.  Pure string math so
 * the scaling is unit-testable without a DOM. */

export interface Bounds {
  min: number;
  max: number;
}

/** Common y-bounds over several series (charts share one axis). */
export function seriesBounds(series: number[][]): Bounds {
  let min = Infinity;
  let max = -Infinity;
  for (const values of series) {
    for (const v of values) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (min === Infinity) return { min: 0, max: 1 };
  if (min === max) return { min: min - 0.5, max: max + 0.5 };
  return { min, max };
}

/** Polyline path for equally spaced samples, e.g. "M0.0,40.0 L50.0,13.3".
 * y grows downward in SVG, so the max value maps to y = 0.  Fewer than
 * two points cannot make a line and yield "". */
export function linePath(
  values: number[],
  width: number,
  height: number,
  bounds: Bounds,
): string {
  if (values.length < 2) return "";
  const span = bounds.max - bounds.min;
  const step = width / (values.length - 1);
  const parts = values.map((v, i) => {
    const x = i * step;
    const y = height - ((v - bounds.min) / span) * height;
    return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
  });
  return parts.join(" ");
}
