/** Hand-rolled SVG charts. Pure string builders: every plotted value
 * comes straight from a service payload; only pixel mapping happens here. */

import type { PreviewResponse, SweepResponse } from "./types.js";
import { num } from "./format.js";

const W = 460;
const H = 180;
const PAD = { left: 52, right: 14, top: 12, bottom: 28 };

function xScale(lo: number, hi: number): (v: number) => number {
  const span = hi - lo || 1;
  return (v) => PAD.left + ((v - lo) / span) * (W - PAD.left - PAD.right);
}

function yScale(lo: number, hi: number): (v: number) => number {
  const span = hi - lo || 1;
  return (v) => H - PAD.bottom - ((v - lo) / span) * (H - PAD.top - PAD.bottom);
}

function polyline(xs: number[], ys: number[], sx: (v: number) => number, sy: (v: number) => number): string {
  return xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]!).toFixed(2)}`).join(" ");
}

/** Density (and cdf) of a fitted second-order distribution, from the
 * service's dense tabulation. */
export function densityPreviewSvg(preview: PreviewResponse): string {
  const pdf = preview.pdf ?? preview.cdf;
  const sx = xScale(preview.xs[0]!, preview.xs[preview.xs.length - 1]!);
  const sy = yScale(0, Math.max(...pdf) || 1);
  const line = polyline(preview.xs, pdf, sx, sy);
  const meanX = sx(preview.mean).toFixed(2);
  return (
    `<svg viewBox="0 0 ${W} ${H}" class="chart" role="img" aria-label="fitted density preview">` +
    `<polyline points="${line}" fill="none" stroke="#2563eb" stroke-width="1.5"/>` +
    `<line x1="${meanX}" y1="${PAD.top}" x2="${meanX}" y2="${H - PAD.bottom}" stroke="#9333ea" stroke-dasharray="4 3"/>` +
    `<text x="${meanX}" y="${PAD.top + 10}" class="marker-label">mean ${num(preview.mean, 4)}</text>` +
    axis(preview.xs[0]!, preview.xs[preview.xs.length - 1]!) +
    `</svg>`
  );
}

const SERIES_COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

/** Per-alternative expected-utility curves with decision-crossing markers. */
export function sweepSvg(sweep: SweepResponse): string {
  const alts = Object.keys(sweep.series);
  const all = alts.flatMap((a) => sweep.series[a]!);
  const sx = xScale(sweep.grid[0]!, sweep.grid[sweep.grid.length - 1]!);
  const sy = yScale(Math.min(...all), Math.max(...all));
  const lines = alts
    .map((alt, i) => {
      const color = SERIES_COLORS[i % SERIES_COLORS.length];
      const pts = polyline(sweep.grid, sweep.series[alt]!, sx, sy);
      return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.5" data-series="${alt}"/>`;
    })
    .join("");
  const markers = sweep.crossings
    .map((c) => {
      const x = sx(c).toFixed(2);
      return (
        `<line x1="${x}" y1="${PAD.top}" x2="${x}" y2="${H - PAD.bottom}" stroke="#111" stroke-dasharray="3 3" data-crossing="${c}"/>` +
        `<text x="${x}" y="${H - PAD.bottom + 22}" class="marker-label" text-anchor="middle">${num(c, 6)}</text>`
      );
    })
    .join("");
  const baselineX = sx(sweep.baseline_value).toFixed(2);
  const legend = alts
    .map((alt, i) => {
      const color = SERIES_COLORS[i % SERIES_COLORS.length];
      return `<tspan fill="${color}">&#9644; ${alt}</tspan>`;
    })
    .join("  ");
  return (
    `<svg viewBox="0 0 ${W} ${H}" class="chart" role="img" aria-label="sensitivity sweep">` +
    lines +
    markers +
    `<line x1="${baselineX}" y1="${PAD.top}" x2="${baselineX}" y2="${H - PAD.bottom}" stroke="#9ca3af" data-baseline="${sweep.baseline_value}"/>` +
    axis(sweep.grid[0]!, sweep.grid[sweep.grid.length - 1]!) +
    `<text x="${PAD.left}" y="${PAD.top}" class="legend">${legend}</text>` +
    `</svg>`
  );
}

/** Horizontal value-vs-cost bars for the focus dashboard. Bar geometry is
 * layout; the printed numbers are the service's. */
export function valueCostBarSvg(vpi: number, cost: number, scaleMax: number): string {
  const width = 220;
  const h = 14;
  const px = (v: number) => (scaleMax > 0 ? Math.max(0, Math.min(1, v / scaleMax)) * width : 0);
  return (
    `<svg viewBox="0 0 ${width + 4} ${h * 2 + 6}" class="bars" role="img" aria-label="value versus cost">` +
    `<rect x="0" y="0" width="${px(vpi).toFixed(1)}" height="${h}" fill="#2563eb" data-bar="value"/>` +
    `<rect x="0" y="${h + 2}" width="${px(cost).toFixed(1)}" height="${h}" fill="#d97706" data-bar="cost"/>` +
    `</svg>`
  );
}

function axis(lo: number, hi: number): string {
  const y = H - PAD.bottom;
  return (
    `<line x1="${PAD.left}" y1="${y}" x2="${W - PAD.right}" y2="${y}" stroke="#6b7280"/>` +
    `<text x="${PAD.left}" y="${y + 14}" class="tick">${num(lo, 4)}</text>` +
    `<text x="${W - PAD.right}" y="${y + 14}" class="tick" text-anchor="end">${num(hi, 4)}</text>`
  );
}
