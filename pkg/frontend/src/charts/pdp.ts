import type { PdpCurve } from '../types.js';
import { fmt, escapeHtml } from '../format.js';

const WIDTH = 420;
const CURVE_H = 160;
const STRIP_H = 28;

// Curves whose value spread is below this are drawn as an exact horizontal
// line. Without the guard, float noise of order 1e-15 would be stretched to
// the full chart height and a constant effect would look like structure.
const FLAT_EPS = 1e-9;

/**
 * Partial-dependence curve with the sample-distribution strip underneath.
 * Grid, values and bin counts all come from the explain endpoint.
 */
export function renderPdp(el: HTMLElement, curve: PdpCurve): void {
  const { grid, values, bin_counts: binCounts, warnings } = curve;

  if (grid.length === 0) {
    el.innerHTML = '<p class="empty">no grid points for this feature</p>';
    return;
  }

  const x0 = grid[0];
  const x1 = grid[grid.length - 1];
  const spanX = x1 - x0 || 1;
  const px = (x: number) => ((x - x0) / spanX) * (WIDTH - 20) + 10;

  const vMin = Math.min(...values);
  const vMax = Math.max(...values);
  const flat = vMax - vMin < FLAT_EPS;
  const py = (v: number) =>
    flat ? CURVE_H / 2 : CURVE_H - 10 - ((v - vMin) / (vMax - vMin)) * (CURVE_H - 20);

  let curveMarkup: string;
  if (grid.length === 1) {
    curveMarkup = `<circle class="pdp-point" cx="${px(grid[0]).toFixed(2)}" cy="${py(values[0]).toFixed(2)}" r="4"/>`;
  } else {
    const points = grid
      .map((x, i) => `${px(x).toFixed(2)},${py(values[i]).toFixed(2)}`)
      .join(' ');
    curveMarkup = `<polyline class="pdp-curve${flat ? ' flat' : ''}" fill="none" points="${points}"/>`;
  }

  const maxCount = Math.max(...binCounts, 1);
  const stripW = (WIDTH - 20) / Math.max(binCounts.length, 1);
  const strip = binCounts
    .map((c, i) => {
      const shade = c === 0 ? 0 : 0.15 + 0.85 * (c / maxCount);
      return `<rect class="pdp-strip" data-count="${c}" x="${(10 + i * stripW).toFixed(2)}" y="2" width="${Math.max(stripW - 1, 1).toFixed(2)}" height="${STRIP_H - 4}" opacity="${shade.toFixed(3)}"><title>${c} samples</title></rect>`;
    })
    .join('');

  const warningMarkup = warnings.length
    ? `<div class="warnings">${warnings.map((w) => `<p class="warning">${escapeHtml(w)}</p>`).join('')}</div>`
    : '';

  el.innerHTML = `
    <figure class="pdp">
      <figcaption>partial dependence of <code>${escapeHtml(curve.feature)}</code>
        (values ${fmt(vMin)} … ${fmt(vMax)})</figcaption>
      <svg viewBox="0 0 ${WIDTH} ${CURVE_H}" width="${WIDTH}" height="${CURVE_H}">${curveMarkup}</svg>
      <svg class="distribution" viewBox="0 0 ${WIDTH} ${STRIP_H}" width="${WIDTH}" height="${STRIP_H}">${strip}</svg>
      ${warningMarkup}
    </figure>
  `;
}
