import type { ScatterView } from '../types.js';
import { fmt } from '../format.js';

const SIZE = 260;
const PAD = 14;

/**
 * Predicted vs actual, with the y = x reference diagonal. A degenerate flag
 * from the server (constant predictions over varying truth) renders a
 * warning banner above the plot.
 */
export function renderScatter(el: HTMLElement, view: ScatterView): void {
  const { pairs, degenerate } = view;
  if (pairs.length === 0) {
    el.innerHTML = '<p class="empty">no out-of-fold predictions</p>';
    return;
  }

  let lo = Infinity;
  let hi = -Infinity;
  for (const [t, p] of pairs) {
    lo = Math.min(lo, t, p);
    hi = Math.max(hi, t, p);
  }
  const span = hi - lo || 1;
  const sx = (v: number) => PAD + ((v - lo) / span) * (SIZE - 2 * PAD);
  const sy = (v: number) => SIZE - PAD - ((v - lo) / span) * (SIZE - 2 * PAD);

  const dots = pairs
    .map(([t, p]) => `<circle class="dot" cx="${sx(t).toFixed(1)}" cy="${sy(p).toFixed(1)}" r="2"><title>true ${fmt(t)}, predicted ${fmt(p)}</title></circle>`)
    .join('');
  const diagonal = `<line class="diagonal" x1="${sx(lo).toFixed(1)}" y1="${sy(lo).toFixed(1)}" x2="${sx(hi).toFixed(1)}" y2="${sy(hi).toFixed(1)}"/>`;

  const banner = degenerate
    ? '<div class="warning banner">model predicts a single value for every row; the scatter carries no signal</div>'
    : '';

  el.innerHTML = `
    ${banner}
    <svg class="scatter" viewBox="0 0 ${SIZE} ${SIZE}" width="${SIZE}" height="${SIZE}">
      ${diagonal}${dots}
    </svg>
  `;
}
