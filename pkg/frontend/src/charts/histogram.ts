import type { ScoreBin } from '../types.js';
import { fmt } from '../format.js';

export interface HistogramOptions {
  width?: number;
  height?: number;
  highlight?: number | null; // bin index
}

/**
 * Bar chart over server-computed bins. Bar heights scale to the largest
 * count; an empty bin list renders an empty-state note instead of axes.
 */
export function renderHistogram(
  el: HTMLElement,
  bins: ScoreBin[],
  options: HistogramOptions = {},
): void {
  const width = options.width ?? 320;
  const height = options.height ?? 120;
  const highlight = options.highlight ?? null;

  if (bins.length === 0) {
    el.innerHTML = '<p class="empty">no scored solutions yet</p>';
    return;
  }

  const maxCount = Math.max(...bins.map((b) => b.count), 1);
  const barW = width / bins.length;
  const bars = bins
    .map((b, i) => {
      const h = (b.count / maxCount) * (height - 14);
      const cls = i === highlight ? 'bin highlight' : 'bin';
      return `<rect class="${cls}" data-bin="${i}" x="${(i * barW).toFixed(2)}" y="${(height - h).toFixed(2)}" width="${(barW - 1).toFixed(2)}" height="${h.toFixed(2)}"><title>[${fmt(b.lo)}, ${fmt(b.hi)}]: ${b.count}</title></rect>`;
    })
    .join('');

  el.innerHTML = `<svg class="histogram" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">${bars}</svg>`;
}

/** Re-highlight without a full re-render; pass null to clear. */
export function highlightBin(el: HTMLElement, index: number | null): void {
  el.querySelectorAll('rect.bin').forEach((rect) => {
    const isTarget = index !== null && rect.getAttribute('data-bin') === String(index);
    rect.setAttribute('class', isTarget ? 'bin highlight' : 'bin');
  });
}
