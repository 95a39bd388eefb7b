import type { ParallelCoords } from '../types.js';
import { fmt } from '../format.js';

const WIDTH = 520;
const HEIGHT = 180;
const PAD = 24;

/**
 * One vertical axis per metric, one polyline per solution, scaled with the
 * server-provided ranges. Lines carry data-solution-id for hover coupling.
 */
export function renderParallelCoords(el: HTMLElement, data: ParallelCoords): void {
  const { metrics, ranges, solutions } = data;
  if (metrics.length === 0 || solutions.length === 0) {
    el.innerHTML = '<p class="empty">nothing to plot yet</p>';
    return;
  }

  const axisX = (i: number) =>
    metrics.length === 1
      ? WIDTH / 2
      : PAD + (i / (metrics.length - 1)) * (WIDTH - 2 * PAD);
  const axisY = (metric: string, v: number) => {
    const r = ranges[metric];
    const span = r.max - r.min || 1;
    return HEIGHT - PAD - ((v - r.min) / span) * (HEIGHT - 2 * PAD);
  };

  const axes = metrics
    .map((m, i) => {
      const x = axisX(i).toFixed(1);
      return `<g class="axis"><line x1="${x}" y1="${PAD}" x2="${x}" y2="${HEIGHT - PAD}"/><text x="${x}" y="${HEIGHT - 6}" text-anchor="middle">${m}</text><text class="range" x="${x}" y="${PAD - 8}" text-anchor="middle">${fmt(ranges[m].max)}</text></g>`;
    })
    .join('');

  const lines = solutions
    .map((s) => {
      const pts: string[] = [];
      s.values.forEach((v, i) => {
        if (v === null) return; // metric undefined for this solution
        pts.push(`${axisX(i).toFixed(1)},${axisY(metrics[i], v).toFixed(1)}`);
      });
      return `<polyline class="coord-line" data-solution-id="${s.solution_id}" fill="none" points="${pts.join(' ')}"/>`;
    })
    .join('');

  el.innerHTML = `<svg class="parallel" viewBox="0 0 ${WIDTH} ${HEIGHT}" width="${WIDTH}" height="${HEIGHT}">${axes}${lines}</svg>`;
}

/** Highlight one solution's polyline; pass null to clear. */
export function highlightSolution(el: HTMLElement, solutionId: string | null): void {
  el.querySelectorAll('polyline.coord-line').forEach((line) => {
    const mine = solutionId !== null
      && line.getAttribute('data-solution-id') === solutionId;
    line.setAttribute('class', mine ? 'coord-line highlight' : 'coord-line');
  });
}
