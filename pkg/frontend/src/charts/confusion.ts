import type { ConfusionView } from '../types.js';
import { escapeHtml } from '../format.js';

/** Row = true class, column = predicted class, cell (i, j) = counts[i][j]. */
export function renderConfusionMatrix(el: HTMLElement, view: ConfusionView): void {
  const { labels, counts } = view;
  if (labels.length === 0) {
    el.innerHTML = '<p class="empty">no predictions to tabulate</p>';
    return;
  }

  const maxCount = Math.max(...counts.flat(), 1);
  const head = labels.map((l) => `<th>${escapeHtml(l)}</th>`).join('');
  const body = counts
    .map((row, i) => {
      const cells = row
        .map((c, j) => {
          const shade = (c / maxCount).toFixed(3);
          const cls = i === j ? 'cell diag' : 'cell';
          return `<td class="${cls}" data-row="${i}" data-col="${j}" style="--w:${shade}">${c}</td>`;
        })
        .join('');
      return `<tr><th>${escapeHtml(labels[i])}</th>${cells}</tr>`;
    })
    .join('');

  el.innerHTML = `
    <table class="confusion">
      <caption>rows are true classes, columns predicted</caption>
      <thead><tr><th></th>${head}</tr></thead>
      <tbody>${body}</tbody>
    </table>
  `;
}
