import type {
  MetricName,
  ParallelCoords,
  ScoreSummary,
  Solution,
  SolutionsPage,
} from '../types.js';
import { renderHistogram, highlightBin } from '../charts/histogram.js';
import { renderParallelCoords, highlightSolution } from '../charts/parallel.js';
import { fmt, escapeHtml } from '../format.js';

export interface ExploreSolutionsData {
  solutions: SolutionsPage;
  summary: ScoreSummary | null;
  parallel: ParallelCoords | null;
  running: boolean;
}

export interface ExploreSolutionsHandlers {
  sort(metric: MetricName): void;
  openExplanations(solutionId: string): void;
  toggleCompare(solutionId: string): void;
  compare(a: string, b: string): void;
  cancel(): void;
}

function stepStrip(solution: Solution): string {
  return solution.pipeline.steps
    .map((s) => `<span class="step" title="${escapeHtml(JSON.stringify(s.hyperparams))}">${escapeHtml(s.name)}</span>`)
    .join('<span class="arrow">→</span>');
}

function metricColumns(page: SolutionsPage): string[] {
  const first = page.solutions.find((s) => s.report !== null);
  return first && first.report ? Object.keys(first.report.metrics) : [page.metric];
}

function rowMarkup(solution: Solution, rank: number, columns: string[], selected: string[]): string {
  const metrics = columns
    .map((m) => `<td class="metric ${m}">${fmt(solution.report?.metrics[m] ?? null)}</td>`)
    .join('');
  const checked = selected.includes(solution.solution_id) ? 'checked' : '';
  return `
    <tr class="solution" data-solution-id="${solution.solution_id}">
      <td class="rank">${rank}</td>
      <td class="id">${solution.solution_id}</td>
      <td class="pipeline">${stepStrip(solution)}</td>
      ${metrics}
      <td class="compare-pick"><input type="checkbox" class="pick" ${checked}></td>
    </tr>
  `;
}

/**
 * Solution table in server ranking order, the score histogram and the
 * parallel-coordinates plot. Hovering a row highlights its histogram bin
 * (via the server's bin_of map) and its polyline. Sorting re-requests the
 * ranking from the server instead of reordering locally.
 */
export function renderExploreSolutions(
  el: HTMLElement,
  data: ExploreSolutionsData,
  on: ExploreSolutionsHandlers,
): void {
  const page = data.solutions;
  const byId = new Map(page.solutions.map((s) => [s.solution_id, s]));
  const columns = metricColumns(page);
  const selection: string[] = [];

  const header = [
    '<th>rank</th>',
    '<th>solution</th>',
    '<th>pipeline</th>',
    ...columns.map((m) => {
      const active = m === page.metric ? ' class="active"' : '';
      return `<th${active}><button class="sort" data-metric="${m}">${m}</button></th>`;
    }),
    '<th>compare</th>',
  ].join('');

  const rows = page.ranking
    .map((id, i) => rowMarkup(byId.get(id)!, i + 1, columns, selection))
    .join('');

  const failedNote = page.failed.length > 0
    ? `<p class="failed-note">${page.failed.length} pipeline${page.failed.length === 1 ? '' : 's'} failed</p>`
    : '';

  el.innerHTML = `
    <section class="explore-solutions">
      <h2>Explore Solutions</h2>
      <p class="status">${data.running
        ? 'search running… solutions stream in as they are scored'
        : `${page.ranking.length} scored solution${page.ranking.length === 1 ? '' : 's'}, ranked by ${page.metric}`}
        ${data.running ? '<button class="cancel">Stop search</button>' : ''}
      </p>
      ${failedNote}
      <div class="charts">
        <div class="score-histogram"></div>
        <div class="parallel-coords"></div>
      </div>
      <table class="solutions">
        <thead><tr>${header}</tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <button class="open-compare" disabled>Compare selected</button>
    </section>
  `;

  const histEl = el.querySelector<HTMLElement>('.score-histogram')!;
  const parEl = el.querySelector<HTMLElement>('.parallel-coords')!;
  if (data.summary) renderHistogram(histEl, data.summary.bins);
  if (data.parallel) renderParallelCoords(parEl, data.parallel);

  el.querySelectorAll('button.sort').forEach((btn) => {
    btn.addEventListener('click', () => {
      on.sort(btn.getAttribute('data-metric') as MetricName);
    });
  });

  const compareBtn = el.querySelector<HTMLButtonElement>('button.open-compare')!;

  el.querySelectorAll('tr.solution').forEach((row) => {
    const id = row.getAttribute('data-solution-id')!;
    row.addEventListener('mouseenter', () => {
      const bin = data.summary ? data.summary.bin_of[id] : undefined;
      highlightBin(histEl, bin === undefined ? null : bin);
      highlightSolution(parEl, id);
      row.classList.add('hover');
    });
    row.addEventListener('mouseleave', () => {
      highlightBin(histEl, null);
      highlightSolution(parEl, null);
      row.classList.remove('hover');
    });
    row.addEventListener('click', (ev) => {
      if ((ev.target as HTMLElement).classList.contains('pick')) return;
      on.openExplanations(id);
    });
    row.querySelector<HTMLInputElement>('input.pick')!.addEventListener('change', () => {
      on.toggleCompare(id);
      if (selection.includes(id)) {
        selection.splice(selection.indexOf(id), 1);
      } else {
        selection.push(id);
      }
      compareBtn.disabled = selection.length !== 2;
    });
  });

  compareBtn.addEventListener('click', () => {
    if (selection.length === 2) on.compare(selection[0], selection[1]);
  });

  const cancelBtn = el.querySelector<HTMLButtonElement>('button.cancel');
  if (cancelBtn) cancelBtn.addEventListener('click', () => on.cancel());
}

/**
 * Streaming path: append one scored solution without re-rendering the whole
 * table. The caller refreshes the full ranked view when the run finishes.
 */
export function appendSolutionRow(el: HTMLElement, solution: Solution): void {
  const tbody = el.querySelector('table.solutions tbody');
  if (!tbody || solution.report === null) return;
  const columns = Object.keys(solution.report.metrics);
  const rank = tbody.querySelectorAll('tr.solution').length + 1;
  tbody.insertAdjacentHTML('beforeend', rowMarkup(solution, rank, columns, []));
}
