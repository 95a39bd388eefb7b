import type {
  CategoryBin,
  ColumnProfile,
  DatasetProfile,
  MetricName,
  NumericBin,
  TaskType,
} from '../types.js';
import type { ProblemDraft } from '../state.js';
import { fmt, escapeHtml } from '../format.js';

export interface DefineProblemHandlers {
  updateDraft(patch: Partial<ProblemDraft>): void;
  submit(): void;
  openAugmentation(): void;
}

const REGRESSION_METRICS: MetricName[] = ['mae', 'mse', 'rmse', 'r2'];
const CLASSIFICATION_METRICS: MetricName[] = ['accuracy', 'precision', 'recall', 'f1'];

export function metricsFor(task: TaskType): MetricName[] {
  return task === 'regression' ? REGRESSION_METRICS : CLASSIFICATION_METRICS;
}

function miniHistogram(profile: ColumnProfile): string {
  const bins = profile.histogram;
  if (bins.length === 0) return '<p class="empty">no values</p>';
  const w = 140;
  const h = 40;
  const barW = w / bins.length;
  const isCategory = typeof bins[0][0] === 'string';
  const counts = isCategory
    ? (bins as CategoryBin[]).map((b) => b[1])
    : (bins as NumericBin[]).map((b) => b[2]);
  const maxCount = Math.max(...counts, 1);
  const bars = counts
    .map((c, i) => {
      const bh = (c / maxCount) * (h - 4);
      return `<rect class="bin" x="${(i * barW).toFixed(1)}" y="${(h - bh).toFixed(1)}" width="${Math.max(barW - 1, 1).toFixed(1)}" height="${bh.toFixed(1)}"><title>${c}</title></rect>`;
    })
    .join('');
  return `<svg class="mini-histogram" viewBox="0 0 ${w} ${h}" width="${w}" height="${h}">${bars}</svg>`;
}

function statsLine(p: ColumnProfile): string {
  if (p.dtype === 'numeric') {
    return `mean ${fmt(p.mean)}, std ${fmt(p.std)}, range [${fmt(p.min)}, ${fmt(p.max)}]`;
  }
  if (p.dtype === 'temporal' && p.temporal_range) {
    return `${escapeHtml(p.temporal_range[0])} … ${escapeHtml(p.temporal_range[1])}`;
  }
  return `${p.distinct_count} distinct values`;
}

/**
 * Column summary cards plus the problem form: target selector, feature
 * multi-select with auto-complete, and task/metric pickers constrained to
 * combinations the server would accept (a categorical target rules out
 * regression and vice versa).
 */
export function renderDefineProblem(
  el: HTMLElement,
  profile: DatasetProfile,
  draft: ProblemDraft,
  on: DefineProblemHandlers,
): void {
  const byName = new Map(profile.profiles.map((p) => [p.name, p]));

  const cards = profile.columns
    .map((c) => {
      const p = byName.get(c.name)!;
      const roles: string[] = [];
      if (draft.target === c.name) roles.push('target');
      if (draft.features.includes(c.name)) roles.push('feature');
      return `
        <article class="column-card${roles.length ? ' in-use' : ''}" data-column="${escapeHtml(c.name)}">
          <h4>${escapeHtml(c.name)} <small>${c.dtype}</small>${roles.map((r) => ` <span class="role">${r}</span>`).join('')}</h4>
          ${miniHistogram(p)}
          <p class="stats">${statsLine(p)}</p>
          <p class="stats">${p.missing_count} missing</p>
        </article>
      `;
    })
    .join('');

  const targetDtype = draft.target ? byName.get(draft.target)?.dtype : undefined;
  const regressionDisabled = targetDtype !== undefined && targetDtype !== 'numeric';
  const classificationDisabled = targetDtype !== undefined && targetDtype !== 'categorical';

  const targetOptions = profile.columns
    .map((c) => `<option value="${escapeHtml(c.name)}" ${draft.target === c.name ? 'selected' : ''}>${escapeHtml(c.name)} (${c.dtype})</option>`)
    .join('');

  const featureChips = draft.features
    .map((f) => `<span class="chip" data-feature="${escapeHtml(f)}">${escapeHtml(f)} <button class="remove" data-feature="${escapeHtml(f)}" title="remove">×</button></span>`)
    .join('');

  const addable = profile.columns
    .map((c) => c.name)
    .filter((n) => n !== draft.target && !draft.features.includes(n));
  const datalist = addable
    .map((n) => `<option value="${escapeHtml(n)}"></option>`)
    .join('');

  const metricOptions = (draft.task_type ? metricsFor(draft.task_type) : [])
    .map((m) => `<option value="${m}" ${draft.primary_metric === m ? 'selected' : ''}>${m}</option>`)
    .join('');

  const ready = draft.target !== null && draft.features.length > 0
    && draft.task_type !== null && draft.primary_metric !== null;

  el.innerHTML = `
    <section class="define-problem">
      <h2>Define Problem</h2>
      <p>dataset <code>${escapeHtml(profile.name)}</code>, ${profile.row_count} rows</p>
      <div class="column-cards">${cards}</div>
      <form class="problem-form">
        <label>target
          <select name="target">
            <option value="" ${draft.target === null ? 'selected' : ''}>choose…</option>
            ${targetOptions}
          </select>
        </label>
        <fieldset class="features">
          <legend>features</legend>
          <div class="chips">${featureChips.length ? featureChips : '<span class="empty">none selected</span>'}</div>
          <input name="feature-input" list="feature-options" placeholder="add feature…" autocomplete="on">
          <datalist id="feature-options">${datalist}</datalist>
          <button type="button" class="add-feature">Add</button>
          <button type="button" class="add-all">Add all</button>
        </fieldset>
        <label>task
          <select name="task">
            <option value="" ${draft.task_type === null ? 'selected' : ''}>choose…</option>
            <option value="regression" ${draft.task_type === 'regression' ? 'selected' : ''} ${regressionDisabled ? 'disabled' : ''}>regression</option>
            <option value="classification" ${draft.task_type === 'classification' ? 'selected' : ''} ${classificationDisabled ? 'disabled' : ''}>classification</option>
          </select>
        </label>
        <label>metric
          <select name="metric" ${draft.task_type === null ? 'disabled' : ''}>
            <option value="" ${draft.primary_metric === null ? 'selected' : ''}>choose…</option>
            ${metricOptions}
          </select>
        </label>
        <button type="submit" class="continue" ${ready ? '' : 'disabled'}>Continue to search</button>
        <button type="button" class="augment">Find more data</button>
      </form>
    </section>
  `;

  const form = el.querySelector<HTMLFormElement>('form.problem-form')!;
  const select = (name: string) => form.elements.namedItem(name) as HTMLSelectElement;

  select('target').addEventListener('change', () => {
    const target = select('target').value || null;
    // dropping the old target from features keeps the draft consistent
    const features = draft.features.filter((f) => f !== target);
    on.updateDraft({ target, features });
  });

  const addFeature = () => {
    const input = form.elements.namedItem('feature-input') as HTMLInputElement;
    const name = input.value.trim();
    if (!name || !addable.includes(name)) return;
    on.updateDraft({ features: [...draft.features, name] });
  };
  form.querySelector('button.add-feature')!.addEventListener('click', addFeature);
  form.querySelector('button.add-all')!.addEventListener('click', () => {
    on.updateDraft({ features: [...draft.features, ...addable] });
  });
  (form.elements.namedItem('feature-input') as HTMLInputElement).addEventListener(
    'keydown',
    (ev) => {
      if ((ev as KeyboardEvent).key === 'Enter') {
        ev.preventDefault();
        addFeature();
      }
    },
  );

  form.querySelectorAll('button.remove').forEach((btn) => {
    btn.addEventListener('click', () => {
      const name = btn.getAttribute('data-feature')!;
      on.updateDraft({ features: draft.features.filter((f) => f !== name) });
    });
  });

  select('task').addEventListener('change', () => {
    const task = (select('task').value || null) as TaskType | null;
    // old metric may not apply to the new task
    const metric = task && draft.primary_metric
      && metricsFor(task).includes(draft.primary_metric)
      ? draft.primary_metric
      : null;
    on.updateDraft({ task_type: task, primary_metric: metric });
  });

  select('metric').addEventListener('change', () => {
    on.updateDraft({ primary_metric: (select('metric').value || null) as MetricName | null });
  });

  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    if (ready) on.submit();
  });

  form.querySelector('button.augment')!.addEventListener('click', () => {
    on.openAugmentation();
  });
}
