import type { BudgetSpec, EvalMethodSpec } from '../types.js';
import type { ProblemDraft } from '../state.js';
import { escapeHtml } from '../format.js';

export interface SearchConfig {
  budget: BudgetSpec;
  eval_method: EvalMethodSpec;
  seed: number | undefined;
}

export interface ConfigureSearchHandlers {
  start(config: SearchConfig): void;
}

/** Budget, evaluation and seed form; Start submits the drafted problem. */
export function renderConfigureSearch(
  el: HTMLElement,
  dataset: string,
  draft: ProblemDraft,
  on: ConfigureSearchHandlers,
): void {
  el.innerHTML = `
    <section class="configure-search">
      <h2>Configure Search</h2>
      <p>
        ${draft.task_type} of <code>${escapeHtml(draft.target ?? '')}</code>
        on <code>${escapeHtml(dataset)}</code>
        from ${draft.features.length} feature${draft.features.length === 1 ? '' : 's'},
        optimizing ${draft.primary_metric}
      </p>
      <form class="search-form">
        <label>max pipelines
          <input name="max_pipelines" type="number" min="1" value="20">
        </label>
        <label>time limit (seconds)
          <input name="time_limit" type="number" min="1" value="60">
        </label>
        <label>evaluation
          <select name="eval">
            <option value="kfold" selected>k-fold cross-validation</option>
            <option value="holdout">holdout split</option>
          </select>
        </label>
        <label class="kfold-k">folds
          <input name="k" type="number" min="2" value="5">
        </label>
        <label class="holdout-frac" hidden>test fraction
          <input name="test_fraction" type="number" min="0.05" max="0.95" step="0.05" value="0.25">
        </label>
        <label>seed (blank for server default)
          <input name="seed" type="number" placeholder="default">
        </label>
        <button type="submit">Start search</button>
      </form>
    </section>
  `;

  const form = el.querySelector<HTMLFormElement>('form.search-form')!;
  const field = (name: string) => form.elements.namedItem(name) as HTMLInputElement;

  (form.elements.namedItem('eval') as HTMLSelectElement).addEventListener('change', () => {
    const kind = (form.elements.namedItem('eval') as HTMLSelectElement).value;
    form.querySelector<HTMLElement>('.kfold-k')!.hidden = kind !== 'kfold';
    form.querySelector<HTMLElement>('.holdout-frac')!.hidden = kind !== 'holdout';
  });

  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const kind = (form.elements.namedItem('eval') as HTMLSelectElement).value as
      | 'kfold'
      | 'holdout';
    const evalMethod: EvalMethodSpec =
      kind === 'kfold'
        ? { kind, k: Number(field('k').value) }
        : { kind, test_fraction: Number(field('test_fraction').value) };
    const seedRaw = field('seed').value.trim();
    on.start({
      budget: {
        max_pipelines: Number(field('max_pipelines').value),
        time_limit_seconds: Number(field('time_limit').value),
      },
      eval_method: evalMethod,
      seed: seedRaw === '' ? undefined : Number(seedRaw),
    });
  });
}
