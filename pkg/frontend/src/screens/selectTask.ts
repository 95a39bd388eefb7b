import type { DatasetProfile, TaskType } from '../types.js';
import { escapeHtml } from '../format.js';

export interface SelectTaskHandlers {
  choose(task: TaskType): void;
}

const DESCRIPTIONS: Record<TaskType, string> = {
  regression: 'predict a numeric quantity',
  classification: 'predict a categorical label',
};

/** Task picker; shows which columns could serve as a target for each task. */
export function renderSelectTask(
  el: HTMLElement,
  profile: DatasetProfile,
  on: SelectTaskHandlers,
): void {
  const numeric = profile.columns.filter((c) => c.dtype === 'numeric').map((c) => c.name);
  const categorical = profile.columns
    .filter((c) => c.dtype === 'categorical')
    .map((c) => c.name);

  const card = (task: TaskType, targets: string[]) => `
    <article class="task-card" data-task="${task}">
      <h3>${task}</h3>
      <p>${DESCRIPTIONS[task]}</p>
      <p class="targets">${targets.length > 0
        ? `possible targets: ${targets.map(escapeHtml).join(', ')}`
        : 'no suitable target column in this dataset'}</p>
      <button data-task="${task}" ${targets.length === 0 ? 'disabled' : ''}>Choose ${task}</button>
    </article>
  `;

  el.innerHTML = `
    <section class="select-task">
      <h2>Select Task</h2>
      <p>dataset <code>${escapeHtml(profile.name)}</code>, ${profile.row_count} rows</p>
      <div class="cards">
        ${card('regression', numeric)}
        ${card('classification', categorical)}
      </div>
    </section>
  `;

  el.querySelectorAll('button[data-task]').forEach((btn) => {
    btn.addEventListener('click', () => {
      on.choose(btn.getAttribute('data-task') as TaskType);
    });
  });
}
