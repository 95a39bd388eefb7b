import type { DatasetList } from '../types.js';
import { escapeHtml } from '../format.js';

export interface SelectDatasetHandlers {
  select(name: string): void;
  upload(name: string, csvText: string): void;
}

/** Card per session dataset plus a CSV upload form. */
export function renderSelectDataset(
  el: HTMLElement,
  data: DatasetList,
  on: SelectDatasetHandlers,
): void {
  const cards = data.datasets
    .map((d) => {
      const badge = d.provenance.kind === 'augmented'
        ? `<span class="badge augmented" title="${escapeHtml(d.provenance.operation ?? '')}">augmented</span>`
        : `<span class="badge">${escapeHtml(d.provenance.kind)}</span>`;
      const cols = d.columns
        .map((c) => `<li>${escapeHtml(c.name)} <small>${c.dtype}</small></li>`)
        .join('');
      return `
        <article class="dataset-card" data-dataset="${escapeHtml(d.name)}">
          <h3>${escapeHtml(d.name)}</h3>
          ${badge}
          <p>${d.row_count} rows, ${d.columns.length} columns</p>
          <ul class="columns">${cols}</ul>
          <button class="choose" data-dataset="${escapeHtml(d.name)}">Use this dataset</button>
        </article>
      `;
    })
    .join('');

  el.innerHTML = `
    <section class="select-dataset">
      <h2>Select Dataset</h2>
      ${data.datasets.length === 0 ? '<p class="empty">no datasets in this session yet; upload one below</p>' : `<div class="cards">${cards}</div>`}
      <form class="upload">
        <label>name <input name="name" type="text" placeholder="my_table" required></label>
        <label>csv file <input name="file" type="file" accept=".csv,text/csv"></label>
        <button type="submit">Upload</button>
      </form>
    </section>
  `;

  el.querySelectorAll('button.choose').forEach((btn) => {
    btn.addEventListener('click', () => {
      on.select(btn.getAttribute('data-dataset')!);
    });
  });

  const form = el.querySelector<HTMLFormElement>('form.upload')!;
  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const name = (form.elements.namedItem('name') as HTMLInputElement).value.trim();
    const fileInput = form.elements.namedItem('file') as HTMLInputElement;
    const file = fileInput.files && fileInput.files[0];
    if (!name || !file) return;
    void file.text().then((text) => on.upload(name, text));
  });
}
