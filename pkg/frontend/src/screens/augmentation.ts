import type { AugmentCandidate, AugmentSearchResult } from '../types.js';
import { fmt, escapeHtml } from '../format.js';

export interface AugmentationData {
  query: string;
  result: AugmentSearchResult | null; // null until the first search
  detailId: string | null; // candidate shown in the modal
  staleId: string | null; // candidate that got a conflict on apply
  busy: boolean;
}

export interface AugmentationHandlers {
  search(keywords: string): void;
  viewDetails(candidateId: string): void;
  closeDetails(): void;
  apply(candidateId: string): void;
  retry(): void;
  back(): void;
}

function candidateCard(c: AugmentCandidate): string {
  const keyCols = (c.plan?.key_pairs ?? [])
    .map(([q, k]) => `${escapeHtml(q)} ↔ ${escapeHtml(k)}`)
    .join(', ');
  return `
    <article class="candidate-card" data-candidate="${escapeHtml(c.candidate_id)}">
      <h4>${escapeHtml(c.entry.name)} <span class="badge op-${c.operation}">${c.operation}</span></h4>
      <p class="description">${escapeHtml(c.entry.description)}</p>
      <p class="relevance">relevance ${fmt(c.relevance, 2)}</p>
      <p class="keys">${keyCols ? `key columns: ${keyCols}` : 'stacked by matching schema'}</p>
      <button class="details" data-candidate="${escapeHtml(c.candidate_id)}">View Details</button>
      <button class="apply" data-candidate="${escapeHtml(c.candidate_id)}">Apply</button>
    </article>
  `;
}

function detailModal(c: AugmentCandidate): string {
  const head = c.preview.columns.map((col) => `<th>${escapeHtml(col)}</th>`).join('');
  const rows = c.preview.rows
    .map((r) => `<tr>${r.map((v) => `<td>${v === null ? '<em>null</em>' : escapeHtml(v)}</td>`).join('')}</tr>`)
    .join('');
  const profiles = c.preview.profiles
    .map((p) => `<li><code>${escapeHtml(p.name)}</code> ${p.dtype}, ${p.distinct_count} distinct, ${p.missing_count} missing</li>`)
    .join('');
  return `
    <div class="modal" role="dialog">
      <div class="modal-body">
        <h3>${escapeHtml(c.entry.name)}</h3>
        <p>${escapeHtml(c.entry.description)}</p>
        <table class="preview"><thead><tr>${head}</tr></thead><tbody>${rows}</tbody></table>
        <ul class="profiles">${profiles}</ul>
        <button class="apply" data-candidate="${escapeHtml(c.candidate_id)}">Apply</button>
        <button class="close">Close</button>
      </div>
    </div>
  `;
}

/**
 * Keyword search over the corpus with result cards, a preview modal, and the
 * apply action. A conflict on apply (the dataset changed since the candidate
 * was computed) surfaces a retry prompt that re-runs the search.
 */
export function renderAugmentation(
  el: HTMLElement,
  data: AugmentationData,
  on: AugmentationHandlers,
): void {
  const { result } = data;

  let body = '';
  if (data.busy) {
    body = '<p class="busy">searching…</p>';
  } else if (result === null) {
    body = '<p class="hint">enter keywords describing the data you are missing</p>';
  } else if (result.candidates.length === 0) {
    body = '<p class="empty">no candidates matched your keywords; try different terms</p>';
  } else {
    body = `<div class="cards">${result.candidates.map(candidateCard).join('')}</div>`;
  }

  const stale = data.staleId !== null
    ? `<div class="warning banner stale">
         the dataset changed since these candidates were computed;
         <button class="retry">search again</button>
       </div>`
    : '';

  const warnings = (result?.warnings ?? [])
    .map((w) => `<p class="warning">${escapeHtml(w)}</p>`)
    .join('');

  const detail = result?.candidates.find((c) => c.candidate_id === data.detailId);

  el.innerHTML = `
    <section class="augmentation">
      <h2>Data Augmentation</h2>
      <form class="keyword-form">
        <input name="keywords" type="search" placeholder="e.g. weather temperature"
               value="${escapeHtml(data.query)}">
        <button type="submit">Search corpus</button>
        <button type="button" class="back">Back to Define Problem</button>
      </form>
      ${stale}
      ${warnings}
      ${body}
      ${detail ? detailModal(detail) : ''}
    </section>
  `;

  const form = el.querySelector<HTMLFormElement>('form.keyword-form')!;
  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const keywords = (form.elements.namedItem('keywords') as HTMLInputElement).value.trim();
    if (keywords) on.search(keywords);
  });
  form.querySelector('button.back')!.addEventListener('click', () => on.back());

  el.querySelectorAll('button.details').forEach((btn) => {
    btn.addEventListener('click', () => on.viewDetails(btn.getAttribute('data-candidate')!));
  });
  el.querySelectorAll('button.apply').forEach((btn) => {
    btn.addEventListener('click', () => on.apply(btn.getAttribute('data-candidate')!));
  });
  const close = el.querySelector('button.close');
  if (close) close.addEventListener('click', () => on.closeDetails());
  const retry = el.querySelector('button.retry');
  if (retry) retry.addEventListener('click', () => on.retry());
}
