import type { Rule, RuleSet } from '../types.js';
import { fmt, escapeHtml } from '../format.js';

// A rule constrains a feature through a conjunction of threshold predicates;
// collapse them to one printable interval per cell.
function intervalFor(rule: Rule, feature: string): string {
  let lower: number | null = null;
  let upper: number | null = null;
  const equals: string[] = [];
  for (const p of rule.predicates) {
    if (p.feature !== feature) continue;
    if (p.op === '=') {
      equals.push(String(p.value));
    } else if (p.op === '>') {
      const v = Number(p.value);
      lower = lower === null ? v : Math.max(lower, v);
    } else {
      const v = Number(p.value);
      upper = upper === null ? v : Math.min(upper, v);
    }
  }
  if (equals.length > 0) return `= ${equals.join(', ')}`;
  if (lower !== null && upper !== null) return `(${fmt(lower)}, ${fmt(upper)}]`;
  if (lower !== null) return `> ${fmt(lower)}`;
  if (upper !== null) return `≤ ${fmt(upper)}`;
  return '·'; // unconstrained
}

/**
 * Surrogate rules as a matrix: one row per rule, one column per feature,
 * cells show the rule's interval on that feature. Support and confidence sit
 * in side columns; set-level fidelity goes in the caption.
 */
export function renderRuleMatrix(el: HTMLElement, ruleSet: RuleSet, features: string[]): void {
  const { rules, fidelity, low_fidelity: lowFidelity, degenerate } = ruleSet;

  if (rules.length === 0) {
    el.innerHTML = '<p class="empty">no rules extracted</p>';
    return;
  }

  const head = [
    ...features.map((f) => `<th class="feature">${escapeHtml(f)}</th>`),
    '<th>class</th>',
    '<th>support</th>',
    '<th>confidence</th>',
  ].join('');

  const body = rules
    .map((rule) => {
      const cells = features
        .map((f) => `<td class="interval">${escapeHtml(intervalFor(rule, f))}</td>`)
        .join('');
      return `<tr class="rule">${cells}<td class="predicted">${escapeHtml(rule.predicted_class)}</td><td class="support">${rule.support}</td><td class="confidence">${fmt(rule.confidence, 3)}</td></tr>`;
    })
    .join('');

  const notes: string[] = [];
  if (lowFidelity) notes.push('<p class="warning">surrogate fidelity is low; rules approximate the model loosely</p>');
  if (degenerate) notes.push('<p class="warning">model predicts one class everywhere; a single universal rule covers it</p>');

  el.innerHTML = `
    <table class="rule-matrix">
      <caption>surrogate rules, fidelity ${fmt(fidelity, 3)}</caption>
      <thead><tr>${head}</tr></thead>
      <tbody>${body}</tbody>
    </table>
    ${notes.join('')}
  `;
}
