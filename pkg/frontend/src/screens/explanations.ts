import type {
  ConfusionView,
  PdpCurve,
  PdpFeatureList,
  RuleSet,
  ScatterView,
  TaskType,
} from '../types.js';
import { renderPdp } from '../charts/pdp.js';
import { renderScatter } from '../charts/scatter.js';
import { renderRuleMatrix } from '../charts/ruleMatrix.js';
import { renderConfusionMatrix } from '../charts/confusion.js';
import { escapeHtml } from '../format.js';

export interface ExplanationsData {
  solutionId: string;
  task: TaskType;
  features: string[];
  // regression views
  pdpFeatures: PdpFeatureList | null;
  pdp: PdpCurve | null;
  scatter: ScatterView | null;
  // classification views
  rules: RuleSet | null;
  confusion: ConfusionView | null;
}

export interface ExplanationsHandlers {
  selectPdpFeature(feature: string): void;
}

/**
 * Per-task explanation views: partial dependence and the prediction scatter
 * for regression, surrogate rules and the confusion matrix for
 * classification. All curves and counts are server-computed.
 */
export function renderExplanations(
  el: HTMLElement,
  data: ExplanationsData,
  on: ExplanationsHandlers,
): void {
  const regression = data.task === 'regression';

  const pdpSection = regression
    ? `
      <div class="panel pdp-panel">
        <h3>partial dependence</h3>
        <label>feature
          <select name="pdp-feature">
            ${(data.pdpFeatures?.features ?? [])
              .map((f) => `<option value="${escapeHtml(f)}" ${data.pdp?.feature === f ? 'selected' : ''}>${escapeHtml(f)}</option>`)
              .join('')}
          </select>
        </label>
        <div class="pdp-chart"></div>
      </div>
      <div class="panel scatter-panel">
        <h3>predicted vs actual</h3>
        <div class="scatter-chart"></div>
      </div>
    `
    : `
      <div class="panel rules-panel">
        <h3>surrogate rules</h3>
        <div class="rule-matrix-chart"></div>
      </div>
      <div class="panel confusion-panel">
        <h3>confusion matrix</h3>
        <div class="confusion-chart"></div>
      </div>
    `;

  el.innerHTML = `
    <section class="explanations">
      <h2>Explain Solution <code>${escapeHtml(data.solutionId)}</code></h2>
      <div class="panels">${pdpSection}</div>
    </section>
  `;

  if (regression) {
    if (data.pdp) renderPdp(el.querySelector<HTMLElement>('.pdp-chart')!, data.pdp);
    if (data.scatter) {
      renderScatter(el.querySelector<HTMLElement>('.scatter-chart')!, data.scatter);
    }
    const picker = el.querySelector<HTMLSelectElement>('select[name="pdp-feature"]');
    if (picker) {
      picker.addEventListener('change', () => on.selectPdpFeature(picker.value));
    }
  } else {
    if (data.rules) {
      renderRuleMatrix(
        el.querySelector<HTMLElement>('.rule-matrix-chart')!,
        data.rules,
        data.features,
      );
    }
    if (data.confusion) {
      renderConfusionMatrix(el.querySelector<HTMLElement>('.confusion-chart')!, data.confusion);
    }
  }
}
