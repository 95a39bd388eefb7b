import { ApiError, Client } from './api.js';
import { WorkflowStore, SCREEN_ORDER } from './state.js';
import type { Screen } from './state.js';
import { CursorPoller } from './poll.js';
import type {
  AugmentSearchResult,
  ComparePayload,
  ConfusionView,
  DatasetList,
  DatasetProfile,
  MetricName,
  ParallelCoords,
  PdpCurve,
  PdpFeatureList,
  ProblemRecord,
  RuleSet,
  ScatterView,
  ScoreSummary,
  SolutionsPage,
  TaskType,
} from './types.js';
import { renderSelectDataset } from './screens/selectDataset.js';
import { renderSelectTask } from './screens/selectTask.js';
import { renderDefineProblem } from './screens/defineProblem.js';
import { renderConfigureSearch } from './screens/configureSearch.js';
import type { SearchConfig } from './screens/configureSearch.js';
import { renderExploreSolutions, appendSolutionRow } from './screens/exploreSolutions.js';
import { renderExplanations } from './screens/explanations.js';
import { renderAugmentation } from './screens/augmentation.js';
import { fmt, escapeHtml } from './format.js';

export interface AppOptions {
  session: string;
  pollIntervalMs?: number;
}

const SCREEN_TITLES: Record<Screen, string> = {
  'select-dataset': 'Select Dataset',
  'select-task': 'Select Task',
  'define-problem': 'Define Problem',
  'configure-search': 'Configure Search',
  'explore-solutions': 'Explore Solutions',
  explanations: 'Explain Solutions',
  augmentation: 'Data Augmentation',
};

// Everything fetched lives here verbatim; rendering reads payloads, never
// derived model state.
interface PayloadCache {
  datasets: DatasetList | null;
  profile: DatasetProfile | null;
  problem: ProblemRecord | null;
  solutions: SolutionsPage | null;
  summary: ScoreSummary | null;
  parallel: ParallelCoords | null;
  explainId: string | null;
  pdpFeatures: PdpFeatureList | null;
  pdp: PdpCurve | null;
  scatter: ScatterView | null;
  rules: RuleSet | null;
  confusion: ConfusionView | null;
  compare: ComparePayload | null;
  augment: AugmentSearchResult | null;
  augmentQuery: string;
  augmentDetail: string | null;
  augmentStale: string | null;
  augmentBusy: boolean;
  running: boolean;
}

function emptyCache(): PayloadCache {
  return {
    datasets: null,
    profile: null,
    problem: null,
    solutions: null,
    summary: null,
    parallel: null,
    explainId: null,
    pdpFeatures: null,
    pdp: null,
    scatter: null,
    rules: null,
    confusion: null,
    compare: null,
    augment: null,
    augmentQuery: '',
    augmentDetail: null,
    augmentStale: null,
    augmentBusy: false,
    running: false,
  };
}

export class App {
  readonly store = new WorkflowStore();
  readonly client: Client;
  private readonly root: HTMLElement;
  private readonly pollIntervalMs: number;
  private cache: PayloadCache = emptyCache();
  private poller: CursorPoller | null = null;

  constructor(root: HTMLElement, options: AppOptions) {
    this.root = root;
    this.client = new Client(options.session);
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    this.cache.datasets = await this.client.listDatasets();
    this.render();
  }

  // -- navigation-triggering actions ---------------------------------------

  async chooseDataset(name: string): Promise<void> {
    await this.guard(async () => {
      this.cache.profile = await this.client.profile(name);
      this.store.selectDataset(name);
      this.store.goTo('select-task');
    });
  }

  async uploadDataset(name: string, csvText: string): Promise<void> {
    await this.guard(async () => {
      await this.client.uploadDataset(name, csvText);
      this.cache.datasets = await this.client.listDatasets();
      this.render();
    });
  }

  chooseTask(task: TaskType): void {
    const metric = this.store.get().draft.primary_metric;
    this.store.updateDraft({ task_type: task, primary_metric: metric });
    this.store.goTo('define-problem');
  }

  draftReady(): void {
    this.store.goTo('configure-search');
  }

  async startSearch(config: SearchConfig): Promise<void> {
    await this.guard(async () => {
      const state = this.store.get();
      const draft = state.draft;
      const record = await this.client.createProblem(state.dataset!, {
        task_type: draft.task_type!,
        target: draft.target!,
        features: draft.features,
        primary_metric: draft.primary_metric!,
        budget: config.budget,
        eval_method: config.eval_method,
      });
      this.cache.problem = record;
      this.store.problemValidated(record.problem_id);

      const started = await this.client.startSearch(record.problem_id, config.seed);
      this.cache.solutions = null;
      this.cache.summary = null;
      this.cache.parallel = null;
      this.cache.running = true;
      this.store.runStarted(started.run_id);
      this.store.goTo('explore-solutions');
      this.startPolling(started.run_id);
    });
  }

  private startPolling(runId: string): void {
    this.poller?.stop();
    this.poller = new CursorPoller(
      (cursor) => this.client.events(runId, cursor),
      (page) => {
        for (const event of page.events) {
          if (event.kind === 'solution' && event.solution?.status === 'scored') {
            const main = this.main();
            if (main) appendSolutionRow(main, event.solution);
          }
        }
        if (page.state.startsWith('finished')) {
          this.cache.running = false;
          this.store.runFinished();
          void this.refreshRunViews(runId);
        }
      },
      {
        intervalMs: this.pollIntervalMs,
        onError: (err) => this.showError(err),
      },
    );
    this.poller.start();
  }

  private async refreshRunViews(runId: string, sort?: MetricName): Promise<void> {
    await this.guard(async () => {
      const metric = sort ?? this.cache.solutions?.metric;
      const [solutions, summary, parallel] = await Promise.all([
        this.client.solutions(runId, metric),
        this.client.summary(runId, metric),
        this.client.parallel(runId),
      ]);
      this.cache.solutions = solutions;
      this.cache.summary = summary;
      this.cache.parallel = parallel;
      this.render();
    });
  }

  async sortBy(metric: MetricName): Promise<void> {
    const runId = this.store.get().runId;
    if (runId) await this.refreshRunViews(runId, metric);
  }

  async openExplanations(solutionId: string): Promise<void> {
    const { runId, draft } = this.store.get();
    if (!runId) return;
    await this.guard(async () => {
      this.cache.explainId = solutionId;
      if (draft.task_type === 'regression') {
        this.cache.pdpFeatures = await this.client.pdpFeatures(runId, solutionId);
        const first = this.cache.pdpFeatures.features[0];
        this.cache.pdp = first
          ? await this.client.pdp(runId, solutionId, first)
          : null;
        this.cache.scatter = await this.client.scatter(runId, solutionId);
        this.cache.rules = null;
        this.cache.confusion = null;
      } else {
        this.cache.rules = await this.client.rules(runId, solutionId);
        this.cache.confusion = await this.client.confusionMatrix(runId, solutionId);
        this.cache.pdpFeatures = null;
        this.cache.pdp = null;
        this.cache.scatter = null;
      }
      this.store.goTo('explanations');
    });
  }

  async selectPdpFeature(feature: string): Promise<void> {
    const { runId } = this.store.get();
    const solutionId = this.cache.explainId;
    if (!runId || !solutionId) return;
    await this.guard(async () => {
      this.cache.pdp = await this.client.pdp(runId, solutionId, feature);
      this.render();
    });
  }

  async compareSolutions(a: string, b: string): Promise<void> {
    await this.guard(async () => {
      this.cache.compare = await this.client.compare(a, b);
      this.render();
    });
  }

  openAugmentation(): void {
    this.store.goTo('augmentation');
  }

  async searchAugmentations(keywords: string): Promise<void> {
    const dataset = this.store.get().dataset;
    if (!dataset) return;
    this.cache.augmentQuery = keywords;
    this.cache.augmentBusy = true;
    this.cache.augmentStale = null;
    this.render();
    await this.guard(async () => {
      this.cache.augment = await this.client.searchAugmentations(dataset, keywords);
    });
    this.cache.augmentBusy = false;
    this.render();
  }

  async applyAugmentation(candidateId: string): Promise<void> {
    const dataset = this.store.get().dataset;
    if (!dataset) return;
    try {
      const enlarged = await this.client.applyAugmentation(dataset, candidateId);
      this.cache.profile = enlarged;
      this.cache.augment = null;
      this.cache.augmentDetail = null;
      this.cache.augmentStale = null;
      // back to Define Problem with the enlarged schema; the draft survives
      this.store.datasetAugmented(enlarged.name);
      this.store.goTo('define-problem');
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.cache.augmentStale = candidateId;
        this.render();
        return;
      }
      this.showError(err);
    }
  }

  async retryAugmentation(): Promise<void> {
    if (this.cache.augmentQuery) {
      await this.searchAugmentations(this.cache.augmentQuery);
    }
  }

  // -- rendering ------------------------------------------------------------

  private main(): HTMLElement | null {
    return this.root.querySelector<HTMLElement>('main.screen');
  }

  render(): void {
    const state = this.store.get();
    const crumbs = SCREEN_ORDER
      .map((s) => {
        const cls = s === state.screen ? 'crumb current' : 'crumb';
        const disabled = this.store.canGo(s) || s === state.screen ? '' : 'disabled';
        return `<button class="${cls}" data-screen="${s}" ${disabled}>${SCREEN_TITLES[s]}</button>`;
      })
      .join('<span class="sep">›</span>');

    this.root.innerHTML = `
      <header class="workflow-nav">${crumbs}</header>
      ${state.error ? `<div class="error banner">${escapeHtml(state.error)}</div>` : ''}
      <main class="screen"></main>
    `;

    this.root.querySelectorAll('button.crumb').forEach((btn) => {
      btn.addEventListener('click', () => {
        const target = btn.getAttribute('data-screen') as Screen;
        if (this.store.canGo(target)) {
          this.store.goTo(target);
          if (target === 'explore-solutions' && this.store.get().runId
              && this.cache.solutions === null) {
            void this.refreshRunViews(this.store.get().runId!);
          }
        }
      });
    });

    const main = this.main()!;
    switch (state.screen) {
      case 'select-dataset':
        renderSelectDataset(main, this.cache.datasets ?? { datasets: [] }, {
          select: (name) => void this.chooseDataset(name),
          upload: (name, text) => void this.uploadDataset(name, text),
        });
        break;
      case 'select-task':
        if (this.cache.profile) {
          renderSelectTask(main, this.cache.profile, {
            choose: (task) => this.chooseTask(task),
          });
        }
        break;
      case 'define-problem':
        if (this.cache.profile) {
          renderDefineProblem(main, this.cache.profile, state.draft, {
            updateDraft: (patch) => this.store.updateDraft(patch),
            submit: () => this.draftReady(),
            openAugmentation: () => this.openAugmentation(),
          });
        }
        break;
      case 'configure-search':
        renderConfigureSearch(main, state.dataset ?? '', state.draft, {
          start: (config) => void this.startSearch(config),
        });
        break;
      case 'explore-solutions':
        if (this.cache.solutions) {
          renderExploreSolutions(
            main,
            {
              solutions: this.cache.solutions,
              summary: this.cache.summary,
              parallel: this.cache.parallel,
              running: this.cache.running,
            },
            {
              sort: (metric) => void this.sortBy(metric),
              openExplanations: (id) => void this.openExplanations(id),
              toggleCompare: (id) => this.store.toggleCompare(id),
              compare: (a, b) => void this.compareSolutions(a, b),
              cancel: () => void this.cancelRun(),
            },
          );
          if (this.cache.compare) this.renderComparePanel(main);
        } else {
          main.innerHTML = `
            <section class="explore-solutions">
              <h2>Explore Solutions</h2>
              <p class="status">${this.cache.running ? 'search running…' : 'no solutions yet'}</p>
              <table class="solutions"><tbody></tbody></table>
            </section>
          `;
        }
        break;
      case 'explanations':
        if (this.cache.explainId && state.draft.task_type) {
          renderExplanations(
            main,
            {
              solutionId: this.cache.explainId,
              task: state.draft.task_type,
              features: state.draft.features,
              pdpFeatures: this.cache.pdpFeatures,
              pdp: this.cache.pdp,
              scatter: this.cache.scatter,
              rules: this.cache.rules,
              confusion: this.cache.confusion,
            },
            { selectPdpFeature: (f) => void this.selectPdpFeature(f) },
          );
        }
        break;
      case 'augmentation':
        renderAugmentation(
          main,
          {
            query: this.cache.augmentQuery,
            result: this.cache.augment,
            detailId: this.cache.augmentDetail,
            staleId: this.cache.augmentStale,
            busy: this.cache.augmentBusy,
          },
          {
            search: (kw) => void this.searchAugmentations(kw),
            viewDetails: (id) => {
              this.cache.augmentDetail = id;
              this.render();
            },
            closeDetails: () => {
              this.cache.augmentDetail = null;
              this.render();
            },
            apply: (id) => void this.applyAugmentation(id),
            retry: () => void this.retryAugmentation(),
            back: () => this.store.goTo('define-problem'),
          },
        );
        break;
    }
  }

  private renderComparePanel(main: HTMLElement): void {
    const cmp = this.cache.compare!;
    const row = (label: string, metrics: Record<string, number | null>) =>
      `<tr><th>${escapeHtml(label)}</th>${Object.entries(metrics)
        .map(([m, v]) => `<td>${m} ${fmt(v)}</td>`)
        .join('')}</tr>`;
    const diffRows = cmp.diff
      .map((d) => `<tr class="diff ${d.label}"><td>${escapeHtml(d.name)}</td><td>${d.label}</td></tr>`)
      .join('');
    main.insertAdjacentHTML(
      'beforeend',
      `
      <section class="compare-panel">
        <h3>compare ${cmp.a.solution_id} vs ${cmp.b.solution_id}</h3>
        <table class="compare-metrics">
          ${row(cmp.a.solution_id, cmp.a.report?.metrics ?? {})}
          ${row(cmp.b.solution_id, cmp.b.report?.metrics ?? {})}
        </table>
        <table class="compare-diff"><tbody>${diffRows}</tbody></table>
      </section>
    `,
    );
  }

  private async cancelRun(): Promise<void> {
    const runId = this.store.get().runId;
    if (!runId) return;
    await this.guard(async () => {
      await this.client.cancelRun(runId);
    });
  }

  // -- error plumbing ---------------------------------------------------------

  private async guard(fn: () => Promise<void>): Promise<void> {
    try {
      await fn();
    } catch (err) {
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    const message = err instanceof ApiError
      ? `${err.code}: ${err.message}`
      : err instanceof Error
        ? err.message
        : String(err);
    this.store.setError(message);
  }
}

export function createApp(root: HTMLElement, options: AppOptions): App {
  return new App(root, options);
}
