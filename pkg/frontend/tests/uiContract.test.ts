import { afterEach, beforeEach, describe, expect, it } from 'vitest';
import { createApp, App } from '../src/app.js';
import { renderExplanations } from '../src/screens/explanations.js';
import type {
  DatasetProfile,
  PdpCurve,
  ScoreSummary,
  SolutionsPage,
} from '../src/types.js';
import { installFixtureFetch, loadFixtures, mount, flush } from './helpers.js';
import type { FetchStub } from './helpers.js';

const fixtures = loadFixtures();
const { meta } = fixtures;
const SID = meta.session;

function fixture<T>(key: string): T {
  const payload = fixtures.responses[key];
  if (payload === undefined) throw new Error(`fixture missing: ${key}`);
  return payload as T;
}

let stub: FetchStub;
let root: HTMLElement;

beforeEach(() => {
  stub = installFixtureFetch();
  root = mount();
});

afterEach(() => {
  stub.restore();
  document.body.innerHTML = '';
});

async function driveToExplore(): Promise<App> {
  const app = createApp(root, { session: SID, pollIntervalMs: 1 });
  await app.start();
  await app.chooseDataset('collisions');
  app.chooseTask('regression');
  app.store.updateDraft({
    target: 'collisions',
    features: ['trips'],
    primary_metric: 'mae',
  });
  app.draftReady();
  await app.startSearch({
    budget: { max_pipelines: 8, time_limit_seconds: 60 },
    eval_method: { kind: 'kfold', k: 4 },
    seed: 11,
  });
  await flush(); // poller page + ranked view refresh
  return app;
}

describe('explore solutions', () => {
  it('renders one table row per scored solution', async () => {
    await driveToExplore();
    const page = fixture<SolutionsPage>(`GET /sessions/${SID}/runs/${meta.run}/solutions`);
    const rows = root.querySelectorAll('tr.solution');
    expect(rows.length).toBe(page.ranking.length);
    expect(rows.length).toBe(page.solutions.filter((s) => s.status === 'scored').length);
    const ids = Array.from(rows).map((r) => r.getAttribute('data-solution-id'));
    expect(ids).toEqual(page.ranking);
  });

  it('hovering a row highlights exactly its histogram bin', async () => {
    await driveToExplore();
    const summary = fixture<ScoreSummary>(`GET /sessions/${SID}/runs/${meta.run}/summary`);
    const target = 'r1-6';
    const row = root.querySelector(`tr.solution[data-solution-id="${target}"]`)!;
    row.dispatchEvent(new MouseEvent('mouseenter'));

    const highlighted = root.querySelectorAll('.score-histogram rect.bin.highlight');
    expect(highlighted.length).toBe(1);
    expect(highlighted[0].getAttribute('data-bin')).toBe(String(summary.bin_of[target]));

    // the parallel-coordinates polyline follows the same hover
    const lines = root.querySelectorAll('.parallel-coords polyline.coord-line.highlight');
    expect(lines.length).toBe(1);
    expect(lines[0].getAttribute('data-solution-id')).toBe(target);

    row.dispatchEvent(new MouseEvent('mouseleave'));
    expect(root.querySelectorAll('.score-histogram rect.bin.highlight').length).toBe(0);
    expect(root.querySelectorAll('polyline.coord-line.highlight').length).toBe(0);
  });

  it('every row hover matches the server bin_of map', async () => {
    await driveToExplore();
    const summary = fixture<ScoreSummary>(`GET /sessions/${SID}/runs/${meta.run}/summary`);
    for (const row of Array.from(root.querySelectorAll('tr.solution'))) {
      const id = row.getAttribute('data-solution-id')!;
      row.dispatchEvent(new MouseEvent('mouseenter'));
      const highlighted = root.querySelectorAll('rect.bin.highlight');
      expect(highlighted.length).toBe(1);
      expect(highlighted[0].getAttribute('data-bin')).toBe(String(summary.bin_of[id]));
      row.dispatchEvent(new MouseEvent('mouseleave'));
    }
  });

  it('metric-sort order matches the server ranking', async () => {
    await driveToExplore();
    const sortBtn = root.querySelector<HTMLButtonElement>('button.sort[data-metric="rmse"]')!;
    sortBtn.click();
    await flush();

    const sorted = fixture<SolutionsPage>(
      `GET /sessions/${SID}/runs/${meta.run}/solutions?sort=rmse`,
    );
    const ids = Array.from(root.querySelectorAll('tr.solution')).map((r) =>
      r.getAttribute('data-solution-id'),
    );
    expect(ids).toEqual(sorted.ranking);
    // the order came from the server, not a client-side sort
    expect(stub.calls).toContain(`GET /sessions/${SID}/runs/${meta.run}/solutions?sort=rmse`);
  });
});

describe('explanations', () => {
  it('renders a horizontal line for the flat partial-dependence fixture', () => {
    const flat = fixture<PdpCurve>(
      `GET /sessions/${SID}/runs/${meta.flat_run}/solutions/${meta.flat_solution}/explain/pdp?feature=x2`,
    );
    // the recorded curve is flat only up to float noise
    const spread = Math.max(...flat.values) - Math.min(...flat.values);
    expect(spread).toBeGreaterThan(0);
    expect(spread).toBeLessThan(1e-9);

    renderExplanations(
      root,
      {
        solutionId: meta.flat_solution,
        task: 'regression',
        features: ['x1', 'x2'],
        pdpFeatures: { features: ['x1', 'x2'] },
        pdp: flat,
        scatter: null,
        rules: null,
        confusion: null,
      },
      { selectPdpFeature: () => undefined },
    );

    const line = root.querySelector('polyline.pdp-curve')!;
    expect(line).not.toBeNull();
    const ys = line
      .getAttribute('points')!
      .trim()
      .split(/\s+/)
      .map((pt) => pt.split(',')[1]);
    expect(new Set(ys).size).toBe(1);
  });

  it('opens regression views from a solution row', async () => {
    const app = await driveToExplore();
    await app.openExplanations(meta.best);
    await flush();
    expect(app.store.get().screen).toBe('explanations');
    const curve = fixture<PdpCurve>(
      `GET /sessions/${SID}/runs/${meta.run}/solutions/${meta.best}/explain/pdp?feature=trips`,
    );
    const line = root.querySelector('polyline.pdp-curve')!;
    expect(line.getAttribute('points')!.trim().split(/\s+/).length).toBe(curve.grid.length);
    expect(root.querySelectorAll('svg.scatter circle.dot').length).toBeGreaterThan(0);
    expect(root.querySelector('svg.scatter line.diagonal')).not.toBeNull();
  });
});

describe('augmentation', () => {
  async function driveToDefineProblem(): Promise<App> {
    const app = createApp(root, { session: SID, pollIntervalMs: 1 });
    await app.start();
    await app.chooseDataset('collisions');
    app.chooseTask('regression');
    app.store.updateDraft({
      target: 'collisions',
      features: ['trips'],
      primary_metric: 'mae',
    });
    return app;
  }

  it('apply navigates back to Define Problem with the enlarged feature list', async () => {
    const app = await driveToDefineProblem();
    const before = fixture<DatasetProfile>(`GET /sessions/${SID}/datasets/collisions/profile`);
    expect(root.querySelectorAll('article.column-card').length).toBe(before.columns.length);

    app.openAugmentation();
    await app.searchAugmentations('weather');
    await flush();

    const applyBtn = root.querySelector<HTMLButtonElement>(
      `article.candidate-card button.apply[data-candidate="${meta.candidate}"]`,
    )!;
    expect(applyBtn).not.toBeNull();
    applyBtn.click();
    await flush();

    expect(app.store.get().screen).toBe('define-problem');

    const joined = fixture<DatasetProfile>(
      `POST /sessions/${SID}/datasets/collisions/augment/apply`,
    );
    const cards = Array.from(root.querySelectorAll('article.column-card'));
    const names = cards.map((c) => c.getAttribute('data-column'));
    expect(names).toEqual(joined.columns.map((c) => c.name));
    expect(names).toContain('temperature');
    expect(names).toContain('humidity');
    expect(cards.length).toBeGreaterThan(before.columns.length);

    // the joined columns are offered as addable features
    const options = Array.from(root.querySelectorAll('datalist option')).map((o) =>
      o.getAttribute('value'),
    );
    expect(options).toContain('temperature');
    expect(options).toContain('humidity');

    // back-navigation did not lose the draft
    const draft = app.store.get().draft;
    expect(draft.target).toBe('collisions');
    expect(draft.features).toEqual(['trips']);
    expect(app.store.get().dataset).toBe(joined.name);
  });

  it('a conflict on apply surfaces a retry prompt that re-runs the search', async () => {
    const app = await driveToDefineProblem();
    app.openAugmentation();
    await app.searchAugmentations('weather');
    await flush();

    stub.override(
      `POST /sessions/${SID}/datasets/collisions/augment/apply`,
      new Response(
        JSON.stringify({
          error: 'STALE_CANDIDATE',
          detail: 'dataset changed since candidate was computed',
        }),
        { status: 409, headers: { 'content-type': 'application/json' } },
      ),
    );

    root
      .querySelector<HTMLButtonElement>(
        `article.candidate-card button.apply[data-candidate="${meta.candidate}"]`,
      )!
      .click();
    await flush();

    expect(app.store.get().screen).toBe('augmentation');
    const banner = root.querySelector('.banner.stale')!;
    expect(banner).not.toBeNull();
    const searchesBefore = stub.calls.filter((c) => c.includes('/augment?')).length;
    banner.querySelector<HTMLButtonElement>('button.retry')!.click();
    await flush();
    const searchesAfter = stub.calls.filter((c) => c.includes('/augment?')).length;
    expect(searchesAfter).toBe(searchesBefore + 1);
    expect(root.querySelectorAll('article.candidate-card').length).toBeGreaterThan(0);
  });

  it('an empty result renders the empty-state message', async () => {
    const app = await driveToDefineProblem();
    app.openAugmentation();
    stub.override(`GET /sessions/${SID}/datasets/collisions/augment?keywords=nonsense`, {
      keywords: ['nonsense'],
      candidates: [],
      warnings: [],
    });
    await app.searchAugmentations('nonsense');
    await flush();
    expect(root.querySelector('.augmentation .empty')).not.toBeNull();
    expect(root.querySelectorAll('article.candidate-card').length).toBe(0);
  });
});
