import type {
  AugmentSearchResult,
  ComparePayload,
  ConfusionView,
  DatasetList,
  DatasetProfile,
  EventsPage,
  MetricName,
  ParallelCoords,
  PdpCurve,
  PdpFeatureList,
  ProblemRecord,
  ProblemSpecPayload,
  RuleSet,
  ScatterView,
  ScoreSummary,
  SolutionsPage,
  StartedRun,
} from './types.js';

// Same-origin by default; override for a detached dev server.
const BASE: string =
  (globalThis as { TABPILOT_API?: string }).TABPILOT_API ?? '';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const init: RequestInit = { method };
  if (body !== undefined) {
    init.headers = { 'Content-Type': 'application/json' };
    init.body = JSON.stringify(body);
  }
  const res = await fetch(`${BASE}${path}`, init);
  if (!res.ok) {
    let code = 'HTTP_ERROR';
    let detail = `${method} ${path} failed with status ${res.status}`;
    try {
      const payload = await res.json();
      if (payload && typeof payload.error === 'string') code = payload.error;
      if (payload && typeof payload.detail === 'string') detail = payload.detail;
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(res.status, code, detail);
  }
  return res.json() as Promise<T>;
}

export async function createSession(): Promise<string> {
  const payload = await request<{ session_id: string }>('POST', '/sessions');
  return payload.session_id;
}

/** All calls of one workflow session. Holds the session id and nothing else. */
export class Client {
  constructor(readonly session: string) {}

  private url(suffix: string): string {
    return `/sessions/${this.session}${suffix}`;
  }

  listDatasets(): Promise<DatasetList> {
    return request('GET', this.url('/datasets'));
  }

  uploadDataset(name: string, csvText: string): Promise<DatasetProfile> {
    return fetch(`${BASE}${this.url(`/datasets?name=${encodeURIComponent(name)}`)}`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/csv' },
      body: csvText,
    }).then(async (res) => {
      if (!res.ok) {
        const payload = await res.json().catch(() => ({}));
        throw new ApiError(res.status, payload.error ?? 'HTTP_ERROR',
          payload.detail ?? `upload failed with status ${res.status}`);
      }
      return res.json();
    });
  }

  profile(dataset: string): Promise<DatasetProfile> {
    return request('GET', this.url(`/datasets/${dataset}/profile`));
  }

  createProblem(dataset: string, spec: ProblemSpecPayload): Promise<ProblemRecord> {
    return request('POST', this.url('/problems'), { dataset, spec });
  }

  startSearch(problemId: string, seed?: number): Promise<StartedRun> {
    const body = seed === undefined ? {} : { seed };
    return request('POST', this.url(`/problems/${problemId}/search`), body);
  }

  events(runId: string, cursor: number): Promise<EventsPage> {
    return request('GET', this.url(`/runs/${runId}/events?cursor=${cursor}`));
  }

  cancelRun(runId: string): Promise<unknown> {
    return request('DELETE', this.url(`/runs/${runId}`));
  }

  solutions(runId: string, sort?: MetricName): Promise<SolutionsPage> {
    const q = sort === undefined ? '' : `?sort=${sort}`;
    return request('GET', this.url(`/runs/${runId}/solutions${q}`));
  }

  summary(runId: string, metric?: MetricName): Promise<ScoreSummary> {
    const q = metric === undefined ? '' : `?metric=${metric}`;
    return request('GET', this.url(`/runs/${runId}/summary${q}`));
  }

  parallel(runId: string): Promise<ParallelCoords> {
    return request('GET', this.url(`/runs/${runId}/parallel`));
  }

  pdpFeatures(runId: string, solutionId: string): Promise<PdpFeatureList> {
    return request('GET', this.url(`/runs/${runId}/solutions/${solutionId}/explain/pdp`));
  }

  pdp(runId: string, solutionId: string, feature: string): Promise<PdpCurve> {
    return request('GET', this.url(
      `/runs/${runId}/solutions/${solutionId}/explain/pdp?feature=${encodeURIComponent(feature)}`));
  }

  scatter(runId: string, solutionId: string): Promise<ScatterView> {
    return request('GET', this.url(`/runs/${runId}/solutions/${solutionId}/explain/scatter`));
  }

  rules(runId: string, solutionId: string): Promise<RuleSet> {
    return request('GET', this.url(`/runs/${runId}/solutions/${solutionId}/explain/rules`));
  }

  confusionMatrix(runId: string, solutionId: string): Promise<ConfusionView> {
    return request('GET', this.url(
      `/runs/${runId}/solutions/${solutionId}/explain/confusion_matrix`));
  }

  compare(a: string, b: string): Promise<ComparePayload> {
    return request('GET', this.url(`/solutions/compare?a=${a}&b=${b}`));
  }

  searchAugmentations(dataset: string, keywords: string): Promise<AugmentSearchResult> {
    return request('GET', this.url(
      `/datasets/${dataset}/augment?keywords=${encodeURIComponent(keywords)}`));
  }

  applyAugmentation(dataset: string, candidateId: string, name?: string): Promise<DatasetProfile> {
    const body: { candidate_id: string; name?: string } = { candidate_id: candidateId };
    if (name !== undefined) body.name = name;
    return request('POST', this.url(`/datasets/${dataset}/augment/apply`), body);
  }
}
