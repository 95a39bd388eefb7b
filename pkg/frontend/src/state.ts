import type { MetricName, TaskType } from './types.js';

// The six workflow screens in order, plus the augmentation tab which branches
// off Define Problem and returns there.
export const SCREEN_ORDER = [
  'select-dataset',
  'select-task',
  'define-problem',
  'configure-search',
  'explore-solutions',
  'explanations',
] as const;

export type Screen = (typeof SCREEN_ORDER)[number] | 'augmentation';

export interface ProblemDraft {
  target: string | null;
  features: string[];
  task_type: TaskType | null;
  primary_metric: MetricName | null;
}

export interface WorkflowState {
  screen: Screen;
  dataset: string | null;
  draft: ProblemDraft;
  problemId: string | null; // last server-validated problem
  runId: string | null; // last started search run
  runFinished: boolean;
  compareSelection: string[]; // solution ids picked for side-by-side view
  error: string | null;
}

export function emptyDraft(): ProblemDraft {
  return { target: null, features: [], task_type: null, primary_metric: null };
}

function initialState(): WorkflowState {
  return {
    screen: 'select-dataset',
    dataset: null,
    draft: emptyDraft(),
    problemId: null,
    runId: null,
    runFinished: false,
    compareSelection: [],
    error: null,
  };
}

type Listener = (state: WorkflowState) => void;

/**
 * Single source of UI navigation truth. Forward transitions advance one
 * screen at a time; backward transitions may jump to any earlier screen.
 * Going back never clears a validated problem or a finished run: those
 * fields are only ever replaced when the server acknowledges a new one.
 */
export class WorkflowStore {
  private state: WorkflowState = initialState();
  private listeners: Listener[] = [];

  get(): WorkflowState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  private set(patch: Partial<WorkflowState>): void {
    this.state = { ...this.state, ...patch };
    this.emit();
  }

  canGo(target: Screen): boolean {
    const current = this.state.screen;
    if (target === current) return true;
    // augmentation branches off Define Problem and returns there
    if (target === 'augmentation') return current === 'define-problem';
    if (current === 'augmentation') return target === 'define-problem';
    const from = SCREEN_ORDER.indexOf(current as (typeof SCREEN_ORDER)[number]);
    const to = SCREEN_ORDER.indexOf(target);
    return to < from || to === from + 1;
  }

  goTo(target: Screen): void {
    if (!this.canGo(target)) {
      throw new Error(`cannot navigate from ${this.state.screen} to ${target}`);
    }
    this.set({ screen: target, error: null });
  }

  selectDataset(name: string): void {
    // a fresh dataset invalidates the draft but not past validated work
    const draft = name === this.state.dataset ? this.state.draft : emptyDraft();
    this.set({ dataset: name, draft });
  }

  datasetAugmented(name: string): void {
    // augmentation only widens the schema, so the draft stays valid
    this.set({ dataset: name });
  }

  updateDraft(patch: Partial<ProblemDraft>): void {
    this.set({ draft: { ...this.state.draft, ...patch } });
  }

  problemValidated(problemId: string): void {
    this.set({ problemId });
  }

  runStarted(runId: string): void {
    this.set({ runId, runFinished: false, compareSelection: [] });
  }

  runFinished(): void {
    this.set({ runFinished: true });
  }

  toggleCompare(solutionId: string): void {
    const current = this.state.compareSelection;
    const next = current.includes(solutionId)
      ? current.filter((id) => id !== solutionId)
      : [...current, solutionId].slice(-2); // at most two side by side
    this.set({ compareSelection: next });
  }

  setError(message: string | null): void {
    this.set({ error: message });
  }
}
