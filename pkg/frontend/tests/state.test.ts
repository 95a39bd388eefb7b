import { describe, expect, it } from 'vitest';
import { WorkflowStore, SCREEN_ORDER } from '../src/state.js';

function storeAt(screen: (typeof SCREEN_ORDER)[number]): WorkflowStore {
  const store = new WorkflowStore();
  const upto = SCREEN_ORDER.indexOf(screen);
  for (let i = 1; i <= upto; i += 1) store.goTo(SCREEN_ORDER[i]);
  return store;
}

describe('workflow transitions', () => {
  it('starts at Select Dataset', () => {
    expect(new WorkflowStore().get().screen).toBe('select-dataset');
  });

  it('moves forward one screen at a time', () => {
    const store = new WorkflowStore();
    expect(store.canGo('select-task')).toBe(true);
    expect(store.canGo('define-problem')).toBe(false);
    expect(store.canGo('explore-solutions')).toBe(false);
    expect(() => store.goTo('explanations')).toThrow();
  });

  it('allows jumping back to any earlier screen', () => {
    const store = storeAt('explanations');
    expect(store.canGo('select-dataset')).toBe(true);
    expect(store.canGo('define-problem')).toBe(true);
    store.goTo('define-problem');
    expect(store.get().screen).toBe('define-problem');
  });

  it('reaches augmentation only from Define Problem and returns there', () => {
    const store = storeAt('define-problem');
    expect(store.canGo('augmentation')).toBe(true);
    store.goTo('augmentation');
    expect(store.canGo('define-problem')).toBe(true);
    expect(store.canGo('configure-search')).toBe(false);
    expect(store.canGo('select-dataset')).toBe(false);
    store.goTo('define-problem');
    expect(store.get().screen).toBe('define-problem');

    const early = storeAt('select-task');
    expect(early.canGo('augmentation')).toBe(false);
  });

  it('back-navigation never loses a validated problem or a finished run', () => {
    const store = storeAt('explore-solutions');
    store.problemValidated('p1');
    store.runStarted('r1');
    store.runFinished();

    store.goTo('select-dataset');
    expect(store.get().problemId).toBe('p1');
    expect(store.get().runId).toBe('r1');
    expect(store.get().runFinished).toBe(true);

    // forward again: the run is still there to return to
    store.goTo('select-task');
    expect(store.get().runId).toBe('r1');
  });
});

describe('draft handling', () => {
  it('switching datasets resets the draft', () => {
    const store = new WorkflowStore();
    store.selectDataset('a');
    store.updateDraft({ target: 't', features: ['x'] });
    store.selectDataset('b');
    expect(store.get().draft.target).toBeNull();
    expect(store.get().draft.features).toEqual([]);
  });

  it('re-selecting the same dataset keeps the draft', () => {
    const store = new WorkflowStore();
    store.selectDataset('a');
    store.updateDraft({ target: 't' });
    store.selectDataset('a');
    expect(store.get().draft.target).toBe('t');
  });

  it('augmentation widens the dataset without touching the draft', () => {
    const store = new WorkflowStore();
    store.selectDataset('a');
    store.updateDraft({ target: 't', features: ['x'] });
    store.datasetAugmented('a_x_b');
    expect(store.get().dataset).toBe('a_x_b');
    expect(store.get().draft.target).toBe('t');
    expect(store.get().draft.features).toEqual(['x']);
  });
});

describe('compare selection', () => {
  it('keeps at most two solutions', () => {
    const store = new WorkflowStore();
    store.toggleCompare('s1');
    store.toggleCompare('s2');
    store.toggleCompare('s3');
    expect(store.get().compareSelection).toEqual(['s2', 's3']);
    store.toggleCompare('s2');
    expect(store.get().compareSelection).toEqual(['s3']);
  });

  it('is cleared when a new run starts', () => {
    const store = new WorkflowStore();
    store.toggleCompare('s1');
    store.runStarted('r9');
    expect(store.get().compareSelection).toEqual([]);
  });
});

describe('subscriptions', () => {
  it('notifies on every change and honors unsubscribe', () => {
    const store = new WorkflowStore();
    let seen = 0;
    const off = store.subscribe(() => {
      seen += 1;
    });
    store.selectDataset('a');
    store.updateDraft({ target: 't' });
    expect(seen).toBe(2);
    off();
    store.updateDraft({ target: 'u' });
    expect(seen).toBe(2);
  });
});
