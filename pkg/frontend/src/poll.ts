import type { EventsPage } from './types.js';

export interface PollerOptions {
  intervalMs?: number; // default 1s
  onError?: (err: unknown) => void;
}

/**
 * Pulls run events with a monotone cursor until the run reports a terminal
 * state. One request in flight at a time; pages are delivered in order.
 */
export class CursorPoller {
  private cursor = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;
  private readonly intervalMs: number;
  private readonly onError: (err: unknown) => void;

  constructor(
    private readonly fetchPage: (cursor: number) => Promise<EventsPage>,
    private readonly onPage: (page: EventsPage) => void,
    options: PollerOptions = {},
  ) {
    this.intervalMs = options.intervalMs ?? 1000;
    this.onError = options.onError ?? (() => undefined);
  }

  start(): void {
    this.stopped = false;
    void this.tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async tick(): Promise<void> {
    if (this.stopped) return;
    let page: EventsPage;
    try {
      page = await this.fetchPage(this.cursor);
    } catch (err) {
      this.onError(err);
      return;
    }
    this.cursor = page.cursor;
    this.onPage(page);
    if (this.stopped || page.state.startsWith('finished') || page.state === 'cancelled') {
      return;
    }
    this.timer = setTimeout(() => void this.tick(), this.intervalMs);
  }
}
