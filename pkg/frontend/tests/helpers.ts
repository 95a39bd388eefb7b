import { readFileSync } from 'node:fs';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';
import { vi } from 'vitest';

const HERE = dirname(fileURLToPath(import.meta.url));

export interface Fixtures {
  meta: {
    session: string;
    run: string;
    best: string;
    flat_run: string;
    flat_solution: string;
    cls_run: string;
    cls_best: string;
    candidate: string;
  };
  responses: Record<string, unknown>;
}

let cached: Fixtures | null = null;

/** Responses recorded from the live service by tests/fixtures/record.py. */
export function loadFixtures(): Fixtures {
  if (cached === null) {
    cached = JSON.parse(
      readFileSync(join(HERE, 'fixtures', 'fixtures.json'), 'utf-8'),
    ) as Fixtures;
  }
  return cached;
}

export interface FetchStub {
  /** Requests seen so far, as "METHOD path?query" keys. */
  calls: string[];
  /** Replace or add a response; value may be a Response for errors. */
  override(key: string, value: unknown): void;
  restore(): void;
}

/**
 * Replays the recorded API conversation: every fetch is matched by method
 * plus path-with-query against the fixture keys. Unknown requests throw so a
 * test can never silently invent data the server never sent.
 */
export function installFixtureFetch(): FetchStub {
  const fixtures = loadFixtures();
  const overrides = new Map<string, unknown>();
  const calls: string[] = [];

  const fetchMock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === 'string' ? input : input instanceof URL ? input.href : input.url;
    const method = (init?.method ?? 'GET').toUpperCase();
    const parsed = new URL(url, 'http://fixture');
    const key = `${method} ${parsed.pathname}${parsed.search}`;
    calls.push(key);

    if (overrides.has(key)) {
      const value = overrides.get(key);
      if (value instanceof Response) return value.clone();
      return new Response(JSON.stringify(value), {
        status: 200,
        headers: { 'content-type': 'application/json' },
      });
    }
    const payload = fixtures.responses[key];
    if (payload === undefined) {
      throw new Error(`no recorded response for "${key}"`);
    }
    return new Response(JSON.stringify(payload), {
      status: 200,
      headers: { 'content-type': 'application/json' },
    });
  });

  vi.stubGlobal('fetch', fetchMock);

  return {
    calls,
    override(key: string, value: unknown) {
      overrides.set(key, value);
    },
    restore() {
      vi.unstubAllGlobals();
    },
  };
}

export function mount(): HTMLElement {
  const el = document.createElement('div');
  document.body.appendChild(el);
  return el;
}

/** Wait until the microtask queue settles so chained awaits resolve. */
export async function flush(times = 6): Promise<void> {
  for (let i = 0; i < times; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
