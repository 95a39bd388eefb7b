import { createApp } from './app.js';
import { createSession } from './api.js';

// Reuse the session from the URL hash so a reload keeps the workflow;
// otherwise open a fresh one.
async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');
  let session = window.location.hash.replace(/^#/, '');
  if (!session) {
    session = await createSession();
    window.location.hash = session;
  }
  const app = createApp(root, { session });
  await app.start();
}

void boot();
