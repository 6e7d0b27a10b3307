// View state and the job polling loop. Pure of DOM concerns so the logic
// is directly testable; main.ts owns rendering.

import type { ApiClient, JobView, PromptBody } from './api.js';
import type { VoxelBox } from './transform.js';

export type OverlayMode = 'prediction' | 'agreement';

export interface ViewState {
  volumeId: string | null;
  dims: [number, number, number] | null;
  z: number;
  strategy: string;
  backendId: string;
  promptDraft: { box: VoxelBox; z: number } | null;
  jobId: string | null;
  overlayMode: OverlayMode;
}

export function initialState(): ViewState {
  return {
    volumeId: null,
    dims: null,
    z: 0,
    strategy: 'center-outward',
    backendId: 'threshold-oracle',
    promptDraft: null,
    jobId: null,
    overlayMode: 'prediction',
  };
}

export function clampSlice(state: ViewState, z: number): number {
  if (!state.dims) return 0;
  return Math.min(Math.max(z, 0), state.dims[0] - 1);
}

export function promptBodyFromDraft(state: ViewState): PromptBody {
  if (!state.promptDraft) throw new Error('no prompt drawn');
  const { box, z } = state.promptDraft;
  return { kind: 'box', z, ...box };
}

const TERMINAL_STATES = new Set(['done', 'failed']);

export type Sleeper = (ms: number) => Promise<void>;

const realSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

// Polls until the job reaches a terminal state; invokes onUpdate for every
// observed view, including the final one. Resolves with the terminal view.
export async function pollJob(
  api: Pick<ApiClient, 'jobStatus'>,
  jobId: string,
  onUpdate: (view: JobView) => void,
  intervalMs = 250,
  sleep: Sleeper = realSleep,
): Promise<JobView> {
  for (;;) {
    const view = await api.jobStatus(jobId);
    onUpdate(view);
    if (TERMINAL_STATES.has(view.state)) return view;
    await sleep(intervalMs);
  }
}
