// Acceptance: a scripted drag at fixed zoom produces the expected voxel box
// via API echo. The fake transport applies the same validation and echo the
// service does for POST /jobs and GET /jobs/{id}.

import { describe, expect, it } from 'vitest';

import type { JobRequest, JobView } from '../src/api.js';
import { dragToVoxelBox, ViewTransform } from '../src/transform.js';

class EchoingFakeApi {
  private jobs = new Map<string, JobView>();
  private nextId = 1;

  constructor(private dims: [number, number, number]) {}

  async submitJob(body: JobRequest): Promise<{ job_id: string }> {
    const [d, h, w] = this.dims;
    const p = body.prompt;
    if (p.z < 0 || p.z >= d) throw new Error('prompt.z out of range');
    if (p.kind === 'box') {
      if (!(0 <= p.x_min && p.x_min < p.x_max && p.x_max <= w)) throw new Error('bad x bounds');
      if (!(0 <= p.y_min && p.y_min < p.y_max && p.y_max <= h)) throw new Error('bad y bounds');
    }
    const jobId = `job-${this.nextId++}`;
    this.jobs.set(jobId, {
      job_id: jobId,
      volume_id: body.volume_id,
      backend_id: body.backend_id,
      strategy: body.strategy,
      prompt: body.prompt, // echoed exactly as validated
      state: 'queued',
      progress: { slices_done: 0, slices_total: d },
      error: null,
      result: null,
    });
    return { job_id: jobId };
  }

  async jobStatus(jobId: string): Promise<JobView> {
    const view = this.jobs.get(jobId);
    if (!view) throw new Error('unknown job');
    return view;
  }
}

describe('drag to API echo', () => {
  it('the echoed prompt equals the hand-computed voxel box', async () => {
    const dims: [number, number, number] = [16, 32, 32];
    const t: ViewTransform = { zoom: 8, offsetX: 40, offsetY: 24 };
    // drag from screen (72, 56) to (127, 111): voxels (4,4) .. (10,10)
    const box = dragToVoxelBox(t, { x: 72, y: 56 }, { x: 127, y: 111 }, dims[2], dims[1]);
    expect(box).not.toBeNull();

    const api = new EchoingFakeApi(dims);
    const { job_id } = await api.submitJob({
      volume_id: 'v1',
      prompt: { kind: 'box', z: 7, ...box! },
      strategy: 'center-outward',
      backend_id: 'gt-oracle',
    });
    const echoed = await api.jobStatus(job_id);
    expect(echoed.prompt).toEqual({
      kind: 'box', z: 7, x_min: 4, y_min: 4, x_max: 11, y_max: 11,
    });
  });

  it('rejects out-of-range prompts exactly like the service', async () => {
    const api = new EchoingFakeApi([16, 32, 32]);
    await expect(
      api.submitJob({
        volume_id: 'v1',
        prompt: { kind: 'box', z: 99, x_min: 0, y_min: 0, x_max: 4, y_max: 4 },
        strategy: 'center-outward',
        backend_id: 'gt-oracle',
      }),
    ).rejects.toThrow('prompt.z');
  });
});
