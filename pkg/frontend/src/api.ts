// Typed client over the service HTTP API. All UI I/O goes through this
// interface so tests can substitute a scripted transport.

import type { Rle } from './rle.js';

export interface VolumeMeta {
  volume_id: string;
  dims: [number, number, number]; // [d, h, w]
  spacing: [number, number, number];
  has_ground_truth: boolean;
}

export type PromptBody =
  | { kind: 'box'; z: number; x_min: number; y_min: number; x_max: number; y_max: number }
  | { kind: 'mask'; z: number; rle: Rle };

export interface JobRequest {
  volume_id: string;
  prompt: PromptBody;
  strategy: string; // strategy name or "interactive"
  backend_id: string;
  params?: Record<string, number | string>;
}

export interface JobView {
  job_id: string;
  volume_id: string;
  backend_id: string;
  strategy: string;
  prompt: PromptBody;
  state: 'queued' | 'running' | 'done' | 'failed';
  progress: { slices_done: number; slices_total: number };
  error: string | null;
  result: { mask: string; mesh: string; metrics: string | null } | null;
}

export interface MaskSet {
  volume_id: string;
  dims: [number, number, number];
  slices: { z: number; rle: Rle }[];
}

export interface BackendInfo {
  backend_id: string;
  params: Record<string, { type: string; default?: number | string; required?: boolean }>;
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export class ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (!res.ok) {
      let detail: ApiError;
      try {
        detail = (await res.json()) as ApiError;
      } catch {
        detail = { code: `http_${res.status}`, message: res.statusText };
      }
      throw Object.assign(new Error(detail.message), detail);
    }
    return (await res.json()) as T;
  }

  listVolumes(): Promise<VolumeMeta[]> {
    return this.request('/volumes');
  }

  volumeMeta(volumeId: string): Promise<VolumeMeta> {
    return this.request(`/volumes/${volumeId}/meta`);
  }

  sliceUrl(volumeId: string, z: number): string {
    return `${this.base}/volumes/${volumeId}/slices/${z}.png`;
  }

  listBackends(): Promise<BackendInfo[]> {
    return this.request('/backends');
  }

  submitJob(body: JobRequest): Promise<{ job_id: string }> {
    return this.request('/jobs', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  jobStatus(jobId: string): Promise<JobView> {
    return this.request(`/jobs/${jobId}`);
  }

  jobMask(jobId: string): Promise<MaskSet> {
    return this.request(`/jobs/${jobId}/mask`);
  }

  groundTruth(volumeId: string): Promise<MaskSet> {
    return this.request(`/volumes/${volumeId}/ground-truth`);
  }

  async jobMeshObj(jobId: string): Promise<string> {
    const res = await fetch(`${this.base}/jobs/${jobId}/mesh.obj`);
    if (!res.ok) throw new Error(`mesh fetch failed: ${res.status}`);
    return res.text();
  }

  async uploadVolume(data: ArrayBuffer): Promise<{ volume_id: string }> {
    return this.request('/volumes', {
      method: 'POST',
      headers: { 'Content-Type': 'application/octet-stream' },
      body: data,
    });
  }

  async uploadGroundTruth(volumeId: string, data: ArrayBuffer): Promise<void> {
    await this.request(`/volumes/${volumeId}/ground-truth`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/octet-stream' },
      body: data,
    });
  }
}
