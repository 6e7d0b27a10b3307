// Annotator UI: browse slices, draw a single prompt, run a propagation job,
// inspect overlays and the 3D mesh. All server I/O goes through ApiClient.

import { ApiClient, JobView, MaskSet, VolumeMeta } from './api.js';
import { decodeRle, encodeRle } from './rle.js';
import { agreementOverlay, predictionOverlay } from './overlay.js';
import { dragToVoxelBox, ViewTransform, voxelToScreen } from './transform.js';
import { parseObj } from './objparse.js';
import { clampSlice, initialState, pollJob, ViewState } from './state.js';
import { boxWireframe, MeshView, Wireframe } from './viewer3d.js';

const api = new ApiClient('');
const state: ViewState = initialState();

let meta: VolumeMeta | null = null;
let predictionMasks = new Map<number, Uint8Array>();
let groundTruthMasks = new Map<number, Uint8Array>();
let brushMask: Uint8Array | null = null;
let brushActive = false;
let promptMode: 'box' | 'brush' = 'box';
let dragStart: { x: number; y: number } | null = null;
let dragCurrent: { x: number; y: number } | null = null;
let lastJob: JobView | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>('slice-canvas');
const ctx = canvas.getContext('2d')!;
const meshCanvas = $<HTMLCanvasElement>('mesh-canvas');
const meshView = new MeshView(meshCanvas);
const sliceImages = new Map<number, HTMLImageElement>();

function transform(): ViewTransform {
  if (!meta) return { zoom: 1, offsetX: 0, offsetY: 0 };
  const [, h, w] = meta.dims;
  const zoom = Math.max(1, Math.floor(Math.min(canvas.width / w, canvas.height / h)));
  return {
    zoom,
    offsetX: Math.floor((canvas.width - w * zoom) / 2),
    offsetY: Math.floor((canvas.height - h * zoom) / 2),
  };
}

function setStatus(text: string, isError = false): void {
  const el = $('status');
  el.textContent = text;
  el.className = isError ? 'status error' : 'status';
}

function maskSetToMap(maskSet: MaskSet): Map<number, Uint8Array> {
  const out = new Map<number, Uint8Array>();
  for (const entry of maskSet.slices) out.set(entry.z, decodeRle(entry.rle));
  return out;
}

function drawOverlay(mask: Uint8Array | undefined, rgbaFor: (m: Uint8Array) => Uint8ClampedArray<ArrayBuffer>): void {
  if (!mask || !meta) return;
  const [, h, w] = meta.dims;
  const t = transform();
  const off = document.createElement('canvas');
  off.width = w;
  off.height = h;
  off.getContext('2d')!.putImageData(new ImageData(rgbaFor(mask), w, h), 0, 0);
  ctx.imageSmoothingEnabled = false;
  const origin = voxelToScreen(t, 0, 0);
  ctx.drawImage(off, origin.x, origin.y, w * t.zoom, h * t.zoom);
}

function render(): void {
  ctx.fillStyle = '#13151a';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!meta) return;
  const [d, h, w] = meta.dims;
  const t = transform();
  const origin = voxelToScreen(t, 0, 0);

  const img = sliceImages.get(state.z);
  if (img && img.complete && img.naturalWidth > 0) {
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(img, origin.x, origin.y, w * t.zoom, h * t.zoom);
  } else {
    ctx.fillStyle = '#20242d';
    ctx.fillRect(origin.x, origin.y, w * t.zoom, h * t.zoom);
    ctx.fillStyle = '#8892a6';
    ctx.fillText('loading slice…', origin.x + 8, origin.y + 16);
  }

  const prediction = predictionMasks.get(state.z);
  if (prediction) {
    const gt = groundTruthMasks.get(state.z);
    if (state.overlayMode === 'agreement' && groundTruthMasks.size > 0) {
      const gtBits = gt ?? new Uint8Array(h * w);
      drawOverlay(prediction, (m) => agreementOverlay(m, gtBits, h, w));
    } else {
      drawOverlay(prediction, (m) => predictionOverlay(m, h, w));
    }
  } else if (state.overlayMode === 'agreement' && groundTruthMasks.has(state.z) && lastJob) {
    // missed ground truth with an empty prediction: everything is disagreement
    const gtBits = groundTruthMasks.get(state.z)!;
    drawOverlay(gtBits, (m) => agreementOverlay(new Uint8Array(h * w), m, h, w));
  }

  if (brushMask) {
    drawOverlay(brushMask, (m) => predictionOverlay(m, h, w));
  }

  if (state.promptDraft && state.promptDraft.z === state.z) {
    const { box } = state.promptDraft;
    const a = voxelToScreen(t, box.x_min, box.y_min);
    ctx.strokeStyle = '#ff9100';
    ctx.lineWidth = 2;
    ctx.strokeRect(a.x, a.y, (box.x_max - box.x_min) * t.zoom, (box.y_max - box.y_min) * t.zoom);
  }
  if (dragStart && dragCurrent) {
    ctx.strokeStyle = '#ffc400';
    ctx.setLineDash([4, 3]);
    ctx.strokeRect(
      Math.min(dragStart.x, dragCurrent.x),
      Math.min(dragStart.y, dragCurrent.y),
      Math.abs(dragCurrent.x - dragStart.x),
      Math.abs(dragCurrent.y - dragStart.y),
    );
    ctx.setLineDash([]);
  }

  $('slice-label').textContent = `slice ${state.z} / ${d - 1}`;
}

function loadSlice(z: number): void {
  if (!meta || sliceImages.has(z)) return;
  const img = new Image();
  img.onload = () => render();
  img.onerror = () => {
    sliceImages.delete(z); // retry on next visit
    setStatus(`slice ${z} failed to load; will retry`, true);
  };
  img.src = api.sliceUrl(meta.volume_id, z);
  sliceImages.set(z, img);
}

function setSlice(z: number): void {
  state.z = clampSlice(state, z);
  loadSlice(state.z);
  render();
}

async function selectVolume(volumeId: string): Promise<void> {
  meta = await api.volumeMeta(volumeId);
  state.volumeId = volumeId;
  state.dims = meta.dims;
  state.promptDraft = null;
  state.jobId = null;
  predictionMasks = new Map();
  groundTruthMasks = new Map();
  sliceImages.clear();
  brushMask = null;
  lastJob = null;
  if (meta.has_ground_truth) {
    try {
      groundTruthMasks = maskSetToMap(await api.groundTruth(volumeId));
    } catch {
      groundTruthMasks = new Map();
    }
  }
  $<HTMLButtonElement>('overlay-agreement').disabled = groundTruthMasks.size === 0;
  setSlice(Math.floor(meta.dims[0] / 2));
  setStatus(`volume ${volumeId} (${meta.dims.join('x')})`);
}

async function refreshVolumes(): Promise<void> {
  const volumes = await api.listVolumes();
  const select = $<HTMLSelectElement>('volume-select');
  select.innerHTML = '';
  for (const v of volumes) {
    const option = document.createElement('option');
    option.value = v.volume_id;
    option.textContent = `${v.volume_id} (${v.dims.join('x')}${v.has_ground_truth ? ', GT' : ''})`;
    select.appendChild(option);
  }
  if (volumes.length && !state.volumeId) await selectVolume(volumes[0].volume_id);
}

async function refreshBackends(): Promise<void> {
  const backends = await api.listBackends();
  const select = $<HTMLSelectElement>('backend-select');
  select.innerHTML = '';
  for (const b of backends) {
    const option = document.createElement('option');
    option.value = b.backend_id;
    option.textContent = b.backend_id;
    select.appendChild(option);
  }
  if (backends.some((b) => b.backend_id === state.backendId)) {
    select.value = state.backendId;
  } else if (backends.length) {
    state.backendId = backends[0].backend_id;
  }
}

function canvasPoint(ev: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

function paintBrush(p: { x: number; y: number }): void {
  if (!meta || !brushMask) return;
  const [, h, w] = meta.dims;
  const t = transform();
  const vx = Math.floor((p.x - t.offsetX) / t.zoom);
  const vy = Math.floor((p.y - t.offsetY) / t.zoom);
  const radius = 1;
  for (let dy = -radius; dy <= radius; dy++) {
    for (let dx = -radius; dx <= radius; dx++) {
      const x = vx + dx;
      const y = vy + dy;
      if (x >= 0 && x < w && y >= 0 && y < h) brushMask[y * w + x] = 1;
    }
  }
  render();
}

function wirePromptDrawing(): void {
  canvas.addEventListener('mousedown', (ev) => {
    if (!meta) return;
    if (promptMode === 'brush') {
      const [, h, w] = meta.dims;
      if (!brushMask) brushMask = new Uint8Array(h * w);
      brushActive = true;
      paintBrush(canvasPoint(ev));
      return;
    }
    dragStart = canvasPoint(ev);
    dragCurrent = dragStart;
  });
  canvas.addEventListener('mousemove', (ev) => {
    if (promptMode === 'brush') {
      if (brushActive) paintBrush(canvasPoint(ev));
      return;
    }
    if (dragStart) {
      dragCurrent = canvasPoint(ev);
      render();
    }
  });
  window.addEventListener('mouseup', (ev) => {
    if (promptMode === 'brush') {
      brushActive = false;
      return;
    }
    if (!dragStart || !meta) return;
    const end = canvasPoint(ev);
    const [, h, w] = meta.dims;
    const box = dragToVoxelBox(transform(), dragStart, end, w, h);
    dragStart = dragCurrent = null;
    if (box) {
      state.promptDraft = { box, z: state.z };
      setStatus(`prompt box [${box.x_min},${box.x_max}) x [${box.y_min},${box.y_max}) on slice ${state.z}`);
    } else {
      setStatus('drag rejected: draw a box covering at least one voxel in each direction', true);
    }
    render();
  });
  canvas.addEventListener('wheel', (ev) => {
    ev.preventDefault();
    setSlice(state.z + (ev.deltaY > 0 ? 1 : -1));
  });
  window.addEventListener('keydown', (ev) => {
    if (ev.key === 'ArrowUp' || ev.key === 'PageUp') setSlice(state.z + 1);
    if (ev.key === 'ArrowDown' || ev.key === 'PageDown') setSlice(state.z - 1);
  });
}

function promptBody() {
  if (!meta) throw new Error('no volume selected');
  if (promptMode === 'brush') {
    if (!brushMask || !brushMask.some((v) => v)) throw new Error('brush mask is empty');
    const [, h, w] = meta.dims;
    return { kind: 'mask' as const, z: state.z, rle: encodeRle(brushMask, h, w) };
  }
  if (!state.promptDraft) throw new Error('draw a prompt box first');
  return { kind: 'box' as const, z: state.promptDraft.z, ...state.promptDraft.box };
}

async function submitJob(): Promise<void> {
  if (!meta) return;
  try {
    const body = {
      volume_id: meta.volume_id,
      prompt: promptBody(),
      strategy: state.strategy,
      backend_id: state.backendId,
      params: collectParams(),
    };
    const { job_id } = await api.submitJob(body);
    state.jobId = job_id;
    predictionMasks = new Map();
    setStatus(`job ${job_id} submitted`);
    const final = await pollJob(api, job_id, (view) => {
      lastJob = view;
      $('job-progress').textContent =
        `${view.state}: ${view.progress.slices_done}/${view.progress.slices_total}`;
    });
    if (final.state === 'failed') {
      setStatus(`job failed: ${final.error}`, true);
      return;
    }
    predictionMasks = maskSetToMap(await api.jobMask(job_id));
    setStatus(`job ${job_id} done: ${predictionMasks.size} foreground slices`);
    render();
    await show3d(job_id, final);
  } catch (err) {
    setStatus(`${(err as Error).message}`, true);
  }
}

function collectParams(): Record<string, number | string> {
  const raw = $<HTMLInputElement>('params-input').value.trim();
  const params: Record<string, number | string> = {};
  if (!raw) return params;
  for (const pair of raw.split(/[,\s]+/)) {
    const [key, value] = pair.split('=');
    if (!key || value === undefined) continue;
    const num = Number(value);
    params[key] = Number.isFinite(num) ? num : value;
  }
  return params;
}

async function show3d(jobId: string, view: JobView): Promise<void> {
  if (!meta) return;
  try {
    const objText = await api.jobMeshObj(jobId);
    const mesh = parseObj(objText);
    let frame: Wireframe | null = null;
    if (view.prompt.kind === 'box') {
      const zs = [...predictionMasks.keys()];
      const zMin = zs.length ? Math.min(...zs) : view.prompt.z;
      const zMax = zs.length ? Math.max(...zs) + 1 : view.prompt.z + 1;
      frame = boxWireframe(view.prompt, zMin, zMax, meta.spacing);
    }
    meshView.setContent(mesh.triangles.length ? mesh : null, frame);
  } catch (err) {
    setStatus(`mesh: ${(err as Error).message}`, true);
  }
}

function wireControls(): void {
  $<HTMLSelectElement>('volume-select').addEventListener('change', (ev) => {
    void selectVolume((ev.target as HTMLSelectElement).value);
  });
  $<HTMLSelectElement>('backend-select').addEventListener('change', (ev) => {
    state.backendId = (ev.target as HTMLSelectElement).value;
  });
  $<HTMLSelectElement>('strategy-select').addEventListener('change', (ev) => {
    state.strategy = (ev.target as HTMLSelectElement).value;
  });
  $<HTMLSelectElement>('prompt-mode').addEventListener('change', (ev) => {
    promptMode = (ev.target as HTMLSelectElement).value as 'box' | 'brush';
    brushMask = null;
    render();
  });
  $('run-button').addEventListener('click', () => void submitJob());
  $('clear-button').addEventListener('click', () => {
    state.promptDraft = null;
    brushMask = null;
    render();
  });
  $('overlay-prediction').addEventListener('click', () => {
    state.overlayMode = 'prediction';
    render();
  });
  $('overlay-agreement').addEventListener('click', () => {
    state.overlayMode = 'agreement';
    render();
  });
  let rotating = false;
  let last: { x: number; y: number } | null = null;
  meshCanvas.addEventListener('mousedown', (ev) => {
    rotating = true;
    last = { x: ev.clientX, y: ev.clientY };
  });
  window.addEventListener('mousemove', (ev) => {
    if (!rotating || !last) return;
    meshView.rotateBy((ev.clientX - last.x) * 0.01, (ev.clientY - last.y) * 0.01);
    last = { x: ev.clientX, y: ev.clientY };
  });
  window.addEventListener('mouseup', () => {
    rotating = false;
  });
  const upload = $<HTMLInputElement>('upload-input');
  upload.addEventListener('change', async () => {
    const file = upload.files?.[0];
    if (!file) return;
    try {
      const { volume_id } = await api.uploadVolume(await file.arrayBuffer());
      setStatus(`uploaded ${volume_id}`);
      await refreshVolumes();
      await selectVolume(volume_id);
    } catch (err) {
      setStatus(`upload failed: ${(err as Error).message}`, true);
    }
  });
}

async function start(): Promise<void> {
  wirePromptDrawing();
  wireControls();
  try {
    await refreshBackends();
    await refreshVolumes();
    setStatus(meta ? `ready` : 'no volumes yet: upload a NIfTI file to begin');
  } catch (err) {
    setStatus(`cannot reach service: ${(err as Error).message}`, true);
  }
}

void start();
