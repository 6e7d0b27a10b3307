// Screen <-> voxel mapping for the slice canvas. The slice is drawn at an
// integer zoom factor with a pixel offset, so the mapping inverts exactly.

export interface ViewTransform {
  zoom: number; // integer screen pixels per voxel
  offsetX: number;
  offsetY: number;
}

export interface VoxelBox {
  x_min: number;
  y_min: number;
  x_max: number; // exclusive
  y_max: number; // exclusive
}

export function screenToVoxel(
  t: ViewTransform,
  sx: number,
  sy: number,
): { x: number; y: number } {
  return {
    x: Math.floor((sx - t.offsetX) / t.zoom),
    y: Math.floor((sy - t.offsetY) / t.zoom),
  };
}

export function voxelToScreen(
  t: ViewTransform,
  vx: number,
  vy: number,
): { x: number; y: number } {
  return { x: t.offsetX + vx * t.zoom, y: t.offsetY + vy * t.zoom };
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}

// Convert a completed drag to a half-open voxel box, clamped to the slice.
// A drag that never leaves the starting voxel row/column is a click, not a
// box: rejected (null) before any submission.
export function dragToVoxelBox(
  t: ViewTransform,
  start: { x: number; y: number },
  end: { x: number; y: number },
  sliceW: number,
  sliceH: number,
): VoxelBox | null {
  const a = screenToVoxel(t, Math.min(start.x, end.x), Math.min(start.y, end.y));
  const b = screenToVoxel(t, Math.max(start.x, end.x), Math.max(start.y, end.y));
  if (a.x === b.x || a.y === b.y) return null; // zero-area drag
  const box = {
    x_min: clamp(a.x, 0, sliceW - 1),
    y_min: clamp(a.y, 0, sliceH - 1),
    x_max: clamp(b.x, 0, sliceW - 1) + 1,
    y_max: clamp(b.y, 0, sliceH - 1) + 1,
  };
  return box.x_min < box.x_max && box.y_min < box.y_max ? box : null;
}
