// Tiny software 3D view: orthographic projection, painter-sorted flat
// shading for the tumor mesh (red) plus the prompt box wireframe (orange).
// Plenty for inspecting voxel surfaces without pulling in a GL stack.

import type { ParsedMesh } from './objparse.js';

export interface Wireframe {
  vertices: Float32Array; // xyz triples
  segments: Uint32Array; // index pairs
}

export function rotationMatrix(yaw: number, pitch: number): number[] {
  const cy = Math.cos(yaw), sy = Math.sin(yaw);
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  // yaw about +y, then pitch about +x; row-major 3x3
  return [cy, 0, sy, sp * sy, cp, -sp * cy, -cp * sy, sp, cp * cy];
}

export function applyRotation(m: number[], x: number, y: number, z: number): [number, number, number] {
  return [
    m[0] * x + m[1] * y + m[2] * z,
    m[3] * x + m[4] * y + m[5] * z,
    m[6] * x + m[7] * y + m[8] * z,
  ];
}

function bounds(points: Float32Array): { center: [number, number, number]; radius: number } {
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < points.length; i += 3) {
    for (let k = 0; k < 3; k++) {
      lo[k] = Math.min(lo[k], points[i + k]);
      hi[k] = Math.max(hi[k], points[i + k]);
    }
  }
  const center: [number, number, number] = [
    (lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2,
  ];
  const radius = Math.max(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) / 2 || 1;
  return { center, radius };
}

export class MeshView {
  yaw = 0.7;
  pitch = 0.5;
  mesh: ParsedMesh | null = null;
  frame: Wireframe | null = null;

  constructor(private canvas: HTMLCanvasElement) {}

  setContent(mesh: ParsedMesh | null, frame: Wireframe | null): void {
    this.mesh = mesh;
    this.frame = frame;
    this.render();
  }

  rotateBy(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    this.pitch = Math.min(Math.max(this.pitch + dPitch, -1.4), 1.4);
    this.render();
  }

  render(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.fillStyle = '#13151a';
    ctx.fillRect(0, 0, width, height);

    const all =
      this.mesh && this.mesh.vertices.length
        ? this.mesh.vertices
        : this.frame
          ? this.frame.vertices
          : null;
    if (!all) return;
    const { center, radius } = bounds(all);
    const scale = (Math.min(width, height) * 0.42) / radius;
    const rot = rotationMatrix(this.yaw, this.pitch);

    const project = (src: Float32Array, i: number): [number, number, number] => {
      const [x, y, z] = applyRotation(
        rot,
        src[i] - center[0],
        src[i + 1] - center[1],
        src[i + 2] - center[2],
      );
      return [width / 2 + x * scale, height / 2 - y * scale, z];
    };

    if (this.mesh) {
      const { vertices, triangles } = this.mesh;
      const order: { depth: number; t: number }[] = [];
      for (let t = 0; t < triangles.length; t += 3) {
        const za = project(vertices, triangles[t] * 3)[2];
        const zb = project(vertices, triangles[t + 1] * 3)[2];
        const zc = project(vertices, triangles[t + 2] * 3)[2];
        order.push({ depth: (za + zb + zc) / 3, t });
      }
      order.sort((a, b) => a.depth - b.depth);
      for (const { t } of order) {
        const a = project(vertices, triangles[t] * 3);
        const b = project(vertices, triangles[t + 1] * 3);
        const c = project(vertices, triangles[t + 2] * 3);
        const nz = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if (nz >= 0) continue; // back face in canvas coordinates
        const shade = Math.min(1, 0.35 + (0.65 * Math.abs(nz)) /
          (Math.hypot(b[0] - a[0], b[1] - a[1]) * Math.hypot(c[0] - a[0], c[1] - a[1]) + 1e-9));
        ctx.fillStyle = `rgb(${Math.round(190 * shade + 40)}, ${Math.round(30 * shade)}, ${Math.round(30 * shade)})`;
        ctx.beginPath();
        ctx.moveTo(a[0], a[1]);
        ctx.lineTo(b[0], b[1]);
        ctx.lineTo(c[0], c[1]);
        ctx.closePath();
        ctx.fill();
      }
    }

    if (this.frame) {
      ctx.strokeStyle = '#ff9100';
      ctx.lineWidth = 1.5;
      const { vertices, segments } = this.frame;
      for (let s = 0; s < segments.length; s += 2) {
        const a = project(vertices, segments[s] * 3);
        const b = project(vertices, segments[s + 1] * 3);
        ctx.beginPath();
        ctx.moveTo(a[0], a[1]);
        ctx.lineTo(b[0], b[1]);
        ctx.stroke();
      }
    }
  }
}

// The prompt box extruded over a slice range, scaled by spacing, as 8
// corners and 12 edges (mirrors the service-side wireframe layout).
export function boxWireframe(
  box: { x_min: number; y_min: number; x_max: number; y_max: number },
  zMin: number,
  zMax: number,
  spacing: [number, number, number],
): Wireframe {
  const [sz, sy, sx] = spacing;
  const xs = [box.x_min * sx, box.x_max * sx];
  const ys = [box.y_min * sy, box.y_max * sy];
  const zs = [zMin * sz, zMax * sz];
  const vertices = new Float32Array(24);
  for (let i = 0; i < 8; i++) {
    vertices[i * 3] = xs[i & 1];
    vertices[i * 3 + 1] = ys[(i >> 1) & 1];
    vertices[i * 3 + 2] = zs[(i >> 2) & 1];
  }
  const segments: number[] = [];
  for (let i = 0; i < 8; i++) {
    for (const bit of [1, 2, 4]) {
      if (!(i & bit)) segments.push(i, i | bit);
    }
  }
  return { vertices, segments: new Uint32Array(segments) };
}
