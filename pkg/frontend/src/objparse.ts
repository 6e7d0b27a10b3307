// Minimal OBJ parser for the mesh endpoint: v/f records, triangles only.

export interface ParsedMesh {
  vertices: Float32Array; // xyz triples
  triangles: Uint32Array; // vertex index triples
}

export function parseObj(text: string): ParsedMesh {
  const vertices: number[] = [];
  const triangles: number[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const parts = lines[i].trim().split(/\s+/);
    if (parts[0] === 'v') {
      if (parts.length < 4) throw new Error(`line ${i + 1}: bad vertex`);
      vertices.push(Number(parts[1]), Number(parts[2]), Number(parts[3]));
    } else if (parts[0] === 'f') {
      if (parts.length !== 4) throw new Error(`line ${i + 1}: only triangles supported`);
      for (let k = 1; k <= 3; k++) {
        const idx = Number(parts[k].split('/')[0]) - 1;
        if (idx < 0 || idx * 3 >= vertices.length) {
          throw new Error(`line ${i + 1}: face index out of range`);
        }
        triangles.push(idx);
      }
    }
  }
  return { vertices: new Float32Array(vertices), triangles: new Uint32Array(triangles) };
}
