// Run-length mask codec matching the API wire format: counts alternate over
// the row-major bit string, first count is the leading run of zeros.

export interface Rle {
  dims: [number, number]; // [h, w]
  counts: number[];
}

export function decodeRle(rle: Rle): Uint8Array {
  const [h, w] = rle.dims;
  const total = h * w;
  const out = new Uint8Array(total);
  let pos = 0;
  let value = 0;
  for (const count of rle.counts) {
    if (count < 0) throw new Error('negative run length');
    if (value) out.fill(1, pos, pos + count);
    pos += count;
    value = 1 - value;
  }
  if (pos !== total) {
    throw new Error(`length mismatch: counts sum ${pos}, expected ${total}`);
  }
  return out;
}

export function encodeRle(bits: Uint8Array, h: number, w: number): Rle {
  if (bits.length !== h * w) throw new Error('bits length does not match dims');
  const counts: number[] = [];
  let run = 0;
  let value = 0;
  for (let i = 0; i < bits.length; i++) {
    const bit = bits[i] ? 1 : 0;
    if (bit === value) {
      run += 1;
    } else {
      counts.push(run);
      value = bit;
      run = 1;
    }
  }
  counts.push(run);
  return { dims: [h, w], counts };
}
