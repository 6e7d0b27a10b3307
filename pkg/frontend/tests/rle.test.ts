import { describe, expect, it } from 'vitest';

import { decodeRle, encodeRle } from '../src/rle.js';

describe('rle codec', () => {
  it('decodes the documented example', () => {
    // row-major bits [1, 0, 0, 1] <-> counts [0, 1, 2, 1]
    const bits = decodeRle({ dims: [2, 2], counts: [0, 1, 2, 1] });
    expect(Array.from(bits)).toEqual([1, 0, 0, 1]);
  });

  it('encodes the leading zero run', () => {
    const rle = encodeRle(new Uint8Array([0, 0, 1, 1]), 2, 2);
    expect(rle.counts).toEqual([2, 2]);
    const empty = encodeRle(new Uint8Array(4), 2, 2);
    expect(empty.counts).toEqual([4]);
  });

  it('round-trips random masks', () => {
    let seed = 1234;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let round = 0; round < 50; round++) {
      const h = 5 + Math.floor(rand() * 10);
      const w = 5 + Math.floor(rand() * 10);
      const bits = new Uint8Array(h * w);
      for (let i = 0; i < bits.length; i++) bits[i] = rand() < 0.4 ? 1 : 0;
      const decoded = decodeRle(encodeRle(bits, h, w));
      expect(Array.from(decoded)).toEqual(Array.from(bits));
    }
  });

  it('rejects bad sums', () => {
    expect(() => decodeRle({ dims: [2, 2], counts: [3] })).toThrow('length mismatch');
  });
});
