// Overlay painting: RGBA buffers composited over the slice image.
// Agreement coloring follows the evaluation convention: green where the
// prediction and ground truth overlap, red where they disagree.

export const PREDICTION_RGBA: [number, number, number, number] = [64, 156, 255, 140];
export const AGREE_RGBA: [number, number, number, number] = [0, 200, 0, 150];
export const DISAGREE_RGBA: [number, number, number, number] = [220, 0, 0, 150];

export function predictionOverlay(mask: Uint8Array, h: number, w: number): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(h * w * 4);
  for (let i = 0; i < h * w; i++) {
    if (mask[i]) out.set(PREDICTION_RGBA, i * 4);
  }
  return out;
}

export function agreementOverlay(
  prediction: Uint8Array,
  groundTruth: Uint8Array,
  h: number,
  w: number,
): Uint8ClampedArray<ArrayBuffer> {
  if (prediction.length !== h * w || groundTruth.length !== h * w) {
    throw new Error('mask size does not match slice dims');
  }
  const out = new Uint8ClampedArray(h * w * 4);
  for (let i = 0; i < h * w; i++) {
    const p = prediction[i] !== 0;
    const g = groundTruth[i] !== 0;
    if (p && g) out.set(AGREE_RGBA, i * 4);
    else if (p !== g) out.set(DISAGREE_RGBA, i * 4);
  }
  return out;
}

export function countRedPixels(rgba: Uint8ClampedArray): number {
  let n = 0;
  for (let i = 0; i < rgba.length; i += 4) {
    if (rgba[i] === DISAGREE_RGBA[0] && rgba[i + 1] === DISAGREE_RGBA[1] && rgba[i + 3] > 0) {
      n += 1;
    }
  }
  return n;
}
