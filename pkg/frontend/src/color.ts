/**
 * Viridis colormap, interpolated from 17 anchor points.
 *
 * Anchors are the standard published table at k/16; linear interpolation in
 * RGB is visually indistinguishable at heatmap scale and keeps the output
 * byte-stable with no dependencies.
 */

const ANCHORS: ReadonlyArray<readonly [number, number, number]> = [
  [68, 1, 84], [72, 26, 108], [71, 47, 125], [65, 68, 135],
  [57, 86, 140], [49, 104, 142], [42, 120, 142], [35, 136, 142],
  [31, 152, 139], [34, 168, 132], [53, 183, 121], [84, 197, 104],
  [122, 209, 81], [165, 219, 54], [210, 226, 27], [249, 231, 33],
  [253, 231, 37],
];

export function viridis(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (ANCHORS.length - 1);
  const k = Math.min(ANCHORS.length - 2, Math.floor(x));
  const f = x - k;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((i) => mix(ANCHORS[k][i], ANCHORS[k + 1][i])) as [
    number, number, number,
  ];
  return rgbHex(r, g, b);
}

export function viridisRgb(t: number): [number, number, number] {
  const x = Math.min(1, Math.max(0, t)) * (ANCHORS.length - 1);
  const k = Math.min(ANCHORS.length - 2, Math.floor(x));
  const f = x - k;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  return [0, 1, 2].map((i) => mix(ANCHORS[k][i], ANCHORS[k + 1][i])) as [
    number, number, number,
  ];
}

export function rgbHex(r: number, g: number, b: number): string {
  const h = (v: number) => v.toString(16).padStart(2, "0");
  return `#${h(r)}${h(g)}${h(b)}`;
}
