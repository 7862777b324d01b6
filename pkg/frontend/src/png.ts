/**
 * Deterministic raster + PNG encoding (node's zlib, no native canvas).
 *
 * The raster mirrors the SVG layout: heatmap rectangles, boundary polyline,
 * frame, ticks, and bitmap-font labels. PNG output carries exactly the
 * IHDR/IDAT/IEND chunks (no timestamps), so bytes depend only on the input.
 */

import { deflateSync } from "node:zlib";

import { viridisRgb } from "./color.js";
import { FigureModel, HEIGHT, MARGIN, WIDTH, ticks, xPix, yPix } from "./render.js";
import { GLYPH_H, GLYPH_W, glyph } from "./font.js";

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 3).fill(0xff);
  }

  set(x: number, y: number, r: number, g: number, b: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const k = (y * this.width + x) * 3;
    this.data[k] = r;
    this.data[k + 1] = g;
    this.data[k + 2] = b;
  }

  fillRect(x0: number, y0: number, x1: number, y1: number,
           rgb: [number, number, number]): void {
    for (let y = Math.round(y0); y < Math.round(y1); y++) {
      for (let x = Math.round(x0); x < Math.round(x1); x++) {
        this.set(x, y, rgb[0], rgb[1], rgb[2]);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number,
       rgb: [number, number, number], thick = 1): void {
    // Bresenham with square brush
    let x = Math.round(x0), y = Math.round(y0);
    const xe = Math.round(x1), ye = Math.round(y1);
    const dx = Math.abs(xe - x), dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1, sy = y < ye ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      for (let ox = 0; ox < thick; ox++) {
        for (let oy = 0; oy < thick; oy++) {
          this.set(x + ox, y + oy, rgb[0], rgb[1], rgb[2]);
        }
      }
      if (x === xe && y === ye) break;
      const e2 = 2 * err;
      if (e2 >= dy) { err += dy; x += sx; }
      if (e2 <= dx) { err += dx; y += sy; }
    }
  }

  text(x: number, y: number, s: string, scale = 2,
       rgb: [number, number, number] = [0, 0, 0]): void {
    // (x, y) is the top-left corner of the string box
    let cx = Math.round(x);
    for (const ch of s) {
      const rowsBits = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if ((rowsBits[gy] >> (GLYPH_W - 1 - gx)) & 1) {
            this.fillRect(cx + gx * scale, y + gy * scale,
                          cx + (gx + 1) * scale, y + (gy + 1) * scale, rgb);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 2): number {
    return s.length * (GLYPH_W + 1) * scale - scale;
  }
}

export function rasterize(m: FigureModel): Raster {
  const img = new Raster(WIDTH, HEIGHT);
  for (const r of m.rects) {
    img.fillRect(xPix(m, r.x0), yPix(m, r.y1), xPix(m, r.x1), yPix(m, r.y0),
                 viridisRgb(r.p));
  }
  if (m.curve.length >= 2) {
    for (let i = 1; i < m.curve.length; i++) {
      img.line(xPix(m, m.curve[i - 1][0]), yPix(m, m.curve[i - 1][1]),
               xPix(m, m.curve[i][0]), yPix(m, m.curve[i][1]), [255, 51, 51], 3);
    }
  }
  const x0 = MARGIN.left, x1 = WIDTH - MARGIN.right;
  const y0 = MARGIN.top, y1 = HEIGHT - MARGIN.bottom;
  const black: [number, number, number] = [0, 0, 0];
  img.line(x0, y0, x1, y0, black);
  img.line(x0, y1, x1, y1, black);
  img.line(x0, y0, x0, y1, black);
  img.line(x1, y0, x1, y1, black);
  for (const t of ticks(m.xRange[0], m.xRange[1])) {
    const px = xPix(m, t);
    img.line(px, y1, px, y1 + 6, black);
    const label = Math.abs(t) < 1e-12 ? "0" : String(Number(t.toFixed(4)));
    img.text(px - img.textWidth(label) / 2, y1 + 10, label);
  }
  for (const t of ticks(m.yRange[0], m.yRange[1])) {
    const py = yPix(m, t);
    img.line(x0 - 6, py, x0, py, black);
    const label = Math.abs(t) < 1e-12 ? "0" : String(Number(t.toFixed(4)));
    img.text(x0 - 10 - img.textWidth(label), py - GLYPH_H, label);
  }
  img.text((x0 + x1) / 2 - img.textWidth("K/N") / 2, HEIGHT - 30, "K/N");
  img.text(8, (y0 + y1) / 2 - GLYPH_H, "r/N");
  // colorbar
  const cbX = WIDTH - MARGIN.right + 30;
  const cbH = y1 - y0;
  for (let i = 0; i < cbH; i++) {
    const t = 1 - i / (cbH - 1);
    img.fillRect(cbX, y0 + i, cbX + 18, y0 + i + 1, viridisRgb(t));
  }
  img.line(cbX, y0, cbX + 18, y0, black);
  img.line(cbX, y1, cbX + 18, y1, black);
  img.line(cbX, y0, cbX, y1, black);
  img.line(cbX + 18, y0, cbX + 18, y1, black);
  for (const frac of [0, 0.5, 1]) {
    img.text(cbX + 24, y0 + cbH * (1 - frac) - GLYPH_H, String(frac));
  }
  return img;
}

// ---------------------------------------------------------------- encoding

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const dv = new DataView(out.buffer);
  dv.setUint32(0, payload.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(payload, 8);
  dv.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

export function encodePng(img: Raster): Buffer {
  const { width, height, data } = img;
  const ihdr = new Uint8Array(13);
  const dv = new DataView(ihdr.buffer);
  dv.setUint32(0, width);
  dv.setUint32(4, height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // color type: truecolor
  // compression, filter, interlace all zero
  const raw = new Uint8Array(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    raw[y * (1 + width * 3)] = 0; // filter: none
    raw.set(data.subarray(y * width * 3, (y + 1) * width * 3),
            y * (1 + width * 3) + 1);
  }
  const idat = deflateSync(raw, { level: 9 });
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", new Uint8Array(idat)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}
