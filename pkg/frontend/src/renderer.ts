/**
 * Canvas renderer: simple orthographic projection of the 3D scene (world mm
 * to screen pixels), glyph pairs for the collimation widget, colored
 * cylinders for the baseline, plus a text HUD.
 */

import { PoseObj } from './protocol.js';
import { GlyphPair, SceneState, acwGlyphs, gswCylinders } from './scene.js';

export interface Camera {
  centerX: number;     // world mm at screen center
  centerY: number;
  pxPerMm: number;
}

export const DEFAULT_CAMERA: Camera = { centerX: 0, centerY: 0, pxPerMm: 2.0 };

function project(cam: Camera, canvas: { width: number; height: number },
                 p: [number, number, number]): [number, number] {
  // orthographic front view: world X right, world Y up; depth tints only
  return [
    canvas.width / 2 + (p[0] - cam.centerX) * cam.pxPerMm,
    canvas.height / 2 - (p[1] - cam.centerY) * cam.pxPerMm,
  ];
}

function drawGlyph(ctx: CanvasRenderingContext2D, cam: Camera,
                   origin: PoseObj, glyph: GlyphPair): void {
  for (const anchor of [glyph.a, glyph.b]) {
    const world: [number, number, number] = [
      origin.position[0] + anchor.position[0],
      origin.position[1] + anchor.position[1],
      origin.position[2] + anchor.position[2],
    ];
    const [sx, sy] = project(cam, ctx.canvas, world);
    ctx.fillStyle = glyph.color;
    ctx.font = '18px monospace';
    ctx.textAlign = 'center';
    ctx.textBaseline = 'middle';
    const flipped = anchor === glyph.b;
    ctx.save();
    ctx.translate(sx, sy);
    if (flipped) ctx.scale(-1, 1);
    ctx.fillText(glyph.symbol, 0, 0);
    ctx.restore();
  }
}

function axisEndpoints(pose: PoseObj, lengthMm: number): [[number, number, number], [number, number, number]] {
  const [w, x, y, z] = pose.orientation;
  // rotate local +Z (tool axis) into the world
  const ax = 2 * (x * z + w * y);
  const ay = 2 * (y * z - w * x);
  const az = 1 - 2 * (x * x + y * y);
  const h = lengthMm / 2;
  const [px, py, pz] = pose.position;
  return [
    [px - ax * h, py - ay * h, pz - az * h],
    [px + ax * h, py + ay * h, pz + az * h],
  ];
}

export function render(ctx: CanvasRenderingContext2D, state: SceneState,
                       tool: PoseObj, cam: Camera = DEFAULT_CAMERA): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);

  // tool tip marker
  const [tx, ty] = project(cam, ctx.canvas, tool.position);
  ctx.fillStyle = '#444';
  ctx.beginPath();
  ctx.arc(tx, ty, 4, 0, 2 * Math.PI);
  ctx.fill();

  // target marker during training
  if (state.showTarget && state.currentTarget) {
    const [gx, gy] = project(cam, ctx.canvas, state.currentTarget.pose.position);
    ctx.strokeStyle = '#999';
    ctx.beginPath();
    ctx.arc(gx, gy, 6, 0, 2 * Math.PI);
    ctx.stroke();
  }

  if (state.widgetFrame?.kind === 'acw') {
    const frame = state.widgetFrame.frame;
    for (const glyph of acwGlyphs(frame)) {
      drawGlyph(ctx, cam, frame.origin, glyph);
    }
  } else if (state.widgetFrame?.kind === 'gsw') {
    for (const cyl of gswCylinders(state.widgetFrame.frame)) {
      const [a, b] = axisEndpoints(cyl.pose, cyl.lengthMm);
      const [ax, ay] = project(cam, ctx.canvas, a);
      const [bx, by] = project(cam, ctx.canvas, b);
      ctx.strokeStyle = cyl.color;
      ctx.lineWidth = Math.max(2, cyl.radiusMm * cam.pxPerMm * 2);
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
    }
  }

  // HUD
  ctx.fillStyle = '#555';
  ctx.font = '13px monospace';
  ctx.textAlign = 'left';
  ctx.textBaseline = 'top';
  const block = state.blockIndex === null ? '-' : String(state.blockIndex);
  ctx.fillText(`block ${block}  trial ${state.trialIndex}  records ${state.records.length}`, 12, 12);
  if (state.warning) {
    ctx.fillStyle = '#b00';
    ctx.fillText(`! ${state.warning}`, 12, 30);
  }
  ctx.fillStyle = '#777';
  ctx.fillText('drag: move · wheel: depth · shift-drag: pitch/roll · space: confirm', 12, height - 24);
}
