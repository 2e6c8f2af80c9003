/**
 * Desktop 5DOF input mapping, the stand-in for hand-held controllers:
 * drag translates in the camera plane, the wheel moves along depth,
 * modifier-drag pitches/rolls.  There is deliberately no way to yaw the
 * tool about its own axis - the task does not constrain that DOF.
 */

import { PoseObj, Quat } from './protocol.js';

export interface PoseDelta {
  dx: number;       // mm, world X
  dy: number;       // mm, world Y
  dz: number;       // mm, world Z (depth)
  dpitch: number;   // deg about world X
  droll: number;    // deg about world Z
}

export type InputEvent =
  | { type: 'drag'; dx: number; dy: number; modifier: boolean }
  | { type: 'wheel'; delta: number }
  | { type: 'confirm' };

export interface InputConfig {
  mmPerPixel: number;
  mmPerWheelStep: number;
  degPerPixel: number;
}

export const DEFAULT_INPUT: InputConfig = {
  mmPerPixel: 0.5,
  mmPerWheelStep: 5.0,
  degPerPixel: 0.25,
};

export function zeroDelta(): PoseDelta {
  return { dx: 0, dy: 0, dz: 0, dpitch: 0, droll: 0 };
}

export function inputToDelta(event: InputEvent, cfg: InputConfig = DEFAULT_INPUT): PoseDelta {
  const d = zeroDelta();
  switch (event.type) {
    case 'drag':
      if (event.modifier) {
        // rotate: vertical drag pitches, horizontal drag rolls
        d.dpitch = -event.dy * cfg.degPerPixel;
        d.droll = -event.dx * cfg.degPerPixel;
      } else {
        d.dx = event.dx * cfg.mmPerPixel;
        d.dy = -event.dy * cfg.mmPerPixel; // screen Y grows downward
      }
      break;
    case 'wheel':
      d.dz = event.delta * cfg.mmPerWheelStep;
      break;
    case 'confirm':
      break;
  }
  return d;
}

function quatMul(a: Quat, b: Quat): Quat {
  const [w1, x1, y1, z1] = a;
  const [w2, x2, y2, z2] = b;
  let q: Quat = [
    w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
    w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
    w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
    w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
  ];
  const n = Math.hypot(...q);
  q = q.map((v) => v / n) as Quat;
  if (q[0] < 0) q = q.map((v) => -v) as Quat;
  return q;
}

function axisAngle(x: number, y: number, z: number, deg: number): Quat {
  const half = (deg * Math.PI) / 360;
  const s = Math.sin(half);
  return [Math.cos(half), x * s, y * s, z * s];
}

/** Apply a 5DOF delta to the tool pose (world-frame rotations). */
export function applyDelta(pose: PoseObj, delta: PoseDelta): PoseObj {
  let orientation = pose.orientation;
  if (delta.dpitch !== 0) {
    orientation = quatMul(axisAngle(1, 0, 0, delta.dpitch), orientation);
  }
  if (delta.droll !== 0) {
    orientation = quatMul(axisAngle(0, 0, 1, delta.droll), orientation);
  }
  return {
    position: [
      pose.position[0] + delta.dx,
      pose.position[1] + delta.dy,
      pose.position[2] + delta.dz,
    ],
    orientation,
  };
}
