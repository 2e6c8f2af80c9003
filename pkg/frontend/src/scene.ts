/**
 * Scene state derived purely from engine frames.  The only logic here is
 * "draw what the frame says": visibility, separations, and colors all come
 * from the engine payloads untouched.
 */

import {
  AcwFramePayload, EngineMessage, GswFramePayload, PoseObj, TargetPayload,
  TrialRecordPayload,
} from './protocol.js';

export interface GlyphPair {
  kind: string;
  color: string;
  symbol: string;
  a: PoseObj;
  b: PoseObj;
  /** anchor separation in widget-local mm, as dictated by the frame */
  separation: number;
}

export interface SceneState {
  widgetFrame: { kind: 'acw'; frame: AcwFramePayload }
    | { kind: 'gsw'; frame: GswFramePayload }
    | null;
  currentTarget: TargetPayload | null;
  showTarget: boolean;           // training toggle
  records: TrialRecordPayload[];
  blockIndex: number | null;
  trialIndex: number;
  warning: string | null;
}

export function initialScene(): SceneState {
  return {
    widgetFrame: null,
    currentTarget: null,
    showTarget: false,
    records: [],
    blockIndex: null,
    trialIndex: 0,
    warning: null,
  };
}

function dist(a: PoseObj, b: PoseObj): number {
  const dx = a.position[0] - b.position[0];
  const dy = a.position[1] - b.position[1];
  const dz = a.position[2] - b.position[2];
  return Math.sqrt(dx * dx + dy * dy + dz * dz);
}

/** Glyph pairs to draw for a collimation-widget frame: hidden components
 * produce nothing, a fully collimated frame draws nothing at all. */
export function acwGlyphs(frame: AcwFramePayload): GlyphPair[] {
  return frame.ecws
    .filter((e) => e.visible)
    .map((e) => ({
      kind: e.kind,
      color: e.color,
      symbol: e.symbol,
      a: e.anchor_a,
      b: e.anchor_b,
      separation: dist(e.anchor_a, e.anchor_b),
    }));
}

export interface CylinderDraw {
  pose: PoseObj;
  lengthMm: number;
  radiusMm: number;
  color: string;
}

/** Both baseline cylinders, tinted with the engine-decided color. */
export function gswCylinders(frame: GswFramePayload): CylinderDraw[] {
  return [
    {
      pose: frame.tool_cylinder.pose,
      lengthMm: frame.tool_cylinder.length_mm,
      radiusMm: frame.tool_cylinder.radius_mm,
      color: frame.color,
    },
    {
      pose: frame.target_cylinder.pose,
      lengthMm: frame.target_cylinder.length_mm,
      radiusMm: frame.target_cylinder.radius_mm,
      color: frame.color,
    },
  ];
}

/** Fold one engine message into the scene.  A malformed frame never
 * replaces the last good one; callers surface `warning` on the HUD. */
export function applyMessage(state: SceneState, msg: EngineMessage): SceneState {
  switch (msg.type) {
    case 'acw_frame':
      return { ...state, widgetFrame: { kind: 'acw', frame: msg.payload }, warning: null };
    case 'gsw_frame':
      return { ...state, widgetFrame: { kind: 'gsw', frame: msg.payload }, warning: null };
    case 'target':
      return {
        ...state,
        currentTarget: msg.payload,
        blockIndex: msg.payload.block ?? state.blockIndex,
        widgetFrame: null,
        showTarget: msg.payload.group === 'training',
      };
    case 'trial_begin':
      return { ...state, blockIndex: msg.payload.block };
    case 'trial_confirm':
      return {
        ...state,
        records: [...state.records, msg.payload],
        trialIndex: state.trialIndex + 1,
        widgetFrame: null,
      };
    case 'error':
      return { ...state, warning: msg.payload.message };
  }
}

/** Number of glyph pairs the renderer will draw for the current frame. */
export function visibleGlyphCount(state: SceneState): number {
  if (!state.widgetFrame) return 0;
  if (state.widgetFrame.kind === 'acw') return acwGlyphs(state.widgetFrame.frame).length;
  return 0; // the baseline draws cylinders, not glyph pairs
}
