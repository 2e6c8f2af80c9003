/**
 * Engine frame protocol: newline-delimited JSON messages, one object per
 * line, also carried 1:1 as websocket text messages.  The UI never computes
 * guidance state itself; everything rendered comes out of these payloads.
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // w, x, y, z

export interface PoseObj {
  position: Vec3;
  orientation: Quat;
}

export interface EcwObj {
  kind: 'PEX' | 'PEY' | 'PEZ' | 'AEX' | 'AEZ';
  e: number;
  cs: number;
  visible: boolean;
  color: string;
  symbol: string;
  anchor_a: PoseObj;
  anchor_b: PoseObj;
}

export interface AcwFramePayload {
  origin: PoseObj;
  display_scale: number;
  fully_collimated: boolean;
  ecws: EcwObj[];
}

export interface CylinderObj {
  pose: PoseObj;
  length_mm: number;
  radius_mm: number;
}

export interface GswFramePayload {
  tool_cylinder: CylinderObj;
  target_cylinder: CylinderObj;
  color: 'red' | 'green';
  pem: number;
  aem_swing: number;
}

export interface TargetPayload {
  id: number;
  pose: PoseObj;
  group: string;
  block?: number;
  widget?: 'ACW' | 'GSW';
}

export interface TrialRecordPayload {
  participant_id: string;
  set: string;
  block: number;
  widget: string;
  target_id: number;
  group: string;
  first_of_block: boolean;
  tt_ms: number;
  pem_mm: number;
  pe_x_mm: number;
  pe_y_mm: number;
  pe_z_mm: number;
  aem_deg: number;
  ae_x_deg: number;
  ae_y_deg: number;
  ae_z_deg: number;
  swing_deg: number;
  simulated?: boolean;
}

export type EngineMessage =
  | { type: 'acw_frame'; payload: AcwFramePayload }
  | { type: 'gsw_frame'; payload: GswFramePayload }
  | { type: 'target'; payload: TargetPayload }
  | { type: 'trial_begin'; payload: { block: number; target_id: number; widget: string } }
  | { type: 'trial_confirm'; payload: TrialRecordPayload }
  | { type: 'error'; payload: { message: string } };

const MESSAGE_TYPES = new Set([
  'acw_frame', 'gsw_frame', 'target', 'trial_begin', 'trial_confirm', 'error',
]);

export class ProtocolError extends Error {}

function isPose(v: unknown): v is PoseObj {
  const p = v as PoseObj;
  return (
    !!p && Array.isArray(p.position) && p.position.length === 3 &&
    Array.isArray(p.orientation) && p.orientation.length === 4 &&
    p.position.every((n) => typeof n === 'number') &&
    p.orientation.every((n) => typeof n === 'number')
  );
}

/** Parse one protocol line (or websocket text message). */
export function parseMessage(line: string): EngineMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    throw new ProtocolError(`invalid JSON: ${line.slice(0, 80)}`);
  }
  const msg = obj as { type?: string; payload?: unknown };
  if (!msg || typeof msg.type !== 'string' || msg.payload === undefined) {
    throw new ProtocolError('message must have type and payload');
  }
  if (!MESSAGE_TYPES.has(msg.type)) {
    throw new ProtocolError(`unknown message type ${msg.type}`);
  }
  if (msg.type === 'acw_frame') {
    const p = msg.payload as AcwFramePayload;
    if (!isPose(p.origin) || !Array.isArray(p.ecws) || p.ecws.length !== 5) {
      throw new ProtocolError('malformed acw_frame payload');
    }
  }
  if (msg.type === 'gsw_frame') {
    const p = msg.payload as GswFramePayload;
    if (!p.tool_cylinder || !isPose(p.tool_cylinder.pose) ||
        (p.color !== 'red' && p.color !== 'green')) {
      throw new ProtocolError('malformed gsw_frame payload');
    }
  }
  return msg as EngineMessage;
}

export function encodeMessage(type: string, payload: unknown): string {
  return JSON.stringify({ type, payload });
}

export function poseObj(position: Vec3, orientation: Quat): PoseObj {
  return { position, orientation };
}
