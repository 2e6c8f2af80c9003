/**
 * Engine transport: HTTP for session control, websocket for the frame
 * stream.  Each websocket text message is one protocol line.
 */

import { EngineMessage, PoseObj, encodeMessage, parseMessage } from './protocol.js';
import { BlockInfo, ConfirmResult, EngineClient, SessionStatus } from './session.js';

export class HttpEngineClient implements EngineClient {
  constructor(private baseUrl: string) {}

  private async post(path: string, body: unknown): Promise<any> {
    const res = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw new Error(`${path}: ${res.status} ${await res.text()}`);
    return res.json();
  }

  async startSession(participantId: string, set: 'A' | 'B', seed: number,
                     includeTraining: boolean): Promise<BlockInfo[]> {
    const out = await this.post('/session/start', {
      participant_id: participantId, set, seed, include_training: includeTraining,
    });
    return out.blocks;
  }

  async status(): Promise<SessionStatus> {
    const res = await fetch(this.baseUrl + '/session/status');
    return res.json();
  }

  async beginTrial(): Promise<unknown> {
    return this.post('/session/begin', {});
  }

  async confirmTrial(tool: PoseObj): Promise<ConfirmResult> {
    return this.post('/session/confirm', tool);
  }
}

export class FrameSocket {
  private ws: WebSocket;

  constructor(url: string, private onMessage: (msg: EngineMessage) => void,
              private onWarning: (text: string) => void) {
    this.ws = new WebSocket(url);
    this.ws.onmessage = (event) => {
      try {
        this.onMessage(parseMessage(String(event.data)));
      } catch (err) {
        this.onWarning(String(err));
      }
    };
    this.ws.onerror = () => this.onWarning('frame socket error');
  }

  sendPose(tool: PoseObj): void {
    if (this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeMessage('pose', tool));
    }
  }

  close(): void {
    this.ws.close();
  }
}
