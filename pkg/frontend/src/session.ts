/**
 * Session driver: walks the counterbalanced block sequence one target at a
 * time, confirming advances, collecting confirmed records for CSV export.
 * All session state lives in the engine; on reconnect the driver resumes
 * from the engine's status.
 */

import { PoseObj, TrialRecordPayload } from './protocol.js';
import { recordsToCsv } from './csv.js';

export interface EngineClient {
  startSession(participantId: string, set: 'A' | 'B', seed: number,
               includeTraining: boolean): Promise<BlockInfo[]>;
  status(): Promise<SessionStatus>;
  beginTrial(): Promise<unknown>;                 // target message
  confirmTrial(tool: PoseObj): Promise<ConfirmResult>;
}

export interface BlockInfo {
  index: number;
  widget: string;
  group: string;
  n_targets: number;
}

export interface SessionStatus {
  active: boolean;
  trial_active: boolean;
  records: number;
  done: boolean;
}

export interface ConfirmResult {
  record: TrialRecordPayload;
  done: boolean;
}

export class SessionDriver {
  records: TrialRecordPayload[] = [];
  blocks: BlockInfo[] = [];
  done = false;
  private trialActive = false;
  private confirmsInFlight = 0;

  constructor(private client: EngineClient) {}

  async start(participantId: string, set: 'A' | 'B', seed: number,
              includeTraining = true): Promise<void> {
    this.blocks = await this.client.startSession(participantId, set, seed, includeTraining);
  }

  /** Resume after a page refresh: the engine is the source of truth. */
  async resume(): Promise<SessionStatus> {
    const status = await this.client.status();
    this.done = status.done;
    this.trialActive = status.trial_active;
    return status;
  }

  async nextTarget(): Promise<unknown> {
    if (this.trialActive) throw new Error('trial already active');
    const target = await this.client.beginTrial();
    this.trialActive = true;
    return target;
  }

  /** Exactly one confirm per trial; double confirms are rejected locally. */
  async confirm(tool: PoseObj): Promise<ConfirmResult> {
    if (!this.trialActive || this.confirmsInFlight > 0) {
      throw new Error('no active trial to confirm');
    }
    this.confirmsInFlight += 1;
    try {
      const result = await this.client.confirmTrial(tool);
      this.records.push(result.record);
      this.trialActive = false;
      this.done = result.done;
      return result;
    } finally {
      this.confirmsInFlight -= 1;
    }
  }

  exportCsv(): string {
    return recordsToCsv(this.records);
  }
}
