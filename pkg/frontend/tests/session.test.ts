import { describe, expect, it } from 'vitest';

import { CSV_COLUMNS, recordsToCsv } from '../src/csv.js';
import { PoseObj, TrialRecordPayload } from '../src/protocol.js';
import { BlockInfo, ConfirmResult, EngineClient, SessionDriver, SessionStatus } from '../src/session.js';

function record(i: number): TrialRecordPayload {
  return {
    participant_id: 'P01', set: 'A', block: 2, widget: 'ACW', target_id: i,
    group: 'mandible', first_of_block: i === 0, tt_ms: 1000 + i, pem_mm: 1.5,
    pe_x_mm: 1.5, pe_y_mm: 0, pe_z_mm: 0, aem_deg: 0.5, ae_x_deg: 0.5,
    ae_y_deg: 0, ae_z_deg: 0, swing_deg: 0.5,
  };
}

class FakeClient implements EngineClient {
  confirms = 0;
  begun = 0;
  async startSession(): Promise<BlockInfo[]> {
    return [{ index: 0, widget: 'ACW', group: 'mandible', n_targets: 2 }];
  }
  async status(): Promise<SessionStatus> {
    return { active: true, trial_active: false, records: 0, done: false };
  }
  async beginTrial(): Promise<unknown> {
    this.begun += 1;
    return { type: 'target', payload: {} };
  }
  async confirmTrial(_tool: PoseObj): Promise<ConfirmResult> {
    this.confirms += 1;
    return { record: record(this.confirms - 1), done: this.confirms >= 2 };
  }
}

const tool: PoseObj = { position: [0, 0, 0], orientation: [1, 0, 0, 0] };

describe('session driver', () => {
  it('walks begin/confirm pairs and flags completion', async () => {
    const client = new FakeClient();
    const driver = new SessionDriver(client);
    await driver.start('P01', 'A', 1);
    await driver.nextTarget();
    const first = await driver.confirm(tool);
    expect(first.done).toBe(false);
    await driver.nextTarget();
    const second = await driver.confirm(tool);
    expect(second.done).toBe(true);
    expect(driver.records).toHaveLength(2);
    expect(driver.done).toBe(true);
  });

  it('rejects a confirm without an active trial', async () => {
    const driver = new SessionDriver(new FakeClient());
    await expect(driver.confirm(tool)).rejects.toThrow('no active trial');
  });

  it('rejects a second begin while a trial is active', async () => {
    const driver = new SessionDriver(new FakeClient());
    await driver.nextTarget();
    await expect(driver.nextTarget()).rejects.toThrow('already active');
  });
});

describe('csv export', () => {
  it('writes the exact engine column order', () => {
    const text = recordsToCsv([record(0)]);
    const [header, row] = text.trimEnd().split('\n');
    expect(header).toBe(CSV_COLUMNS.join(','));
    expect(row.split(',')).toHaveLength(CSV_COLUMNS.length);
    expect(row).toContain('true'); // booleans are lowercase words, not 0/1
  });
});
