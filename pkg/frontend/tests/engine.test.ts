/**
 * Integration against the real engine: frames and trial records are produced
 * by the Python package and consumed by the UI modules, so these tests pin
 * the cross-language contract rather than a TS-side fixture.
 */

import { execFileSync } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, describe, expect, it } from 'vitest';

import { recordsToCsv } from '../src/csv.js';
import { parseMessage } from '../src/protocol.js';
import { applyMessage, gswCylinders, initialScene } from '../src/scene.js';

function python(script: string): string[] {
  const out = execFileSync('python3', ['-c', script], { encoding: 'utf-8' });
  return out.split('\n').filter((l) => l.length > 0);
}

const tmp = mkdtempSync(join(tmpdir(), 'collimator-ui-'));
afterAll(() => rmSync(tmp, { recursive: true, force: true }));

describe('baseline color follows the engine frame exactly', () => {
  it('flips red to green on the precise frame the engine says', () => {
    // tool slides in from 10 mm positional error in 0.5 mm steps; the engine
    // threshold is pem <= 2 mm, so the flip lands exactly on step 16
    const lines = python(`
from collimator.gsw import gsw_frame
from collimator.pose import Pose, UnitQuat, Vec3
from collimator.protocol import encode_line, gsw_frame_to_obj, message

target = Pose(Vec3(0.0, 0.0, 0.0), UnitQuat(1.0, 0.0, 0.0, 0.0))
for i in range(25):
    tool = Pose(Vec3(10.0 - 0.5 * i, 0.0, 0.0), UnitQuat(1.0, 0.0, 0.0, 0.0))
    print(encode_line(message("gsw_frame", gsw_frame_to_obj(gsw_frame(tool, target)))), end="")
`);
    expect(lines).toHaveLength(25);

    let scene = initialScene();
    const drawnColors: string[] = [];
    for (const line of lines) {
      scene = applyMessage(scene, parseMessage(line));
      if (scene.widgetFrame?.kind !== 'gsw') throw new Error('expected gsw frame');
      const colors = new Set(gswCylinders(scene.widgetFrame.frame).map((c) => c.color));
      expect(colors.size).toBe(1); // both cylinders share the engine color
      drawnColors.push([...colors][0]);
    }
    const firstGreen = drawnColors.indexOf('green');
    expect(firstGreen).toBe(16);
    expect(drawnColors.slice(0, 16).every((c) => c === 'red')).toBe(true);
    expect(drawnColors.slice(16).every((c) => c === 'green')).toBe(true);
  });
});

describe('exported CSV feeds straight back into the engine', () => {
  it('analyze accepts the UI export unmodified', () => {
    // drive a full counterbalanced session engine-side, streaming each
    // confirmed trial over the wire protocol
    const lines = python(`
from collimator.config import EngineConfig
from collimator.protocol import encode_line, message, record_to_obj
from collimator.session import Session, TargetGroup, build_plan
from collimator.simulate import study_targets

config = EngineConfig()
plan = build_plan("P01", "A", 7, study_targets(config))
clock = {"t": 0.0}
session = Session(plan, now_ms=lambda: clock["t"])
for bi, block in enumerate(plan.blocks):
    if block.group is TargetGroup.TRAINING:
        continue
    for target in block.targets:
        session.begin_trial(bi, target)
        clock["t"] += 1234.5
        rec = session.confirm_trial(target.pose)
        print(encode_line(message("trial_confirm", record_to_obj(rec))), end="")
`);
    expect(lines.length).toBe(64); // 4 test blocks x 16 targets

    let scene = initialScene();
    for (const line of lines) scene = applyMessage(scene, parseMessage(line));
    expect(scene.records).toHaveLength(64);

    const csvPath = join(tmp, 'export.csv');
    writeFileSync(csvPath, recordsToCsv(scene.records));
    const report = execFileSync(
      'python3', ['-m', 'collimator.cli', 'analyze', csvPath], { encoding: 'utf-8' });
    expect(report).toContain('ACW');
    expect(report).toContain('GSW');
  });
});
