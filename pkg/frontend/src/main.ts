/**
 * Browser entry point: wires input, transport, scene, and renderer into the
 * interactive positioning app.  Expects the engine service (serve command)
 * on the same host.
 */

import { DEFAULT_INPUT, applyDelta, inputToDelta } from './input.js';
import { PoseObj } from './protocol.js';
import { applyMessage, initialScene } from './scene.js';
import { render } from './renderer.js';
import { SessionDriver } from './session.js';
import { FrameSocket, HttpEngineClient } from './transport.js';

const ENGINE_URL = `http://${location.hostname}:8421`;
const WS_URL = `ws://${location.hostname}:8421/ws`;

function downloadCsv(text: string, filename: string): void {
  const blob = new Blob([text], { type: 'text/csv' });
  const a = document.createElement('a');
  a.href = URL.createObjectURL(blob);
  a.download = filename;
  a.click();
  URL.revokeObjectURL(a.href);
}

export async function start(): Promise<void> {
  const canvas = document.getElementById('scene') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d')!;
  let scene = initialScene();
  let tool: PoseObj = { position: [0, 0, 0], orientation: [1, 0, 0, 0] };

  const client = new HttpEngineClient(ENGINE_URL);
  const driver = new SessionDriver(client);
  const socket = new FrameSocket(WS_URL, (msg) => {
    scene = applyMessage(scene, msg);
  }, (warning) => {
    scene = { ...scene, warning };
  });

  const status = await driver.resume().catch(() => null);
  if (!status || !status.active) {
    const participant = prompt('participant id', 'P01') ?? 'P01';
    const set = (prompt('treatment set (A or B)', 'A') ?? 'A') as 'A' | 'B';
    await driver.start(participant, set, Date.now() % 100000);
  }
  const firstTarget = await driver.nextTarget() as { payload?: unknown };
  if (firstTarget && (firstTarget as any).type === 'target') {
    scene = applyMessage(scene, firstTarget as any);
  }

  let dragging = false;
  canvas.addEventListener('mousedown', () => { dragging = true; });
  window.addEventListener('mouseup', () => { dragging = false; });
  canvas.addEventListener('mousemove', (ev) => {
    if (!dragging) return;
    const delta = inputToDelta(
      { type: 'drag', dx: ev.movementX, dy: ev.movementY, modifier: ev.shiftKey },
      DEFAULT_INPUT);
    tool = applyDelta(tool, delta);
    socket.sendPose(tool);
  });
  canvas.addEventListener('wheel', (ev) => {
    ev.preventDefault();
    tool = applyDelta(tool, inputToDelta({ type: 'wheel', delta: Math.sign(ev.deltaY) }));
    socket.sendPose(tool);
  });
  window.addEventListener('keydown', async (ev) => {
    if (ev.code !== 'Space') return;
    ev.preventDefault();
    try {
      const result = await driver.confirm(tool);
      if (result.done) {
        downloadCsv(driver.exportCsv(), 'trials.csv');
        scene = { ...scene, warning: 'session complete - CSV downloaded' };
      } else {
        const next = await driver.nextTarget();
        scene = applyMessage(scene, next as any);
        tool = { position: [0, 0, 0], orientation: [1, 0, 0, 0] };
        socket.sendPose(tool);
      }
    } catch (err) {
      scene = { ...scene, warning: String(err) };
    }
  });

  const loop = () => {
    render(ctx, scene, tool);
    requestAnimationFrame(loop);
  };
  loop();
}

if (typeof document !== 'undefined' && document.getElementById('scene')) {
  start().catch((err) => console.error(err));
}
