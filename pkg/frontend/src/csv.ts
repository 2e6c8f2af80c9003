/**
 * CSV export matching the engine's trial schema, so an exported file feeds
 * straight into the engine's analyze command.
 */

import { TrialRecordPayload } from './protocol.js';

export const CSV_COLUMNS = [
  'participant_id', 'set', 'block', 'widget', 'target_id', 'group',
  'first_of_block', 'tt_ms', 'pem_mm', 'pe_x_mm', 'pe_y_mm', 'pe_z_mm',
  'aem_deg', 'ae_x_deg', 'ae_y_deg', 'ae_z_deg', 'swing_deg',
] as const;

function cell(value: unknown): string {
  if (typeof value === 'boolean') return value ? 'true' : 'false';
  return String(value);
}

export function recordsToCsv(records: TrialRecordPayload[]): string {
  const lines = [CSV_COLUMNS.join(',')];
  for (const r of records) {
    lines.push([
      r.participant_id, r.set, r.block, r.widget, r.target_id, r.group,
      r.first_of_block, r.tt_ms, r.pem_mm, r.pe_x_mm, r.pe_y_mm, r.pe_z_mm,
      r.aem_deg, r.ae_x_deg, r.ae_y_deg, r.ae_z_deg, r.swing_deg,
    ].map(cell).join(','));
  }
  return lines.join('\n') + '\n';
}
