/**
 * Score-file export in the long-form schema consumed by the analysis
 * pipeline: `observer_id,condition_id,score`, one row per graded
 * condition, rows grouped by observer with condition order preserved.
 */

import { SessionRecord } from "./session.js";

export const SCORE_HEADER = "observer_id,condition_id,score";

/** Integers render without a decimal point; other values round-trip exactly. */
export function formatScore(score: number): string {
  if (!Number.isFinite(score) || score < 0 || score > 100) {
    throw new Error(`score ${score} outside [0, 100]`);
  }
  return String(score);
}

export function exportScores(records: SessionRecord[]): string {
  if (records.length === 0) {
    throw new Error("no session records to export");
  }
  const lines = [SCORE_HEADER];
  for (const record of records) {
    for (const entry of record.entries) {
      lines.push(`${record.observerId},${entry.conditionId},${formatScore(entry.score)}`);
    }
  }
  return lines.join("\n") + "\n";
}

/** Trigger a browser download of the exported score file. */
export function downloadScores(doc: Document, records: SessionRecord[], filename: string): void {
  const blob = new Blob([exportScores(records)], { type: "text/csv" });
  const link = doc.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = filename;
  link.click();
  URL.revokeObjectURL(link.href);
}
