/**
 * Client-side move throttling and batching.
 *
 * Mirrors the server's ingestion rule (store a sample only when >= 200 ms
 * after the last stored one) so the server-stored log equals what the client
 * believes it sent. Accepted samples accumulate until drained for a batch
 * POST; a failed batch is re-queued so nothing is lost across reconnects.
 */

import type { MoveSample } from "./types";

export const THROTTLE_MS = 200;

export class MoveThrottle {
  private lastStored: number | null = null;
  private pending: MoveSample[] = [];

  constructor(private minGapMs: number = THROTTLE_MS) {}

  /** Apply the throttle; returns whether the sample was kept. */
  offer(sample: MoveSample): boolean {
    if (!Number.isFinite(sample.x) || !Number.isFinite(sample.y) || !Number.isFinite(sample.t)) {
      return false;
    }
    if (this.lastStored !== null && sample.t - this.lastStored < this.minGapMs) {
      return false;
    }
    this.lastStored = sample.t;
    this.pending.push(sample);
    return true;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  /** Take the current batch, leaving the buffer empty. */
  drain(): MoveSample[] {
    const batch = this.pending;
    this.pending = [];
    return batch;
  }

  /** Put a failed batch back at the front (connection loss recovery). */
  requeue(batch: MoveSample[]): void {
    this.pending = batch.concat(this.pending);
  }
}
