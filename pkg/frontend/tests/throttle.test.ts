import { describe, expect, it } from "vitest";

import { MoveThrottle } from "../src/throttle";
import oracle from "./fixtures/throttle_oracle.json";

describe("move throttle", () => {
  it("keeps exactly the samples the server-side replay keeps", () => {
    const throttle = new MoveThrottle();
    const kept = oracle.path.filter((m) => throttle.offer(m));
    expect(kept).toEqual(oracle.stored);
  });

  it("a 10s 60Hz stream stores at most 51 samples", () => {
    // 200 ms gate over 10s leaves ~50 slots
    expect(oracle.stored.length).toBeLessThanOrEqual(51);
    expect(oracle.path.length).toBeGreaterThan(500);
  });

  it("idle cursor sends nothing", () => {
    const throttle = new MoveThrottle();
    expect(throttle.drain()).toEqual([]);
    expect(throttle.pendingCount).toBe(0);
  });

  it("first sample always accepted, fast follower dropped", () => {
    const throttle = new MoveThrottle();
    expect(throttle.offer({ x: 0, y: 0, t: 1000 })).toBe(true);
    expect(throttle.offer({ x: 1, y: 1, t: 1050 })).toBe(false);
    expect(throttle.offer({ x: 2, y: 2, t: 1200 })).toBe(true);
  });

  it("rejects non-finite samples", () => {
    const throttle = new MoveThrottle();
    expect(throttle.offer({ x: NaN, y: 0, t: 0 })).toBe(false);
    expect(throttle.offer({ x: 0, y: 0, t: Infinity })).toBe(false);
  });

  it("requeue puts a failed batch back in order", () => {
    const throttle = new MoveThrottle();
    throttle.offer({ x: 0, y: 0, t: 0 });
    throttle.offer({ x: 1, y: 1, t: 300 });
    const batch = throttle.drain();
    throttle.offer({ x: 2, y: 2, t: 600 });
    throttle.requeue(batch);
    expect(throttle.drain().map((m) => m.t)).toEqual([0, 300, 600]);
  });
});
