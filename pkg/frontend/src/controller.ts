/**
 * Application wiring between the map pane, the throttle and the service.
 *
 * Timers live in main.ts; the controller exposes `flush()` (send the pending
 * move batch) and `tick()` (fire the periodic pipeline trigger when due) so
 * the whole flow is drivable from tests without real time.
 */

import type { ApiClient, SessionHandle } from "./api";
import { MapView } from "./map";
import { zoomToScale } from "./projection";
import { MoveThrottle } from "./throttle";
import type { PipelineResultDoc, Viewport } from "./types";

export interface ControllerOptions {
  api: ApiClient;
  container: HTMLElement;
  datasetId: string;
  viewport: Viewport;
  config?: Record<string, unknown>;
  width?: number;
  height?: number;
  autoRunMs?: number | null; // default: run every 5 s of activity
  now?: () => number;
}

export class AppController {
  readonly map: MapView;
  readonly throttle = new MoveThrottle();
  private api: ApiClient;
  private datasetId: string;
  private viewport: Viewport;
  private config?: Record<string, unknown>;
  private session: SessionHandle | null = null;
  private unsubscribe: (() => void) | null = null;
  private now: () => number;
  private autoRunMs: number | null;
  private startedAt: number | null = null;
  private lastRunAt: number | null = null;
  private movesSinceRun = 0;
  private running = false;

  constructor(opts: ControllerOptions) {
    this.api = opts.api;
    this.datasetId = opts.datasetId;
    this.viewport = opts.viewport;
    this.config = opts.config;
    this.now = opts.now ?? (() => Date.now());
    this.autoRunMs = opts.autoRunMs === undefined ? 5000 : opts.autoRunMs;
    this.map = new MapView(
      opts.container,
      opts.viewport,
      opts.width ?? 800,
      opts.height ?? 600,
      { onMove: (x, y, t) => this.onMove(x, y, t) },
      this.now,
    );
  }

  private onMove(x: number, y: number, t: number): void {
    if (this.throttle.offer({ x, y, t })) {
      this.movesSinceRun += 1;
    }
  }

  async start(): Promise<void> {
    this.session = await this.api.createSession(this.datasetId, this.viewport, this.config);
    this.startedAt = this.now();
    const points = await this.api.fetchPoints(this.datasetId);
    this.map.setPoints(points);
    this.unsubscribe = this.api.subscribe(this.session.sessionId, (doc: PipelineResultDoc) =>
      this.map.applyResult(doc),
    );
  }

  get sessionId(): string {
    if (!this.session) throw new Error("controller not started");
    return this.session.sessionId;
  }

  /** Send the pending move batch; on failure the batch is kept for retry. */
  async flush(): Promise<number> {
    if (!this.session || this.throttle.pendingCount === 0) return 0;
    const batch = this.throttle.drain();
    try {
      return await this.api.postMoves(this.session.sessionId, batch);
    } catch (err) {
      this.throttle.requeue(batch);
      this.map.showToast(`connection lost, ${batch.length} moves buffered`);
      return 0;
    }
  }

  /** Fire the periodic trigger when it is due and there was activity. */
  async tick(): Promise<boolean> {
    if (this.autoRunMs === null || this.running || this.movesSinceRun === 0) return false;
    const anchor = this.lastRunAt ?? this.startedAt;
    if (anchor === null || this.now() - anchor < this.autoRunMs) return false;
    await this.runNow();
    return true;
  }

  /** The "Highlight now" action: flush pending moves, run, render. */
  async runNow(): Promise<PipelineResultDoc | null> {
    if (!this.session || this.running) return null;
    this.running = true;
    try {
      await this.flush();
      const doc = await this.api.runPipeline(this.session.sessionId);
      this.map.applyResult(doc);
      this.lastRunAt = this.now();
      this.movesSinceRun = 0;
      return doc;
    } catch (err) {
      this.map.showToast(`pipeline run failed: ${(err as Error).message}`);
      return null;
    } finally {
      this.running = false;
    }
  }

  /** Zoom/pan settle: recompute scale, inform the server, re-project overlays. */
  async setView(gamma: number, theta: number, zoom: number): Promise<void> {
    this.viewport = { gamma, theta, scale: zoomToScale(zoom, gamma) };
    this.map.setViewport(this.viewport);
    if (this.session) {
      await this.api.putViewport(this.session.sessionId, this.viewport);
    }
  }

  stop(): void {
    this.unsubscribe?.();
    this.unsubscribe = null;
  }
}
