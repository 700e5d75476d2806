/** Typed client for the session service, with an injectable EventSource. */

import type { DatasetInfo, DatasetPoint, MoveSample, PipelineResultDoc, Viewport } from "./types";

export type EventSourceFactory = (url: string) => EventSource;

export interface SessionHandle {
  sessionId: string;
  startedAtMs: number;
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private eventSourceFactory: EventSourceFactory = (url) => new EventSource(url),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      const detail = await response.text();
      throw new Error(`${init?.method ?? "GET"} ${path} failed (${response.status}): ${detail}`);
    }
    return (await response.json()) as T;
  }

  async listDatasets(): Promise<DatasetInfo[]> {
    const body = await this.request<{ datasets: DatasetInfo[] }>("/datasets");
    return body.datasets;
  }

  async fetchPoints(datasetId: string): Promise<DatasetPoint[]> {
    const body = await this.request<{ points: DatasetPoint[] }>(
      `/datasets/${datasetId}/points`,
    );
    return body.points;
  }

  async createSession(
    datasetId: string,
    viewport: Viewport,
    config?: Record<string, unknown>,
  ): Promise<SessionHandle> {
    const body = await this.request<{ session_id: string; started_at_ms: number }>("/sessions", {
      method: "POST",
      body: JSON.stringify({ dataset_id: datasetId, viewport, config: config ?? null }),
    });
    return { sessionId: body.session_id, startedAtMs: body.started_at_ms };
  }

  async postMoves(sessionId: string, moves: MoveSample[]): Promise<number> {
    const body = await this.request<{ accepted_count: number }>(
      `/sessions/${sessionId}/moves`,
      { method: "POST", body: JSON.stringify({ moves }) },
    );
    return body.accepted_count;
  }

  async putViewport(sessionId: string, viewport: Viewport): Promise<void> {
    await this.request(`/sessions/${sessionId}/viewport`, {
      method: "PUT",
      body: JSON.stringify(viewport),
    });
  }

  async runPipeline(sessionId: string): Promise<PipelineResultDoc> {
    return this.request<PipelineResultDoc>(`/sessions/${sessionId}/run`, { method: "POST" });
  }

  /** Subscribe to pipeline results pushed over the event stream. */
  subscribe(sessionId: string, onResult: (doc: PipelineResultDoc) => void): () => void {
    const source = this.eventSourceFactory(`${this.baseUrl}/sessions/${sessionId}/events`);
    const handler = (event: MessageEvent) => {
      onResult(JSON.parse(event.data) as PipelineResultDoc);
    };
    source.addEventListener("result", handler as EventListener);
    return () => {
      source.removeEventListener("result", handler as EventListener);
      source.close();
    };
  }
}
