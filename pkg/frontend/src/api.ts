// Thin typed client over the service's JSON endpoints.

import type {
  FieldSummary,
  PhaseMapRequest,
  RampFrame,
} from "./types.js";
import type { FetchResult } from "./state.js";

export class ServiceClient {
  constructor(private baseUrl = "") {}

  async getFields(): Promise<FieldSummary[]> {
    const res = await fetch(`${this.baseUrl}/fields`);
    if (!res.ok) throw new Error(`GET /fields failed (${res.status})`);
    return (await res.json()) as FieldSummary[];
  }

  /** POST /phasemap in the shape PhaseMapScheduler expects. */
  async postPhaseMap(body: PhaseMapRequest, signal: AbortSignal): Promise<FetchResult> {
    const res = await fetch(`${this.baseUrl}/phasemap`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return { ok: res.ok, status: res.status, body: await res.json() };
  }

  /** Stream /ramp frames as they arrive (newline-delimited JSON). */
  async *streamRamp(
    body: PhaseMapRequest & { ramp_degrees: number[] },
    signal?: AbortSignal,
  ): AsyncGenerator<RampFrame> {
    const res = await fetch(`${this.baseUrl}/ramp`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!res.ok || res.body === null) {
      throw new Error(`POST /ramp failed (${res.status})`);
    }
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline = buffer.indexOf("\n");
      while (newline >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (line) yield JSON.parse(line) as RampFrame;
        newline = buffer.indexOf("\n");
      }
    }
    const tail = buffer.trim();
    if (tail) yield JSON.parse(tail) as RampFrame;
  }
}
