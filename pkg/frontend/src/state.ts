// Explorer state and the debounced, latest-wins request scheduler.
// Dependencies (fetcher, timers) are injectable so the concurrency
// contract is testable without a browser or a live service.

import type { PhaseMapPayload, PhaseMapRequest } from "./types.js";
import { isPhaseMapPayload } from "./types.js";

export interface ExplorerState {
  selectedField: string | null;
  nMax: number;
  degreeToggles: Map<number, boolean>;
  altitudeKm: number;
  inclinationDeg: number;
  includeJ2sq: boolean | null;
  includeCentering: boolean;
  resolution: number;
  payload: PhaseMapPayload | null; // last successful response
  pending: boolean;
  error: string | null;
}

export function initialState(): ExplorerState {
  return {
    selectedField: null,
    nMax: 12,
    degreeToggles: new Map(),
    altitudeKm: 600,
    inclinationDeg: 63.45,
    includeJ2sq: null,
    includeCentering: false,
    resolution: 128,
    payload: null,
    pending: false,
    error: null,
  };
}

/** Fig. 5 panel preset: 600 km over the surface at 63.45 deg. */
export function applyPreset(state: ExplorerState): ExplorerState {
  return { ...state, altitudeKm: 600, inclinationDeg: 63.45 };
}

export function requestBody(state: ExplorerState): PhaseMapRequest {
  const body: PhaseMapRequest = {
    altitude_km: state.altitudeKm,
    i_circ_deg: state.inclinationDeg,
    n_max: state.nMax,
    resolution: state.resolution,
  };
  if (state.selectedField) body.field = state.selectedField;
  if (state.includeJ2sq !== null) body.include_j2sq = state.includeJ2sq;
  if (state.includeCentering) body.include_centering = true;
  const off = [...state.degreeToggles.entries()].filter(([, on]) => !on);
  if (off.length > 0) {
    const degrees: number[] = [];
    for (let d = 2; d <= state.nMax; d++) {
      if (state.degreeToggles.get(d) !== false) degrees.push(d);
    }
    body.degrees = degrees;
  }
  return body;
}

export interface FetchResult {
  ok: boolean;
  status: number;
  body: unknown;
}

export type Fetcher = (body: PhaseMapRequest, signal: AbortSignal) => Promise<FetchResult>;

export interface SchedulerCallbacks {
  onPayload: (payload: PhaseMapPayload) => void;
  onError: (message: string) => void;
  onPending?: (pending: boolean) => void;
}

interface Timers {
  set: (fn: () => void, ms: number) => unknown;
  clear: (handle: unknown) => void;
}

/**
 * Debounced, latest-wins phase-map requester.
 *
 * - changes within the debounce window coalesce into one request;
 * - a request identical to the last issued one is suppressed (no-op);
 * - at most one request is in flight; a newer one aborts and supersedes it;
 * - stale responses (an older generation finishing late) are dropped.
 */
export class PhaseMapScheduler {
  private generation = 0;

  private issued = 0;

  private lastBodyKey: string | null = null;

  private timerHandle: unknown = null;

  private controller: AbortController | null = null;

  private pendingBody: PhaseMapRequest | null = null;

  requestsIssued = 0;

  constructor(
    private fetcher: Fetcher,
    private callbacks: SchedulerCallbacks,
    private debounceMs = 150,
    private timers: Timers = {
      set: (fn, ms) => setTimeout(fn, ms),
      clear: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
    },
  ) {}

  /** Schedule a (debounced) request for the given body. */
  request(body: PhaseMapRequest): void {
    this.pendingBody = body;
    if (this.timerHandle !== null) this.timers.clear(this.timerHandle);
    this.timerHandle = this.timers.set(() => this.fire(), this.debounceMs);
  }

  private fire(): void {
    this.timerHandle = null;
    const body = this.pendingBody;
    if (body === null) return;
    const key = JSON.stringify(body);
    if (key === this.lastBodyKey) return; // no-op change: no request
    this.lastBodyKey = key;
    const gen = ++this.generation;
    this.requestsIssued += 1;
    if (this.controller) this.controller.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.callbacks.onPending?.(true);
    this.fetcher(body, controller.signal).then(
      (result) => this.settle(gen, result),
      (err) => {
        if (gen === this.generation) {
          this.callbacks.onPending?.(false);
          if ((err as Error)?.name !== "AbortError") {
            this.callbacks.onError(String(err));
          }
        }
      },
    );
  }

  private settle(gen: number, result: FetchResult): void {
    if (gen !== this.generation) return; // superseded: drop stale response
    this.callbacks.onPending?.(false);
    if (!result.ok) {
      const detail =
        typeof result.body === "object" && result.body !== null
          ? (result.body as { detail?: string }).detail
          : undefined;
      this.callbacks.onError(detail ?? `request failed (${result.status})`);
      return;
    }
    if (!isPhaseMapPayload(result.body)) {
      this.callbacks.onError("malformed phase-map payload");
      return;
    }
    this.callbacks.onPayload(result.body);
  }
}
