// Frame-by-frame playback of the coefficient-by-coefficient model ramp.
// Frames cache as they stream in; scrubbing backward re-renders from the
// cache without another request, and an interrupted stream resumes from
// the last cached degree.

import type { RampFrame } from "./types.js";

export interface RampCallbacks {
  onFrame: (frame: RampFrame, index: number) => void;
  onFinished?: () => void;
  onInterrupted?: (lastDegree: number | null, error: unknown) => void;
}

export class RampPlayer {
  private frames: RampFrame[] = [];

  private position = -1;

  private timer: ReturnType<typeof setTimeout> | null = null;

  playing = false;

  constructor(
    private callbacks: RampCallbacks,
    private frameMs = 600,
  ) {}

  get frameCount(): number {
    return this.frames.length;
  }

  get currentIndex(): number {
    return this.position;
  }

  get lastDegree(): number | null {
    return this.frames.length ? this.frames[this.frames.length - 1].degree : null;
  }

  /** Degrees still missing from a requested ramp (for stream resumption). */
  remainingDegrees(requested: number[]): number[] {
    const have = new Set(this.frames.map((f) => f.degree));
    return requested.filter((d) => !have.has(d));
  }

  /** Consume a frame stream, caching and advancing the playhead live. */
  async consume(stream: AsyncIterable<RampFrame>): Promise<void> {
    try {
      for await (const frame of stream) {
        this.frames.push(frame);
        if (this.position === this.frames.length - 2 || this.position < 0) {
          this.position = this.frames.length - 1;
          this.callbacks.onFrame(frame, this.position);
        }
      }
      this.callbacks.onFinished?.();
    } catch (err) {
      this.callbacks.onInterrupted?.(this.lastDegree, err);
    }
  }

  /** Jump to a cached frame; no network involved. */
  scrub(index: number): void {
    if (index < 0 || index >= this.frames.length) return;
    this.position = index;
    this.callbacks.onFrame(this.frames[index], index);
  }

  play(): void {
    if (this.playing || this.frames.length === 0) return;
    this.playing = true;
    const step = () => {
      if (!this.playing) return;
      const next = this.position + 1;
      if (next >= this.frames.length) {
        this.playing = false;
        this.callbacks.onFinished?.();
        return;
      }
      this.scrub(next);
      this.timer = setTimeout(step, this.frameMs);
    };
    this.timer = setTimeout(step, this.frameMs);
  }

  pause(): void {
    this.playing = false;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
  }
}
