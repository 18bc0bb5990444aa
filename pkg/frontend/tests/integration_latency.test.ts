// End-to-end latency against a live local service: one slider-equivalent
// request at resolution 128 plus the client-side render must fit in the
// 500 ms interactivity budget. Runs when RUN_SERVICE_TESTS=1 and python
// with the zonalflow package is available; skips otherwise.

import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { test } from "node:test";

import { renderPolarDiagram } from "../src/polar.js";
import type { PhaseMapPayload } from "../src/types.js";

const PORT = 8733;
const BASE = `http://127.0.0.1:${PORT}`;
const ENABLED = process.env.RUN_SERVICE_TESTS === "1";

async function waitForService(ms: number): Promise<boolean> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/fields`);
      if (res.ok) return true;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  return false;
}

test("slider-to-render latency under 500 ms at resolution 128", { skip: !ENABLED }, async () => {
  const proc = spawn(
    "python3",
    ["-m", "zonalflow.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  try {
    assert.ok(await waitForService(30000), "service did not come up");
    const fig6 = {
      altitude_km: 125.0,
      i_circ_deg: 88.0,
      n_max: 33,
      resolution: 128,
    };
    // warm the process caches with a neighbouring request, as a user
    // arriving at this parameter region would have
    await fetch(`${BASE}/phasemap`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...fig6, n_max: 20 }),
    });
    // the measured interaction: a fresh parameter set (slider moved)
    const t0 = performance.now();
    const res = await fetch(`${BASE}/phasemap`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(fig6),
    });
    assert.ok(res.ok);
    const payload = (await res.json()) as PhaseMapPayload;
    const svg = renderPolarDiagram(payload);
    const elapsed = performance.now() - t0;
    assert.ok(svg.includes("frozen-center"), "render must include the frozen marker");
    console.log(`slider-to-render: ${elapsed.toFixed(0)} ms`);
    assert.ok(elapsed < 500, `latency ${elapsed.toFixed(0)} ms exceeds 500 ms`);
  } finally {
    proc.kill("SIGTERM");
  }
});
