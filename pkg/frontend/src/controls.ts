// DOM bindings: sliders, toggles, preset, spinner and error banner.

import { ServiceClient } from "./api.js";
import { renderPolarDiagram } from "./polar.js";
import {
  ExplorerState,
  PhaseMapScheduler,
  applyPreset,
  initialState,
  requestBody,
} from "./state.js";
import { RampPlayer } from "./rampPlayer.js";
import type { FieldSummary, PhaseMapPayload } from "./types.js";

interface Elements {
  viewport: HTMLElement;
  banner: HTMLElement;
  spinner: HTMLElement;
  altitude: HTMLInputElement;
  altitudeOut: HTMLElement;
  inclination: HTMLInputElement;
  inclinationOut: HTMLElement;
  degree: HTMLInputElement;
  degreeOut: HTMLElement;
  toggles: HTMLElement;
  j2sq: HTMLSelectElement;
  centering: HTMLInputElement;
  preset: HTMLButtonElement;
  rampStart: HTMLButtonElement;
  rampScrub: HTMLInputElement;
  fieldSelect: HTMLSelectElement;
}

function grab(): Elements {
  const byId = <T extends HTMLElement>(id: string): T => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as T;
  };
  return {
    viewport: byId("viewport"),
    banner: byId("error-banner"),
    spinner: byId("spinner"),
    altitude: byId<HTMLInputElement>("altitude"),
    altitudeOut: byId("altitude-out"),
    inclination: byId<HTMLInputElement>("inclination"),
    inclinationOut: byId("inclination-out"),
    degree: byId<HTMLInputElement>("degree"),
    degreeOut: byId("degree-out"),
    toggles: byId("degree-toggles"),
    j2sq: byId<HTMLSelectElement>("j2sq"),
    centering: byId<HTMLInputElement>("centering"),
    preset: byId<HTMLButtonElement>("preset"),
    rampStart: byId<HTMLButtonElement>("ramp-start"),
    rampScrub: byId<HTMLInputElement>("ramp-scrub"),
    fieldSelect: byId<HTMLSelectElement>("field-select"),
  };
}

export function mountExplorer(baseUrl = ""): void {
  const els = grab();
  const client = new ServiceClient(baseUrl);
  let state: ExplorerState = initialState();

  const render = (payload: PhaseMapPayload) => {
    state = { ...state, payload, error: null };
    els.viewport.innerHTML = renderPolarDiagram(payload);
    els.banner.hidden = true;
  };

  const scheduler = new PhaseMapScheduler(
    (body, signal) => client.postPhaseMap(body, signal),
    {
      onPayload: render,
      onError: (message) => {
        // previous frame stays on screen; the banner reports the failure
        state = { ...state, error: message };
        els.banner.textContent = message;
        els.banner.hidden = false;
      },
      onPending: (pending) => {
        state = { ...state, pending };
        els.spinner.hidden = !pending;
      },
    },
  );

  const issue = () => scheduler.request(requestBody(state));

  const rebuildToggles = () => {
    els.toggles.innerHTML = "";
    for (let d = 2; d <= state.nMax; d++) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = state.degreeToggles.get(d) !== false;
      box.addEventListener("change", () => {
        state.degreeToggles.set(d, box.checked);
        issue();
      });
      label.append(box, ` C${d},0`);
      els.toggles.append(label);
    }
  };

  els.altitude.addEventListener("input", () => {
    state = { ...state, altitudeKm: Number(els.altitude.value) };
    els.altitudeOut.textContent = `${state.altitudeKm} km`;
    issue();
  });
  els.inclination.addEventListener("input", () => {
    state = { ...state, inclinationDeg: Number(els.inclination.value) };
    els.inclinationOut.textContent = `${state.inclinationDeg} deg`;
    issue();
  });
  els.degree.addEventListener("input", () => {
    state = { ...state, nMax: Number(els.degree.value) };
    els.degreeOut.textContent = `n = ${state.nMax}`;
    rebuildToggles();
    issue();
  });
  els.j2sq.addEventListener("change", () => {
    const v = els.j2sq.value;
    state = { ...state, includeJ2sq: v === "auto" ? null : v === "on" };
    issue();
  });
  els.centering.addEventListener("change", () => {
    state = { ...state, includeCentering: els.centering.checked };
    issue();
  });
  els.preset.addEventListener("click", () => {
    state = applyPreset(state);
    els.altitude.value = String(state.altitudeKm);
    els.inclination.value = String(state.inclinationDeg);
    els.altitudeOut.textContent = `${state.altitudeKm} km`;
    els.inclinationOut.textContent = `${state.inclinationDeg} deg`;
    issue();
  });

  const player = new RampPlayer({
    onFrame: (frame, index) => {
      els.rampScrub.max = String(player.frameCount - 1);
      els.rampScrub.value = String(index);
      render(frame.map);
      els.degreeOut.textContent = `n = ${frame.degree}`;
    },
    onInterrupted: (lastDegree) => {
      els.banner.textContent = `ramp stream interrupted after degree ${lastDegree}`;
      els.banner.hidden = false;
    },
  });
  els.rampStart.addEventListener("click", () => {
    const degrees = Array.from({ length: state.nMax - 1 }, (_, k) => k + 2);
    const body = { ...requestBody(state), ramp_degrees: degrees };
    void player.consume(client.streamRamp(body));
  });
  els.rampScrub.addEventListener("input", () => {
    player.pause();
    player.scrub(Number(els.rampScrub.value));
  });

  void client.getFields().then((fields: FieldSummary[]) => {
    els.fieldSelect.innerHTML = "";
    for (const f of fields) {
      const opt = document.createElement("option");
      opt.value = f.id;
      opt.textContent = `${f.name} (n_max ${f.n_max})`;
      els.fieldSelect.append(opt);
    }
    if (fields.length > 0) {
      state = { ...state, selectedField: fields[0].id };
      els.degree.max = String(fields[0].n_max);
      rebuildToggles();
      issue();
    }
  });
}
