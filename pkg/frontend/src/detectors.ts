/**
 * Detector panel: pick a detector, adjust thresholds live, see the flagged
 * set as an overlay. Every report comes from the service; with no slider
 * touched the request carries no overrides, so the panel reproduces the
 * service-side default report exactly. Slider storms are rate-limited to
 * at most four requests per second and superseded responses are dropped.
 */

import { ApiClient, ApiError, DetectReport } from "./api";
import type { WorkbenchState } from "./state";
import { rateLimit, toast } from "./util";

export const REQUESTS_PER_SECOND = 4;

interface Knob {
  param: string;
  label: string;
  min: number;
  max: number;
  step: number;
  initial: number;
}

const KNOBS: Record<string, Knob[]> = {
  outliers: [
    { param: "outlier_k1_max", label: "max value at k=1", min: 0.05, max: 2.5, step: 0.05, initial: 0.5 },
    { param: "outlier_spike_min", label: "min spike", min: 1, max: 100, step: 1, initial: 10 },
    { param: "rise_k_lo", label: "rise k from", min: 1, max: 100, step: 1, initial: 5 },
    { param: "rise_k_hi", label: "rise k to", min: 2, max: 200, step: 1, initial: 25 },
  ],
  homogeneous: [
    { param: "homog_v_lo", label: "band low", min: 0, max: 2, step: 0.05, initial: 1 },
    { param: "homog_v_hi", label: "band high", min: 0.5, max: 4, step: 0.05, initial: 2 },
    { param: "homog_k_lo", label: "k from", min: 1, max: 500, step: 1, initial: 10 },
    { param: "homog_k_hi", label: "k to", min: 2, max: 3000, step: 1, initial: 300 },
  ],
  ood: [
    { param: "ood_char_percentile", label: "characteristic percentile", min: 50, max: 100, step: 1, initial: 90 },
    { param: "homog_k_lo", label: "k from", min: 1, max: 500, step: 1, initial: 10 },
    { param: "homog_k_hi", label: "k to", min: 2, max: 3000, step: 1, initial: 300 },
  ],
  "simple-subsets": [
    { param: "simple_low_max", label: "low threshold", min: 0.05, max: 1.5, step: 0.05, initial: 0.3 },
    { param: "simple_persistence", label: "persistence (k run)", min: 2, max: 200, step: 1, initial: 20 },
  ],
};

export class DetectorPanel {
  private readonly root: HTMLElement;
  private readonly status: HTMLElement;
  private detector = "outliers";
  private overrides: Record<string, number> = {};
  private generation = 0;
  private abort: AbortController | null = null;
  private readonly schedule: () => void;
  /** resolves after each applied report; tests await it */
  lastRun: Promise<DetectReport | null> = Promise.resolve(null);

  constructor(
    host: HTMLElement,
    private readonly api: ApiClient,
    private readonly state: WorkbenchState,
    detectors: string[] = Object.keys(KNOBS),
  ) {
    this.root = document.createElement("div");
    this.root.className = "detector-panel";
    host.appendChild(this.root);

    const picker = document.createElement("select");
    for (const name of detectors) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      picker.appendChild(opt);
    }
    picker.addEventListener("change", () => {
      this.detector = picker.value;
      this.overrides = {};
      this.renderKnobs();
      this.run();
    });
    this.root.appendChild(picker);

    this.status = document.createElement("p");
    this.status.className = "hint detector-status";
    const knobHost = document.createElement("div");
    knobHost.className = "knobs";
    this.root.append(knobHost, this.status);
    this.knobHost = knobHost;

    this.schedule = rateLimit(() => this.run(), 1000 / REQUESTS_PER_SECOND);
    this.renderKnobs();
  }

  private knobHost!: HTMLElement;

  private renderKnobs(): void {
    this.knobHost.replaceChildren();
    for (const knob of KNOBS[this.detector] ?? []) {
      const row = document.createElement("label");
      row.className = "knob";
      const text = document.createElement("span");
      text.textContent = `${knob.label}: ${knob.initial}`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = String(knob.min);
      slider.max = String(knob.max);
      slider.step = String(knob.step);
      slider.value = String(knob.initial);
      slider.dataset.param = knob.param;
      slider.addEventListener("input", () => {
        const value = Number(slider.value);
        text.textContent = `${knob.label}: ${value}`;
        this.setOverride(knob.param, value);
      });
      row.append(text, slider);
      this.knobHost.appendChild(row);
    }
  }

  /** slider path: rate-limited to REQUESTS_PER_SECOND */
  setOverride(param: string, value: number): void {
    this.overrides[param] = value;
    this.schedule();
  }

  /** immediate run with the current overrides (initial load, picker change) */
  run(): Promise<DetectReport | null> {
    const generation = ++this.generation;
    this.abort?.abort();
    this.abort = new AbortController();
    this.lastRun = this.api
      .detect(this.detector, this.overrides, this.abort.signal)
      .then((report) => {
        if (generation !== this.generation) return null;
        this.state.setOverlay({ detector: this.detector, ids: report.flagged.map((f) => f.id) });
        this.status.textContent =
          `${this.detector}: ${report.flagged.length} flagged` +
          (Object.keys(this.overrides).length ? " (custom thresholds)" : " (defaults)");
        return report;
      })
      .catch((err) => {
        if ((err as Error).name === "AbortError") return null;
        toast(err instanceof ApiError ? err.message : String(err), "error");
        return null;
      });
    return this.lastRun;
  }
}
