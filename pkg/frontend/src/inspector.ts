/**
 * Point detail panel: label, image thumbnail or raw input values, and the
 * local-indicator trajectory as a sparkline.
 */

import { ApiClient, ApiError, PointDetail } from "./api";
import type { WorkbenchState } from "./state";
import { toast } from "./util";

export class Inspector {
  private readonly root: HTMLElement;

  constructor(host: HTMLElement, private readonly api: ApiClient, state: WorkbenchState) {
    this.root = document.createElement("div");
    this.root.className = "inspector";
    this.root.innerHTML = `<p class="hint">click a point to inspect it</p>`;
    host.appendChild(this.root);
    state.hub.on("inspect", (id) => void this.show(id));
  }

  async show(id: number): Promise<void> {
    let detail: PointDetail;
    try {
      detail = await this.api.point(id);
    } catch (err) {
      toast(err instanceof ApiError ? `point ${id}: ${err.message}` : String(err), "error");
      return;
    }
    this.root.replaceChildren();

    const title = document.createElement("h3");
    title.textContent = `point ${detail.id}` +
      (detail.label === null ? "" : ` — label ${detail.label}`);
    this.root.appendChild(title);

    if (detail.input_preview) {
      const img = document.createElement("img");
      img.className = "thumb";
      img.src = `data:image/png;base64,${detail.input_preview}`;
      img.alt = `input of point ${detail.id}`;
      this.root.appendChild(img);
    } else if (detail.input_values) {
      this.root.appendChild(this.valueTable("inputs", detail.input_values));
    }
    this.root.appendChild(this.valueTable("outputs", detail.output_values));

    const spark = document.createElement("canvas");
    spark.width = 300;
    spark.height = 60;
    spark.className = "sparkline";
    this.root.appendChild(spark);
    this.drawSparkline(spark, detail.trajectory);

    const ks = detail.trajectory.map(([k]) => k);
    const caption = document.createElement("p");
    caption.className = "hint";
    caption.textContent = ks.length
      ? `trajectory over k ∈ [${ks[0]}, ${ks[ks.length - 1]}] (${ks.length} counted entries)`
      : "every neighborhood of this point duplicates an earlier one";
    this.root.appendChild(caption);
  }

  private valueTable(name: string, values: number[]): HTMLElement {
    const wrap = document.createElement("div");
    const label = document.createElement("span");
    label.className = "value-label";
    label.textContent = name;
    const code = document.createElement("code");
    const shown = values.slice(0, 16).map((v) => Number(v.toPrecision(5))).join(", ");
    code.textContent = values.length > 16 ? `${shown}, …` : shown;
    wrap.append(label, code);
    return wrap;
  }

  private drawSparkline(canvas: HTMLCanvasElement, trajectory: [number, number][]): void {
    const ctx = canvas.getContext("2d");
    if (!ctx || trajectory.length === 0) return;
    const vals = trajectory.map(([, v]) => v);
    const ks = trajectory.map(([k]) => k);
    const vMax = Math.max(...vals, 1e-12);
    const kMin = ks[0];
    const kMax = ks[ks.length - 1];
    const w = canvas.width;
    const h = canvas.height;
    ctx.clearRect(0, 0, w, h);
    ctx.beginPath();
    trajectory.forEach(([k, v], i) => {
      const x = kMax === kMin ? w / 2 : ((k - kMin) / (kMax - kMin)) * (w - 4) + 2;
      const y = h - 2 - (v / vMax) * (h - 4);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.strokeStyle = "#1f77b4";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
}
