/**
 * Embedding scatter with selection/overlay highlighting.
 *
 * Base points are light gray; brush-selected points are drawn black and
 * larger on top (and detector overlays in red), mirroring the marked-point
 * style of the batch renderings. Clicking near a point opens it in the
 * inspector. The highlighted set is exactly the id list handed over by the
 * state hub; no filtering happens here.
 */

import type { WorkbenchState } from "./state";

export class ScatterView {
  private readonly canvas: HTMLCanvasElement;
  private readonly xy: Float64Array;     // normalized to canvas coords
  private selection: number[] = [];
  private overlay: number[] = [];

  constructor(
    host: HTMLElement,
    coords: [number, number][],
    private readonly state: WorkbenchState,
    cssWidth = 460,
    cssHeight = 360,
  ) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = cssWidth;
    this.canvas.height = cssHeight;
    this.canvas.className = "scatter";
    host.appendChild(this.canvas);

    const xs = coords.map((c) => c[0]);
    const ys = coords.map((c) => c[1]);
    const xMin = Math.min(...xs), xMax = Math.max(...xs);
    const yMin = Math.min(...ys), yMax = Math.max(...ys);
    const pad = 12;
    const sx = (cssWidth - 2 * pad) / (xMax - xMin || 1);
    const sy = (cssHeight - 2 * pad) / (yMax - yMin || 1);
    this.xy = new Float64Array(coords.length * 2);
    coords.forEach(([x, y], i) => {
      this.xy[2 * i] = pad + (x - xMin) * sx;
      this.xy[2 * i + 1] = cssHeight - pad - (y - yMin) * sy;
    });

    state.hub.on("selection", (sel) => {
      this.selection = sel ? sel.ids : [];
      this.paint();
    });
    state.hub.on("overlay", (ov) => {
      this.overlay = ov ? ov.ids : [];
      this.paint();
    });
    this.canvas.addEventListener("click", this.handleClick);
    this.paint();
  }

  /** ids currently drawn as highlighted (for tests and debugging) */
  highlighted(): number[] {
    return [...new Set([...this.selection, ...this.overlay])].sort((a, b) => a - b);
  }

  private handleClick = (ev: MouseEvent): void => {
    const r = this.canvas.getBoundingClientRect();
    const x = ev.clientX - r.left;
    const y = ev.clientY - r.top;
    let best = -1;
    let bestDist = 10 * 10;   // 10 px pick radius
    for (let i = 0; i < this.xy.length / 2; i++) {
      const dx = this.xy[2 * i] - x;
      const dy = this.xy[2 * i + 1] - y;
      const d = dx * dx + dy * dy;
      if (d < bestDist) {
        bestDist = d;
        best = i;
      }
    }
    if (best >= 0) this.state.inspect(best);
  };

  private dot(ctx: CanvasRenderingContext2D, i: number, radius: number, fill: string): void {
    ctx.beginPath();
    ctx.arc(this.xy[2 * i], this.xy[2 * i + 1], radius, 0, Math.PI * 2);
    ctx.fillStyle = fill;
    ctx.fill();
  }

  private paint(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    const n = this.xy.length / 2;
    for (let i = 0; i < n; i++) this.dot(ctx, i, 2.2, "#c8c8c8");
    for (const i of this.overlay) this.dot(ctx, i, 3.6, "#d62728");
    for (const i of this.selection) this.dot(ctx, i, 3.6, "#111111");
  }
}
