/** Workbench bootstrap: fetch meta + grid, build the linked views. */

import { ApiClient } from "./api";
import { DetectorPanel } from "./detectors";
import { FlaggedTable } from "./flagged_table";
import { HeatmapView } from "./heatmap";
import { Inspector } from "./inspector";
import { ScatterView } from "./scatter";
import { WorkbenchState } from "./state";
import { toast } from "./util";

async function boot(): Promise<void> {
  const api = new ApiClient();
  const state = new WorkbenchState();

  const meta = await api.meta();
  const grid = await api.grid();
  document.getElementById("meta")!.textContent =
    `${meta.n} points · k ≤ ${meta.k_max} · ${meta.bins} bins · ` +
    `metrics ${meta.metrics.input}/${meta.metrics.output} · γ ${meta.gamma}`;

  const heatmapHost = document.getElementById("heatmap")!;
  new HeatmapView(heatmapHost, grid, (region) => {
    void (async () => {
      if (!region) {
        state.setSelection(null);
        return;
      }
      const result = await api.select(region);
      if (result === null) return;   // superseded by a newer brush
      state.applySelectResult(region, result);
      if (result.ids.length === 0) toast("no points in the brushed region");
      else if (result.truncated) toast(`selection truncated to ${result.ids.length} ids`);
    })().catch((err) => toast(String(err), "error"));
  });

  const linkedHost = document.getElementById("linked")!;
  if (meta.has_embedding) {
    const coords: [number, number][] = [];
    // the embedding travels per point; fetch in chunks to stay gentle
    for (let id = 0; id < meta.n; id++) coords.push([0, 0]);
    const batch = 256;
    for (let start = 0; start < meta.n; start += batch) {
      const ids = Array.from({ length: Math.min(batch, meta.n - start) }, (_, i) => start + i);
      const details = await Promise.all(ids.map((id) => api.point(id)));
      for (const d of details) if (d.embedding_xy) coords[d.id] = d.embedding_xy;
    }
    new ScatterView(linkedHost, coords, state);
  } else {
    new FlaggedTable(linkedHost, api, state);
  }

  new Inspector(document.getElementById("inspector")!, api, state);
  const panel = new DetectorPanel(document.getElementById("detectors")!, api, state);
  void panel.run();   // defaults: reproduces the service-side report exactly
}

boot().catch((err) => {
  toast(`workbench failed to start: ${err}`, "error");
  console.error(err);
});
