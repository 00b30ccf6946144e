/**
 * Sortable table of the active id set; stands in for the scatter when the
 * dataset ships no 2-D embedding, so the workbench stays fully usable.
 */

import type { ApiClient } from "./api";
import type { WorkbenchState } from "./state";

interface Row {
  id: number;
  label: string;
  source: string;
}

export class FlaggedTable {
  private readonly table: HTMLTableElement;
  private readonly body: HTMLTableSectionElement;
  private rows: Row[] = [];
  private sortKey: keyof Row = "id";
  private sortDir = 1;

  constructor(
    host: HTMLElement,
    private readonly api: ApiClient,
    private readonly state: WorkbenchState,
  ) {
    this.table = document.createElement("table");
    this.table.className = "flagged-table";
    const head = this.table.createTHead();
    const tr = head.insertRow();
    (["id", "label", "source"] as (keyof Row)[]).forEach((key) => {
      const th = document.createElement("th");
      th.textContent = key;
      th.addEventListener("click", () => this.sortBy(key));
      tr.appendChild(th);
    });
    this.body = this.table.createTBody();
    host.appendChild(this.table);

    state.hub.on("selection", (sel) => {
      void this.showIds(sel ? sel.ids : [], "brush");
    });
    state.hub.on("overlay", (ov) => {
      void this.showIds(ov ? ov.ids : [], ov ? ov.detector : "detector");
    });
  }

  private async showIds(ids: number[], source: string): Promise<void> {
    const shown = ids.slice(0, 500);   // keep the DOM bounded
    const labels = await Promise.all(
      shown.map(async (id) => {
        try {
          const detail = await this.api.point(id);
          return detail.label === null ? "" : String(detail.label);
        } catch {
          return "?";
        }
      }),
    );
    this.rows = shown.map((id, i) => ({ id, label: labels[i], source }));
    this.render();
  }

  sortBy(key: keyof Row): void {
    this.sortDir = this.sortKey === key ? -this.sortDir : 1;
    this.sortKey = key;
    this.render();
  }

  /** current visual order (for tests) */
  order(): number[] {
    return this.sorted().map((r) => r.id);
  }

  private sorted(): Row[] {
    const key = this.sortKey;
    return [...this.rows].sort((a, b) => {
      const va = a[key];
      const vb = b[key];
      const cmp = typeof va === "number" && typeof vb === "number"
        ? va - vb
        : String(va).localeCompare(String(vb));
      return cmp * this.sortDir;
    });
  }

  private render(): void {
    this.body.replaceChildren();
    for (const row of this.sorted()) {
      const tr = this.body.insertRow();
      tr.insertCell().textContent = String(row.id);
      tr.insertCell().textContent = row.label;
      tr.insertCell().textContent = row.source;
      tr.addEventListener("click", () => this.state.inspect(row.id));
    }
  }
}
