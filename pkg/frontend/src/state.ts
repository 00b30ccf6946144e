/** Shared workbench state: one active brush selection, one detector overlay. */

import type { Region, Selection } from "./api";
import { Hub } from "./util";

export interface BrushSelection {
  region: Region;
  ids: number[];
  truncated: boolean;
}

export interface WorkbenchEvents extends Record<string, unknown> {
  /** brush selection changed (null = cleared) */
  selection: BrushSelection | null;
  /** detector overlay changed (null = cleared) */
  overlay: { detector: string; ids: number[] } | null;
  /** a point should be shown in the inspector */
  inspect: number;
}

export class WorkbenchState {
  readonly hub = new Hub<WorkbenchEvents>();
  selection: BrushSelection | null = null;
  overlay: { detector: string; ids: number[] } | null = null;

  setSelection(sel: BrushSelection | null): void {
    this.selection = sel;
    this.hub.emit("selection", sel);
  }

  applySelectResult(region: Region, result: Selection): void {
    this.setSelection({ region, ids: result.ids, truncated: result.truncated });
  }

  setOverlay(overlay: { detector: string; ids: number[] } | null): void {
    this.overlay = overlay;
    this.hub.emit("overlay", overlay);
  }

  inspect(id: number): void {
    this.hub.emit("inspect", id);
  }
}
