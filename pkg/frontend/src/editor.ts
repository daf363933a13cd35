// Zone editor: drag on empty space creates a rectangle, dragging a corner
// handle resizes, dragging the interior moves. Changes live on a draft copy
// until commit; commit is blocked while any rectangle is degenerate.

import { ZoneRecord } from "./protocol.js";

const HANDLE_R = 7;
const MIN_SIZE = 4;

type DragMode =
  | { op: "create"; id: string; x0: number; y0: number }
  | { op: "move"; id: string; dx: number; dy: number }
  | { op: "resize"; id: string; corner: number }
  | null;

export class ZoneEditor {
  active = false;
  draft: ZoneRecord[] = [];
  selectedId: string | null = null;
  nextSound = "snare";
  nextColor = "#d95454";

  private drag: DragMode = null;
  private serverZones: ZoneRecord[] = [];
  private counter = 0;

  /** Track server state so enter() can fork a fresh draft. */
  syncFromServer(zones: ZoneRecord[]): void {
    this.serverZones = zones;
    if (!this.active) this.draft = [];
  }

  enter(): void {
    this.active = true;
    this.draft = this.serverZones.map((z) => ({ ...z }));
    this.selectedId = null;
  }

  /** Discard the draft. */
  cancel(): void {
    this.active = false;
    this.draft = [];
    this.drag = null;
    this.selectedId = null;
  }

  /** The zones to send, or null while any rectangle is degenerate. */
  commitPayload(): ZoneRecord[] | null {
    for (const z of this.draft) {
      if (z.x_max - z.x_min < MIN_SIZE || z.y_max - z.y_min < MIN_SIZE) return null;
    }
    return this.draft.map((z) => ({ ...z }));
  }

  deleteSelected(): void {
    if (this.selectedId !== null) {
      this.draft = this.draft.filter((z) => z.zone_id !== this.selectedId);
      this.selectedId = null;
    }
  }

  pointerDown(x: number, y: number): void {
    if (!this.active) return;
    const sel = this.selectedId !== null ? this.draft.find((z) => z.zone_id === this.selectedId) : undefined;
    if (sel) {
      const corner = hitCorner(sel, x, y);
      if (corner >= 0) {
        this.drag = { op: "resize", id: sel.zone_id, corner };
        return;
      }
    }
    const hit = [...this.draft].reverse().find((z) => contains(z, x, y));
    if (hit) {
      this.selectedId = hit.zone_id;
      this.drag = { op: "move", id: hit.zone_id, dx: x - hit.x_min, dy: y - hit.y_min };
      return;
    }
    const id = this.freshId();
    this.draft.push({
      zone_id: id,
      x_min: x,
      y_min: y,
      x_max: x,
      y_max: y,
      sound_id: this.nextSound,
      color: this.nextColor,
    });
    this.selectedId = id;
    this.drag = { op: "create", id, x0: x, y0: y };
  }

  pointerMove(x: number, y: number): void {
    if (!this.active || !this.drag) return;
    const z = this.draft.find((d) => d.zone_id === this.drag!.id);
    if (!z) return;
    switch (this.drag.op) {
      case "create": {
        z.x_min = Math.min(this.drag.x0, x);
        z.x_max = Math.max(this.drag.x0, x);
        z.y_min = Math.min(this.drag.y0, y);
        z.y_max = Math.max(this.drag.y0, y);
        break;
      }
      case "move": {
        const w = z.x_max - z.x_min;
        const h = z.y_max - z.y_min;
        z.x_min = x - this.drag.dx;
        z.y_min = y - this.drag.dy;
        z.x_max = z.x_min + w;
        z.y_max = z.y_min + h;
        break;
      }
      case "resize": {
        const c = this.drag.corner;
        if (c === 0 || c === 2) z.x_min = x;
        else z.x_max = x;
        if (c === 0 || c === 1) z.y_min = y;
        else z.y_max = y;
        if (z.x_min > z.x_max) {
          [z.x_min, z.x_max] = [z.x_max, z.x_min];
          this.drag.corner = flipH(c);
        }
        if (z.y_min > z.y_max) {
          [z.y_min, z.y_max] = [z.y_max, z.y_min];
          this.drag.corner = flipV(this.drag.corner);
        }
        break;
      }
    }
  }

  pointerUp(): void {
    this.drag = null;
  }

  setSelectedSound(soundId: string): void {
    const z = this.draft.find((d) => d.zone_id === this.selectedId);
    if (z) z.sound_id = soundId;
  }

  setSelectedColor(color: string): void {
    const z = this.draft.find((d) => d.zone_id === this.selectedId);
    if (z) z.color = color;
  }

  private freshId(): string {
    let id: string;
    do {
      id = `zone${++this.counter}`;
    } while (this.draft.some((z) => z.zone_id === id) || this.serverZones.some((z) => z.zone_id === id));
    return id;
  }
}

function contains(z: ZoneRecord, x: number, y: number): boolean {
  return z.x_min <= x && x < z.x_max && z.y_min <= y && y < z.y_max;
}

// corners indexed 0:TL 1:TR 2:BL 3:BR
function hitCorner(z: ZoneRecord, x: number, y: number): number {
  const pts: [number, number][] = [
    [z.x_min, z.y_min],
    [z.x_max, z.y_min],
    [z.x_min, z.y_max],
    [z.x_max, z.y_max],
  ];
  for (let i = 0; i < 4; i++) {
    if (Math.abs(x - pts[i][0]) <= HANDLE_R && Math.abs(y - pts[i][1]) <= HANDLE_R) return i;
  }
  return -1;
}

function flipH(c: number): number {
  return [1, 0, 3, 2][c];
}

function flipV(c: number): number {
  return [2, 3, 0, 1][c];
}
