// UI session state: everything the renderer and audio need, rebuilt purely
// from the wire stream (refresh-safe apart from an uncommitted zone draft).

import {
  FrameSnapshotPayload,
  HelloPayload,
  HitEventPayload,
  ServerMessage,
  ZoneRecord,
} from "./protocol.js";

export interface Flash {
  x: number;
  y: number;
  t: number; // wall-clock ms when the flash started
  volume: number;
  composite: boolean;
}

export interface TrailPoint {
  x: number;
  y: number;
}

const TRAIL_LEN = 18;
export const FLASH_TTL_MS = 250;

export type ConnectionState = "connecting" | "open" | "closed";

export class SessionState {
  connection: ConnectionState = "connecting";
  hello: HelloPayload | null = null;
  zones: ZoneRecord[] = [];
  snapshot: FrameSnapshotPayload | null = null;
  flashes: Flash[] = [];
  trails: { left: TrailPoint[]; right: TrailPoint[] } = { left: [], right: [] };
  lastError: string | null = null;
  lastSeq = 0;

  // instrumentation: exactly one visual flash per received hit event
  hitCount = 0;
  flashCount = 0;

  onHit: ((e: HitEventPayload) => void) | null = null;

  private now: () => number;

  constructor(now: () => number = () => Date.now()) {
    this.now = now;
  }

  apply(msg: ServerMessage): void {
    if (msg.seq <= this.lastSeq) {
      // the server promises strictly increasing seq per direction
      this.lastError = `seq went backwards: ${msg.seq} after ${this.lastSeq}`;
    }
    this.lastSeq = msg.seq;
    switch (msg.kind) {
      case "hello":
        this.hello = msg.payload;
        break;
      case "zones":
        this.zones = msg.payload.zones;
        break;
      case "config":
        break;
      case "frame_snapshot":
        this.snapshot = msg.payload;
        this.pushTrail("left", msg.payload);
        this.pushTrail("right", msg.payload);
        break;
      case "hit_event":
        this.hitCount += 1;
        this.addFlash(msg.payload);
        if (this.onHit) this.onHit(msg.payload);
        break;
      case "error":
        this.lastError = msg.payload.message;
        break;
    }
  }

  private pushTrail(side: "left" | "right", snap: FrameSnapshotPayload): void {
    const stick = snap.sticks[side];
    const trail = this.trails[side];
    if (stick.initialized && stick.x !== null && stick.y !== null) {
      trail.push({ x: stick.x, y: stick.y });
      if (trail.length > TRAIL_LEN) trail.shift();
    } else {
      trail.length = 0;
    }
  }

  private addFlash(e: HitEventPayload): void {
    this.flashCount += 1;
    this.flashes.push({
      x: e.x,
      y: e.y,
      t: this.now(),
      volume: e.volume,
      composite: e.zones.length >= 2,
    });
  }

  /** Drop expired flashes; call once per render frame. */
  prune(): void {
    const cutoff = this.now() - FLASH_TTL_MS;
    this.flashes = this.flashes.filter((f) => f.t >= cutoff);
  }

  zoneById(id: string): ZoneRecord | undefined {
    return this.zones.find((z) => z.zone_id === id);
  }
}
