// Wire protocol types and codec (see ../FORMATS.md). One JSON object per
// WebSocket text message: {kind, seq, payload}.

export interface ZoneRecord {
  zone_id: string;
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
  sound_id: string;
  color: string;
}

export interface StickSnapshot {
  initialized: boolean;
  x: number | null;
  y: number | null;
  vx: number | null;
  vy: number | null;
  coasting: boolean;
  measured: boolean;
}

export interface HitEventPayload {
  t: number;
  stick: "left" | "right";
  x: number;
  y: number;
  strike_speed: number;
  volume: number;
  zones: string[];
}

export interface FrameSnapshotPayload {
  frame: number;
  t: number;
  sticks: { left: StickSnapshot; right: StickSnapshot };
  zone_ids: string[];
  hits: HitEventPayload[];
}

export interface HelloPayload {
  format_version: number;
  fps: number;
  width: number;
  height: number;
}

export type ServerMessage =
  | { kind: "hello"; seq: number; payload: HelloPayload }
  | { kind: "zones"; seq: number; payload: { zones: ZoneRecord[] } }
  | { kind: "config"; seq: number; payload: Record<string, unknown> }
  | { kind: "frame_snapshot"; seq: number; payload: FrameSnapshotPayload }
  | { kind: "hit_event"; seq: number; payload: HitEventPayload }
  | { kind: "error"; seq: number; payload: { message: string } };

const SERVER_KINDS = new Set([
  "hello",
  "zones",
  "config",
  "frame_snapshot",
  "hit_event",
  "error",
]);

export class ProtocolError extends Error {}

export function decodeServerMessage(raw: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch (e) {
    throw new ProtocolError(`not JSON: ${e}`);
  }
  if (typeof obj !== "object" || obj === null) {
    throw new ProtocolError("message is not an object");
  }
  const msg = obj as { kind?: unknown; seq?: unknown; payload?: unknown };
  if (typeof msg.kind !== "string" || !SERVER_KINDS.has(msg.kind)) {
    throw new ProtocolError(`unknown kind: ${String(msg.kind)}`);
  }
  if (typeof msg.seq !== "number") {
    throw new ProtocolError("missing seq");
  }
  if (typeof msg.payload !== "object" || msg.payload === null) {
    throw new ProtocolError("missing payload");
  }
  return msg as ServerMessage;
}

export type SourceSpec =
  | { type: "trace"; path: string }
  | { type: "synthetic"; bpm: number; dropout?: number; noise_std?: number; clutter?: number; seed?: number }
  | { type: "live" };

export type ClientMessage =
  | { kind: "zones"; payload: { zones: ZoneRecord[] } }
  | { kind: "control"; payload: { action: "source"; source: SourceSpec } }
  | { kind: "control"; payload: { action: "play" | "pause" } }
  | { kind: "control"; payload: { action: "seek"; frame: number } }
  | { kind: "detector_frame"; payload: { frame: number; t: number; candidates: number[][] } };

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export function zonesUpdate(zones: ZoneRecord[]): ClientMessage {
  return { kind: "zones", payload: { zones } };
}

export function selectSource(source: SourceSpec): ClientMessage {
  return { kind: "control", payload: { action: "source", source } };
}

export function play(): ClientMessage {
  return { kind: "control", payload: { action: "play" } };
}

export function pause(): ClientMessage {
  return { kind: "control", payload: { action: "pause" } };
}

export function seek(frame: number): ClientMessage {
  return { kind: "control", payload: { action: "seek", frame } };
}
