// Scene building and canvas painting. buildScene is pure (testable without
// a DOM); paint walks the primitive list onto a 2d context.

import { SessionState } from "./state.js";
import { ZoneRecord } from "./protocol.js";
import { ZoneEditor } from "./editor.js";

export type Primitive =
  | { type: "zone"; zone: ZoneRecord; editing: boolean; selected: boolean }
  | { type: "trail"; side: "left" | "right"; points: { x: number; y: number }[] }
  | { type: "tip"; side: "left" | "right"; x: number; y: number; coasting: boolean }
  | { type: "flash"; x: number; y: number; age: number; volume: number; composite: boolean }
  | { type: "banner"; text: string };

export const TIP_COLORS = { left: "#ff6f61", right: "#61c9ff" };
export const TIP_RADIUS = 9;

export function buildScene(state: SessionState, editor: ZoneEditor, nowMs: number): Primitive[] {
  const prims: Primitive[] = [];
  const zones = editor.active ? editor.draft : state.zones;
  for (const zone of zones) {
    prims.push({
      type: "zone",
      zone,
      editing: editor.active,
      selected: editor.active && editor.selectedId === zone.zone_id,
    });
  }
  for (const side of ["left", "right"] as const) {
    const trail = state.trails[side];
    if (trail.length > 1) {
      prims.push({ type: "trail", side, points: [...trail] });
    }
  }
  const snap = state.snapshot;
  if (snap) {
    for (const side of ["left", "right"] as const) {
      const stick = snap.sticks[side];
      if (stick.initialized && stick.x !== null && stick.y !== null) {
        prims.push({
          type: "tip",
          side,
          x: stick.x,
          y: stick.y,
          coasting: stick.coasting,
        });
      }
    }
  }
  for (const f of state.flashes) {
    prims.push({
      type: "flash",
      x: f.x,
      y: f.y,
      age: nowMs - f.t,
      volume: f.volume,
      composite: f.composite,
    });
  }
  if (state.connection !== "open") {
    prims.push({ type: "banner", text: state.connection === "connecting" ? "connecting..." : "disconnected - retrying" });
  }
  return prims;
}

export function paint(
  ctx: CanvasRenderingContext2D,
  prims: Primitive[],
  width: number,
  height: number,
): void {
  ctx.fillStyle = "#14141e";
  ctx.fillRect(0, 0, width, height);

  for (const p of prims) {
    switch (p.type) {
      case "zone": {
        const { x_min, y_min, x_max, y_max, color } = p.zone;
        ctx.globalAlpha = 0.28;
        ctx.fillStyle = color;
        ctx.fillRect(x_min, y_min, x_max - x_min, y_max - y_min);
        ctx.globalAlpha = 1.0;
        ctx.strokeStyle = p.selected ? "#ffffff" : color;
        ctx.lineWidth = p.selected ? 2.5 : 1.5;
        ctx.strokeRect(x_min, y_min, x_max - x_min, y_max - y_min);
        ctx.fillStyle = "#e8e8f0";
        ctx.font = "12px system-ui, sans-serif";
        ctx.fillText(p.zone.zone_id, x_min + 5, y_min + 15);
        if (p.editing && p.selected) {
          ctx.fillStyle = "#ffffff";
          for (const [hx, hy] of corners(p.zone)) {
            ctx.fillRect(hx - 4, hy - 4, 8, 8);
          }
        }
        break;
      }
      case "trail": {
        ctx.strokeStyle = TIP_COLORS[p.side];
        ctx.lineWidth = 2;
        ctx.globalAlpha = 0.35;
        ctx.beginPath();
        ctx.moveTo(p.points[0].x, p.points[0].y);
        for (const pt of p.points.slice(1)) ctx.lineTo(pt.x, pt.y);
        ctx.stroke();
        ctx.globalAlpha = 1.0;
        break;
      }
      case "tip": {
        ctx.beginPath();
        ctx.arc(p.x, p.y, TIP_RADIUS, 0, Math.PI * 2);
        if (p.coasting) {
          // hollow marker: the filter is estimating without a detection
          ctx.strokeStyle = TIP_COLORS[p.side];
          ctx.lineWidth = 2.5;
          ctx.stroke();
        } else {
          ctx.fillStyle = TIP_COLORS[p.side];
          ctx.fill();
        }
        break;
      }
      case "flash": {
        const life = Math.max(0, 1 - p.age / 250);
        const r = 14 + (1 - life) * 30 * (0.5 + p.volume);
        ctx.globalAlpha = 0.7 * life;
        ctx.strokeStyle = p.composite ? "#ffd24a" : "#ffffff";
        ctx.lineWidth = 3;
        ctx.beginPath();
        ctx.arc(p.x, p.y, r, 0, Math.PI * 2);
        ctx.stroke();
        ctx.globalAlpha = 1.0;
        break;
      }
      case "banner": {
        ctx.fillStyle = "rgba(0,0,0,0.65)";
        ctx.fillRect(0, 0, width, 28);
        ctx.fillStyle = "#ffb0b0";
        ctx.font = "14px system-ui, sans-serif";
        ctx.fillText(p.text, 10, 19);
        break;
      }
    }
  }
}

export function corners(z: ZoneRecord): [number, number][] {
  return [
    [z.x_min, z.y_min],
    [z.x_max, z.y_min],
    [z.x_min, z.y_max],
    [z.x_max, z.y_max],
  ];
}
