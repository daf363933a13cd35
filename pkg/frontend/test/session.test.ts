// Replays a session captured from the real server (see
// scripts/capture_fixture.py): handshake, a committed zone edit, then a
// 6-second 80 BPM stream. Drives the full client stack below the DOM and
// verifies the acceptance behaviors end to end against genuine wire bytes.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { DrumSampler } from "../src/audio.js";
import { decodeServerMessage, HitEventPayload, zonesUpdate } from "../src/protocol.js";
import { SessionState } from "../src/state.js";
import { FakeAudioContext } from "./helpers.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "session_80bpm.json"), "utf-8"),
) as { truth_count: number; sent: string[]; messages: string[] };

function replay() {
  const state = new SessionState(() => 0);
  const ctx = new FakeAudioContext();
  const warnings: string[] = [];
  const sampler = new DrumSampler(
    ctx,
    async () => {
      throw new Error("offline");
    },
    (m) => warnings.push(m),
  );
  let playHitCalls = 0;
  const hits: HitEventPayload[] = [];
  state.onHit = (e) => {
    playHitCalls += 1;
    hits.push(e);
    sampler.playHit(e, (zoneId) => state.zoneById(zoneId)?.sound_id);
  };
  const kinds: string[] = [];
  for (const raw of fixture.messages) {
    const msg = decodeServerMessage(raw);
    kinds.push(msg.kind);
    if (msg.kind === "zones") sampler.ensureSounds(msg.payload.zones);
    if (msg.kind === "frame_snapshot") sampler.syncClock(msg.payload.t);
    state.apply(msg);
  }
  return { state, ctx, sampler, playHitCalls, hits, kinds, warnings };
}

describe("captured 80 BPM session", () => {
  it("every received message decodes (schema compatibility)", () => {
    expect(fixture.messages.length).toBeGreaterThan(100);
    for (const raw of fixture.messages) decodeServerMessage(raw);
  });

  it("handshake precedes any snapshot: hello, zones, config", () => {
    const { kinds } = replay();
    expect(kinds[0]).toBe("hello");
    expect(kinds[1]).toBe("zones");
    expect(kinds[2]).toBe("config");
    expect(kinds.indexOf("frame_snapshot")).toBeGreaterThan(2);
  });

  it("seq is strictly increasing across the whole session", () => {
    const { state } = replay();
    expect(state.lastError).toBeNull();
  });

  it("renders moving tips", () => {
    const state = new SessionState(() => 0);
    const ys: number[] = [];
    for (const raw of fixture.messages) {
      const msg = decodeServerMessage(raw);
      state.apply(msg);
      const left = state.snapshot?.sticks.left;
      if (msg.kind === "frame_snapshot" && left?.initialized && left.y !== null) {
        ys.push(left.y);
      }
    }
    expect(ys.length).toBeGreaterThan(300);
    expect(Math.max(...ys) - Math.min(...ys)).toBeGreaterThan(100); // strokes visible
  });

  it("every emitted hit flashes once and triggers audio once", () => {
    const { state, playHitCalls } = replay();
    expect(state.hitCount).toBe(fixture.truth_count);
    expect(state.flashCount).toBe(state.hitCount);
    expect(playHitCalls).toBe(state.hitCount);
  });

  it("audio gain follows event volume", () => {
    const { ctx, hits } = replay();
    expect(ctx.starts.length).toBeGreaterThan(0);
    for (const s of ctx.starts) {
      expect(s.gain).toBeGreaterThan(0);
      expect(s.gain).toBeLessThanOrEqual(1);
    }
    const maxVolume = Math.max(...hits.map((h) => h.volume));
    const maxGain = Math.max(...ctx.starts.map((s) => s.gain));
    expect(maxGain).toBeCloseTo(Math.min(1, maxVolume), 5);
  });

  it("the committed zone edit round-trips and affects later hit zone sets", () => {
    // what the client sent is exactly what the zonesUpdate builder makes
    const sentZones = fixture.sent
      .map((raw) => JSON.parse(raw))
      .find((m) => m.kind === "zones");
    expect(sentZones).toBeDefined();
    const rebuilt = JSON.parse(JSON.stringify(zonesUpdate(sentZones!.payload.zones)));
    expect(rebuilt).toEqual(sentZones);

    // the server echoed it back...
    const zoneMsgs = fixture.messages
      .map((raw) => decodeServerMessage(raw))
      .filter((m) => m.kind === "zones");
    expect(zoneMsgs.length).toBe(2);
    const echoed = (zoneMsgs[1] as { payload: { zones: { zone_id: string }[] } }).payload.zones;
    expect(echoed.map((z) => z.zone_id)).toContain("snare_rim");

    // ...and hits landing in the edited region carry the new zone
    const { hits } = replay();
    const snareHits = hits.filter((h) => h.zones.includes("snare"));
    expect(snareHits.length).toBeGreaterThan(0);
    for (const h of snareHits) expect(h.zones).toContain("snare_rim");
  });

  it("a composite hit triggers one sample per overlapped zone", () => {
    const { ctx, hits } = replay();
    const composite = hits.filter((h) => h.zones.length >= 2);
    const single = hits.filter((h) => h.zones.length === 1);
    expect(composite.length).toBeGreaterThan(0);
    expect(single.length).toBeGreaterThan(0);
    const expectedStarts = hits.reduce((acc, h) => acc + h.zones.length, 0);
    expect(ctx.starts.length).toBe(expectedStarts);
  });
});
