import { describe, expect, it } from "vitest";

import { DrumSampler } from "../src/audio.js";
import { HitEventPayload } from "../src/protocol.js";
import { FakeAudioContext } from "./helpers.js";

const soundOf = (zoneId: string) =>
  ({ snare: "snare", tom: "tom", snare_rim: "ride" })[zoneId];

function hit(zones: string[], volume = 0.5): HitEventPayload {
  return { t: 1.0, stick: "left", x: 1, y: 2, strike_speed: 1500, volume, zones };
}

async function sampler(warnings: string[] = []) {
  const ctx = new FakeAudioContext();
  const s = new DrumSampler(
    ctx,
    async () => {
      throw new Error("offline");
    },
    (m) => warnings.push(m),
  );
  await s.loadManifest({ snare: "x/snare.wav", tom: "x/tom.wav", ride: "x/ride.wav" });
  return { ctx, s };
}

describe("DrumSampler", () => {
  it("falls back to synthesized buffers when fetching fails", async () => {
    const warnings: string[] = [];
    const { ctx, s } = await sampler(warnings);
    expect(warnings.length).toBe(3);
    expect(s.playHit(hit(["snare"]), soundOf)).toBe(1);
    expect(ctx.starts.length).toBe(1);
  });

  it("single zone plays one sample at the event volume", async () => {
    const { ctx, s } = await sampler();
    s.playHit(hit(["snare"], 0.7), soundOf);
    expect(ctx.starts.length).toBe(1);
    expect(ctx.starts[0].gain).toBeCloseTo(0.7);
  });

  it("composite hit plays one sample per zone simultaneously", async () => {
    const { ctx, s } = await sampler();
    const n = s.playHit(hit(["snare", "snare_rim"], 1.0), soundOf);
    expect(n).toBe(2);
    expect(ctx.starts.length).toBe(2);
    expect(ctx.starts[0].when).toBe(ctx.starts[1].when);
  });

  it("empty zone set plays nothing", async () => {
    const { ctx, s } = await sampler();
    expect(s.playHit(hit([]), soundOf)).toBe(0);
    expect(ctx.starts.length).toBe(0);
  });

  it("unknown zone warns and does not throw", async () => {
    const warnings: string[] = [];
    const { s } = await sampler(warnings);
    expect(s.playHit(hit(["mystery"]), soundOf)).toBe(0);
    expect(warnings.some((w) => w.includes("mystery"))).toBe(true);
  });

  it("volume clamps into [0, 1]", async () => {
    const { ctx, s } = await sampler();
    s.playHit(hit(["snare"], 4.0), soundOf);
    expect(ctx.starts[0].gain).toBe(1);
  });

  it("keeps a running trigger count", async () => {
    const { s } = await sampler();
    s.playHit(hit(["snare"]), soundOf);
    s.playHit(hit(["snare", "snare_rim"]), soundOf);
    expect(s.triggerCount).toBe(3);
  });

  it("schedules against the engine clock when it leads the audio clock", async () => {
    const { ctx, s } = await sampler();
    ctx.currentTime = 10.0;
    s.syncClock(2.0); // engine t=2.0 corresponds to audio t=10.0
    s.playHit({ ...hit(["snare"]), t: 2.05 }, soundOf);
    expect(ctx.starts[0].when).toBeCloseTo(10.05);
    // events already in the past play immediately
    s.playHit({ ...hit(["snare"]), t: 1.5 }, soundOf);
    expect(ctx.starts[1].when).toBe(10.0);
  });

  it("ensureSounds synthesizes anything the zone set announces", async () => {
    const { s, ctx } = await sampler();
    s.ensureSounds([
      { zone_id: "z", x_min: 0, y_min: 0, x_max: 1, y_max: 1, sound_id: "cowbell", color: "#fff" },
    ]);
    const n = s.playHit(hit(["z"]), () => "cowbell");
    expect(n).toBe(1);
    expect(ctx.starts.length).toBe(1);
  });
});
