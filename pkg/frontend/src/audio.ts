// Sample playback: one buffer per sound_id, polyphonic, gain = event volume.
// A hit with several zones plays all their sounds together (composite); an
// empty zone set plays nothing. Scheduling compensates for wire jitter by
// mapping engine timestamps onto the audio clock.

import { HitEventPayload, ZoneRecord } from "./protocol.js";
import { DEFAULT_SYNTH_SPECS, renderSample } from "./synth.js";

// the slice of AudioContext we use; tests substitute a counting fake
export interface AudioContextLike {
  currentTime: number;
  sampleRate: number;
  destination: unknown;
  createBuffer(channels: number, length: number, sampleRate: number): AudioBuffer;
  createBufferSource(): AudioBufferSourceNode;
  createGain(): GainNode;
  decodeAudioData(data: ArrayBuffer): Promise<AudioBuffer>;
}

export interface SampleManifest {
  [soundId: string]: string; // URL of an audio file
}

const MAX_LOOKAHEAD_S = 0.25;

export class DrumSampler {
  private ctx: AudioContextLike;
  private buffers = new Map<string, AudioBuffer>();
  private fetcher: (url: string) => Promise<ArrayBuffer>;
  private warn: (msg: string) => void;
  // engine time -> audio clock mapping, refreshed from snapshots
  private clockOffset: number | null = null;

  triggerCount = 0;

  constructor(
    ctx: AudioContextLike,
    fetcher: (url: string) => Promise<ArrayBuffer> = defaultFetcher,
    warn: (msg: string) => void = (m) => console.warn(m),
  ) {
    this.ctx = ctx;
    this.fetcher = fetcher;
    this.warn = warn;
  }

  async loadManifest(manifest: SampleManifest): Promise<void> {
    await Promise.all(
      Object.entries(manifest).map(async ([soundId, url]) => {
        try {
          const data = await this.fetcher(url);
          this.buffers.set(soundId, await this.ctx.decodeAudioData(data));
        } catch (e) {
          this.warn(`sample ${soundId} (${url}) unavailable, synthesizing: ${e}`);
          this.buffers.set(soundId, this.synthesize(soundId));
        }
      }),
    );
  }

  /** Make sure every sound announced by the zone set is playable. */
  ensureSounds(zones: ZoneRecord[]): void {
    for (const z of zones) {
      if (!this.buffers.has(z.sound_id)) {
        this.warn(`no sample for ${z.sound_id}, synthesizing`);
        this.buffers.set(z.sound_id, this.synthesize(z.sound_id));
      }
    }
  }

  private synthesize(soundId: string): AudioBuffer {
    const spec = DEFAULT_SYNTH_SPECS[soundId] ?? DEFAULT_SYNTH_SPECS.tom;
    const data = renderSample(spec, this.ctx.sampleRate);
    const buf = this.ctx.createBuffer(1, data.length, this.ctx.sampleRate);
    buf.copyToChannel(data as Float32Array<ArrayBuffer>, 0);
    return buf;
  }

  /** Re-anchor the engine-time to audio-clock mapping from a snapshot. */
  syncClock(engineT: number): void {
    this.clockOffset = this.ctx.currentTime - engineT;
  }

  /**
   * Trigger every sound in the event's zone set; returns how many sources
   * started. Each zone's sound plays once, simultaneously, at the event's
   * volume; unknown sound ids warn and are skipped.
   */
  playHit(event: HitEventPayload, soundOf: (zoneId: string) => string | undefined): number {
    let when = this.ctx.currentTime;
    if (this.clockOffset !== null) {
      const target = event.t + this.clockOffset;
      if (target > when && target - when <= MAX_LOOKAHEAD_S) when = target;
    }
    let started = 0;
    for (const zoneId of event.zones) {
      const soundId = soundOf(zoneId);
      if (soundId === undefined) {
        this.warn(`hit in unknown zone ${zoneId}`);
        continue;
      }
      const buf = this.buffers.get(soundId);
      if (!buf) {
        this.warn(`missing sample for ${soundId}`);
        continue;
      }
      const src = this.ctx.createBufferSource();
      src.buffer = buf;
      const g = this.ctx.createGain();
      g.gain.value = Math.max(0, Math.min(1, event.volume));
      src.connect(g as unknown as AudioNode);
      (g as unknown as AudioNode).connect(this.ctx.destination as AudioNode);
      src.start(when);
      started += 1;
    }
    this.triggerCount += started;
    return started;
  }
}

async function defaultFetcher(url: string): Promise<ArrayBuffer> {
  const res = await fetch(url);
  if (!res.ok) throw new Error(`fetch ${url}: ${res.status}`);
  return res.arrayBuffer();
}
