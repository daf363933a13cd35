// Procedural percussion samples. Used by the build step that writes the
// bundled WAVs and as a runtime fallback when a sample URL is unreachable.

export interface SynthSpec {
  kind: "membrane" | "metal" | "noise";
  baseFreq: number;
  decay: number; // seconds to -60 dB-ish
  duration: number; // seconds
}

export const DEFAULT_SYNTH_SPECS: Record<string, SynthSpec> = {
  crash: { kind: "metal", baseFreq: 520, decay: 1.2, duration: 1.4 },
  hihat: { kind: "noise", baseFreq: 6000, decay: 0.12, duration: 0.25 },
  snare: { kind: "noise", baseFreq: 1800, decay: 0.18, duration: 0.35 },
  tom: { kind: "membrane", baseFreq: 140, decay: 0.35, duration: 0.5 },
  ride: { kind: "metal", baseFreq: 740, decay: 0.9, duration: 1.1 },
};

// deterministic noise so generated samples are reproducible
function makeNoise(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 0xffffffff - 0.5;
  };
}

export function renderSample(spec: SynthSpec, sampleRate = 44100, seed = 1234): Float32Array {
  const n = Math.max(1, Math.round(spec.duration * sampleRate));
  const out = new Float32Array(n);
  const noise = makeNoise(seed);
  const partials =
    spec.kind === "metal"
      ? [1, 1.34, 1.72, 2.15, 2.63, 3.01]
      : spec.kind === "membrane"
        ? [1, 1.5, 1.98, 2.44]
        : [1];
  for (let i = 0; i < n; i++) {
    const t = i / sampleRate;
    const env = Math.exp((-6.9 * t) / spec.decay);
    let v = 0;
    if (spec.kind === "noise") {
      // band-ish noise: white noise with a one-pole tilt toward baseFreq
      v = noise() * 1.6;
      if (i > 0) v = 0.55 * v + 0.45 * out[i - 1] * Math.exp(6.9 * (1 / sampleRate) / spec.decay);
    } else {
      for (let p = 0; p < partials.length; p++) {
        const f = spec.baseFreq * partials[p];
        const bend = spec.kind === "membrane" ? 1 + 0.6 * Math.exp(-30 * t) : 1;
        v += Math.sin(2 * Math.PI * f * bend * t) / (p + 1);
      }
      if (spec.kind === "metal") v = 0.7 * v + 0.5 * noise() * Math.exp(-18 * t);
    }
    const attack = Math.min(1, t / 0.004);
    out[i] = Math.tanh(v * 0.9) * env * attack;
  }
  // normalize to 0.9 peak
  let peak = 0;
  for (let i = 0; i < n; i++) peak = Math.max(peak, Math.abs(out[i]));
  if (peak > 0) {
    const g = 0.9 / peak;
    for (let i = 0; i < n; i++) out[i] *= g;
  }
  return out;
}

/** Mono 16-bit PCM WAV bytes for a rendered sample. */
export function encodeWav(samples: Float32Array, sampleRate = 44100): Uint8Array {
  const n = samples.length;
  const bytes = new Uint8Array(44 + n * 2);
  const view = new DataView(bytes.buffer);
  const writeStr = (off: number, s: string) => {
    for (let i = 0; i < s.length; i++) bytes[off + i] = s.charCodeAt(i);
  };
  writeStr(0, "RIFF");
  view.setUint32(4, 36 + n * 2, true);
  writeStr(8, "WAVE");
  writeStr(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeStr(36, "data");
  view.setUint32(40, n * 2, true);
  for (let i = 0; i < n; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    view.setInt16(44 + i * 2, Math.round(v * 32767), true);
  }
  return bytes;
}
