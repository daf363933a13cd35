// Shared fakes: a counting stand-in for the WebAudio slice DrumSampler uses.

import { AudioContextLike } from "../src/audio.js";

export interface StartRecord {
  soundLength: number;
  gain: number;
  when: number;
}

class FakeBuffer {
  length: number;
  data: Float32Array | null = null;
  constructor(length: number) {
    this.length = length;
  }
  copyToChannel(data: Float32Array): void {
    this.data = data;
  }
}

export class FakeAudioContext implements AudioContextLike {
  currentTime = 0;
  sampleRate = 44100;
  destination = { name: "dest" };
  starts: StartRecord[] = [];

  createBuffer(_c: number, length: number): AudioBuffer {
    return new FakeBuffer(length) as unknown as AudioBuffer;
  }

  createBufferSource(): AudioBufferSourceNode {
    const ctx = this;
    const node = {
      buffer: null as unknown as AudioBuffer,
      _gain: 1,
      connect(g: { gain?: { value: number }; _wire?: unknown }) {
        if (g.gain) this._gain = g.gain.value;
        return g;
      },
      start(when = 0) {
        ctx.starts.push({
          soundLength: (this.buffer as unknown as FakeBuffer).length,
          gain: this._gain,
          when,
        });
      },
    };
    return node as unknown as AudioBufferSourceNode;
  }

  createGain(): GainNode {
    const g = {
      gain: { value: 1 },
      connect() {
        return undefined;
      },
    };
    return g as unknown as GainNode;
  }

  async decodeAudioData(data: ArrayBuffer): Promise<AudioBuffer> {
    // pretend the bytes decode to one sample per 2 bytes
    return new FakeBuffer(Math.max(1, data.byteLength >> 1)) as unknown as AudioBuffer;
  }
}
