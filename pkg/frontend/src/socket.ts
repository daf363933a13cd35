// WebSocket client with automatic reconnect.

import { ClientMessage, decodeServerMessage, encodeClientMessage, ServerMessage } from "./protocol.js";

const RECONNECT_MS = 1500;

export class DrumSocket {
  private url: string;
  private ws: WebSocket | null = null;
  private closed = false;

  onMessage: ((msg: ServerMessage) => void) | null = null;
  onState: ((state: "connecting" | "open" | "closed") => void) | null = null;

  constructor(url: string) {
    this.url = url;
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    this.onState?.("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => this.onState?.("open"));
    ws.addEventListener("message", (ev) => {
      try {
        this.onMessage?.(decodeServerMessage(String(ev.data)));
      } catch (e) {
        console.warn("bad server message:", e);
      }
    });
    ws.addEventListener("close", () => {
      this.onState?.("closed");
      this.ws = null;
      if (!this.closed) {
        setTimeout(() => this.open(), RECONNECT_MS);
      }
    });
    ws.addEventListener("error", () => ws.close());
  }

  send(msg: ClientMessage): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeClientMessage(msg));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
