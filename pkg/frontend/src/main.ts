// Wires socket, state, audio, renderer, editor, and transport controls to
// the DOM. Everything interesting lives in the imported modules; this file
// is glue only.

import { DrumSampler, SampleManifest } from "./audio.js";
import { ZoneEditor } from "./editor.js";
import { pause, play, seek, selectSource, zonesUpdate } from "./protocol.js";
import { buildScene, paint } from "./renderer.js";
import { DrumSocket } from "./socket.js";
import { SessionState } from "./state.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("stage");
const ctx2d = canvas.getContext("2d")!;
const state = new SessionState();
const editor = new ZoneEditor();

const wsUrl =
  new URLSearchParams(location.search).get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8765`;
const socket = new DrumSocket(wsUrl);

const AC: typeof AudioContext =
  (window as unknown as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext ??
  AudioContext;
const audioCtx = new AC();
const sampler = new DrumSampler(audioCtx);

async function loadSamples(): Promise<void> {
  try {
    const res = await fetch("public/samples/manifest.json");
    if (!res.ok) throw new Error(String(res.status));
    const manifest = (await res.json()) as SampleManifest;
    await sampler.loadManifest(manifest);
  } catch {
    console.warn("no sample manifest; all sounds will be synthesized");
  }
}

state.onHit = (e) => {
  sampler.playHit(e, (zoneId) => state.zoneById(zoneId)?.sound_id);
};

socket.onState = (s) => {
  state.connection = s;
  $("status").textContent = `${s} (${wsUrl})`;
};

socket.onMessage = (msg) => {
  state.apply(msg);
  if (msg.kind === "zones") {
    editor.syncFromServer(msg.payload.zones);
    sampler.ensureSounds(msg.payload.zones);
  } else if (msg.kind === "frame_snapshot") {
    sampler.syncClock(msg.payload.t);
    $("frame").textContent = `frame ${msg.payload.frame}`;
  } else if (msg.kind === "error") {
    $("status").textContent = `server error: ${msg.payload.message}`;
  }
};

// -- render loop ------------------------------------------------------------

function frame(): void {
  state.prune();
  paint(ctx2d, buildScene(state, editor, Date.now()), canvas.width, canvas.height);
  requestAnimationFrame(frame);
}

// -- transport controls ------------------------------------------------------

$("src-synth").addEventListener("click", () => {
  const bpm = Number(($<HTMLInputElement>("bpm")).value);
  socket.send(selectSource({ type: "synthetic", bpm }));
});
$("bpm").addEventListener("input", () => {
  $("bpm-label").textContent = ($<HTMLInputElement>("bpm")).value;
});
$("src-trace").addEventListener("click", () => {
  const path = ($<HTMLInputElement>("trace-path")).value.trim();
  if (path) socket.send(selectSource({ type: "trace", path }));
});
$("src-live").addEventListener("click", () => {
  socket.send(selectSource({ type: "live" }));
});
$("play").addEventListener("click", () => socket.send(play()));
$("pause").addEventListener("click", () => socket.send(pause()));
$("seek0").addEventListener("click", () => socket.send(seek(0)));

// -- zone editor --------------------------------------------------------------

const editBtn = $<HTMLButtonElement>("edit");
const commitBtn = $<HTMLButtonElement>("commit");
const cancelBtn = $<HTMLButtonElement>("cancel");
const deleteBtn = $<HTMLButtonElement>("delete-zone");
const soundSel = $<HTMLSelectElement>("sound");

function setEditorUi(): void {
  commitBtn.disabled = !editor.active;
  cancelBtn.disabled = !editor.active;
  deleteBtn.disabled = !editor.active;
  editBtn.textContent = editor.active ? "editing..." : "edit zones";
}

editBtn.addEventListener("click", () => {
  if (!editor.active) editor.enter();
  setEditorUi();
});
commitBtn.addEventListener("click", () => {
  const zones = editor.commitPayload();
  if (zones === null) {
    $("status").textContent = "cannot commit: a zone is degenerate";
    return;
  }
  if (socket.send(zonesUpdate(zones))) {
    editor.cancel(); // server echo will refresh state.zones
    setEditorUi();
  }
});
cancelBtn.addEventListener("click", () => {
  editor.cancel();
  setEditorUi();
});
deleteBtn.addEventListener("click", () => editor.deleteSelected());
soundSel.addEventListener("change", () => {
  editor.nextSound = soundSel.value;
  editor.setSelectedSound(soundSel.value);
});

function canvasPos(ev: PointerEvent): [number, number] {
  const r = canvas.getBoundingClientRect();
  return [
    ((ev.clientX - r.left) / r.width) * canvas.width,
    ((ev.clientY - r.top) / r.height) * canvas.height,
  ];
}

canvas.addEventListener("pointerdown", (ev) => {
  audioCtx.resume(); // user gesture unlocks audio
  const [x, y] = canvasPos(ev);
  editor.pointerDown(x, y);
});
canvas.addEventListener("pointermove", (ev) => {
  const [x, y] = canvasPos(ev);
  editor.pointerMove(x, y);
});
canvas.addEventListener("pointerup", () => editor.pointerUp());

// -- boot ---------------------------------------------------------------------

setEditorUi();
loadSamples().then(() => {
  socket.connect();
  requestAnimationFrame(frame);
});
