"""Regenerate test/fixtures/session_80bpm.json by recording a real service
session: connect, commit a zone edit over the wire (adding a pad overlapping
the snare, so later hits are composite), then stream a deterministic
noiseless 80 BPM trace.

Usage: python3 scripts/capture_fixture.py   (from frontend/)
"""

import asyncio
import json
import socket
from pathlib import Path

from websockets.asyncio.client import connect

from airdrum.core import DrumZone, FilterParams, HitParams, validate_config
from airdrum.service import serve
from airdrum.simulate import NoiseModel, StrokePattern, generate
from airdrum.traceio import write_trace, zone_to_record
from airdrum.zones import DEFAULT_ZONES

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "session_80bpm.json"

# the zone edit the captured client commits: everything as shipped plus a
# rim pad overlapping the snare rectangle
EDITED_ZONES = DEFAULT_ZONES + (
    DrumZone("snare_rim", 245.0, 265.0, 395.0, 400.0, "ride", "#cccc66"),
)
CONFIG = validate_config(FilterParams(), HitParams(), DEFAULT_ZONES)


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


async def capture() -> None:
    trace, truth = generate(
        StrokePattern(bpm=80, duration=6.0), NoiseModel(meas_noise_std=0.0), CONFIG
    )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    tmp_trace = OUT.parent / "_capture.a2dtrace"
    write_trace(trace, tmp_trace)

    port = free_port()
    ready = asyncio.Event()
    server = asyncio.ensure_future(serve(CONFIG, port, ready=ready))
    await ready.wait()

    received: list[str] = []
    sent: list[str] = []
    last_frame = len(trace.frames) - 1

    async def send(obj) -> None:
        raw = json.dumps(obj)
        sent.append(raw)
        await ws.send(raw)

    async with connect(f"ws://127.0.0.1:{port}") as ws:
        while True:
            raw = await ws.recv()
            received.append(raw)
            if json.loads(raw)["kind"] == "config":
                break
        # the zone edit: client commits, server must echo before streaming
        await send(
            {
                "kind": "zones",
                "payload": {"zones": [zone_to_record(z) for z in EDITED_ZONES]},
            }
        )
        while True:
            raw = await ws.recv()
            received.append(raw)
            if json.loads(raw)["kind"] == "zones":
                break
        await send(
            {
                "kind": "control",
                "payload": {
                    "action": "source",
                    "source": {"type": "trace", "path": str(tmp_trace)},
                },
            }
        )
        while True:
            raw = await ws.recv()
            received.append(raw)
            msg = json.loads(raw)
            if msg["kind"] == "frame_snapshot" and msg["payload"]["frame"] == last_frame:
                break

    server.cancel()
    tmp_trace.unlink()
    OUT.write_text(
        json.dumps({"truth_count": len(truth), "sent": sent, "messages": received}, indent=1)
    )
    hits = sum(1 for m in received if json.loads(m)["kind"] == "hit_event")
    print(f"captured {len(received)} messages, {hits} hit events, truth {len(truth)} -> {OUT}")


if __name__ == "__main__":
    asyncio.run(capture())
