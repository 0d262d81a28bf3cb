"""Byte-level writers: WAV, Standard MIDI File, JSON event log, CSV report."""

from __future__ import annotations

import csv
import io
import json
import os
import struct
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .ingest import COLUMNS, PublicationRecord, record_to_dict
from .mapping import EventKind, MappedPublication, MappingSchema, class_to_pitch, pitch_to_midi
from .sequencing import SonicEvent, Timeline, TimingConfig
from .synthesis import AudioBuffer

TICKS_PER_QUARTER = 480
TEMPO_US_PER_QUARTER = 500_000  # 120 BPM
TICKS_PER_SECOND = TICKS_PER_QUARTER * 1_000_000 // TEMPO_US_PER_QUARTER

MELODY_CHANNEL = 0
OA_CHANNEL = 1
PERCUSSION_CHANNEL = 9  # General MIDI drum channel ("channel 10")
WHOOSH_NOTE = 42  # closed hi-hat
OA_NOTE = 28

REPORT_COLUMNS = ("id", "mncs", "oa", "class", "pitch")


def _round_half_away(x: np.ndarray | float) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


# -- WAV ---------------------------------------------------------------------

def write_wav(buffer: AudioBuffer) -> bytes:
    """16-bit little-endian mono PCM in a canonical 44-byte-header RIFF file."""
    pcm = np.clip(_round_half_away(buffer.samples * 32767.0), -32768, 32767).astype("<i2")
    data = pcm.tobytes()
    rate = int(buffer.sample_rate)
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        rate,
        rate * 2,
        2,
        16,
        b"data",
        len(data),
    )
    return header + data


# -- MIDI --------------------------------------------------------------------

def _vlq(n: int) -> bytes:
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.append(0x80 | (n & 0x7F))
        n >>= 7
    return bytes(reversed(out))


def seconds_to_ticks(seconds: float) -> int:
    return int(_round_half_away(seconds * TICKS_PER_SECOND))


def _velocity(gain: float) -> int:
    return max(1, min(127, int(_round_half_away(gain * 127))))


def _meta(kind: int, payload: bytes) -> bytes:
    return bytes([0xFF, kind]) + _vlq(len(payload)) + payload


def write_midi(timeline: Timeline, schema: MappingSchema | None = None) -> bytes:
    """Type-0 SMF at 480 ticks per quarter and 120 BPM.

    Impact tones become notes on channel 1, OA drops note 28 on channel 2,
    whooshes note 42 on the drum channel; class markers are ``class:N``
    text events and external inserts ``insert:<path>`` markers.
    """
    # (tick, priority, sequence, bytes); note-offs sort before anything else at a tick
    pending: list[tuple[int, int, int, bytes]] = []
    for seq, ev in enumerate(timeline.events):
        on = seconds_to_ticks(ev.onset)
        off = max(seconds_to_ticks(ev.end), on + 1)
        note: tuple[int, int] | None = None
        if ev.kind is EventKind.IMPACT_TONE:
            note = (MELODY_CHANNEL, pitch_to_midi(class_to_pitch(ev.impact_class, schema)))
        elif ev.kind is EventKind.OA_DROP:
            note = (OA_CHANNEL, OA_NOTE)
        elif ev.kind is EventKind.PUB_WHOOSH:
            note = (PERCUSSION_CHANNEL, WHOOSH_NOTE)
        elif ev.kind is EventKind.CLASS_MARKER:
            pending.append((on, 1, seq, _meta(0x01, f"class:{ev.impact_class}".encode("ascii"))))
        elif ev.kind is EventKind.EXTERNAL_INSERT:
            pending.append((on, 1, seq, _meta(0x06, f"insert:{ev.path}".encode("utf-8"))))
        if note is not None:
            ch, key = note
            pending.append((on, 2, seq, bytes([0x90 | ch, key, _velocity(ev.gain)])))
            pending.append((off, 0, seq, bytes([0x80 | ch, key, 0])))
    pending.sort(key=lambda p: (p[0], p[1], p[2]))

    track = bytearray()
    last = 0
    if pending:
        track += _vlq(0) + _meta(0x51, TEMPO_US_PER_QUARTER.to_bytes(3, "big"))
    for tick, _, _, msg in pending:
        track += _vlq(tick - last) + msg
        last = tick
    track += _vlq(0) + _meta(0x2F, b"")
    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, TICKS_PER_QUARTER)
    return header + b"MTrk" + struct.pack(">I", len(track)) + bytes(track)


# -- JSON event log ----------------------------------------------------------

def event_to_dict(ev: SonicEvent) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": ev.kind.label, "onset": ev.onset, "duration": ev.duration, "gain": ev.gain}
    if ev.impact_class is not None:
        d["class"] = ev.impact_class
    if ev.freq is not None:
        d["freq"] = ev.freq
    if ev.source_id is not None:
        d["source_id"] = ev.source_id
    if ev.path is not None:
        d["path"] = ev.path
    return d


def event_from_dict(d: dict[str, Any]) -> SonicEvent:
    return SonicEvent(
        kind=EventKind.from_label(d["kind"]),
        onset=float(d["onset"]),
        duration=float(d["duration"]),
        gain=float(d.get("gain", 1.0)),
        impact_class=d.get("class"),
        freq=d.get("freq"),
        source_id=d.get("source_id"),
        path=d.get("path"),
    )


def write_event_log(
    timeline: Timeline,
    mapped: Sequence[MappedPublication] = (),
    schema: MappingSchema | None = None,
    timing: TimingConfig | None = None,
) -> bytes:
    doc = {
        "schema": (schema or MappingSchema()).to_dict(),
        "timing": (timing or TimingConfig()).to_dict(),
        "sample_rate": timeline.sample_rate,
        "total_duration": timeline.total_duration,
        "publications": [
            {
                "id": m.source_id,
                "mncs": m.mncs,
                "oa": m.oa,
                "class": m.impact_class,
                "pitch": str(m.pitch),
                "midi": m.midi,
                "freq": m.freq,
            }
            for m in mapped
        ],
        "events": [event_to_dict(e) for e in timeline.events],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def read_event_log(raw: bytes) -> Timeline:
    doc = json.loads(raw)
    return Timeline(
        tuple(event_from_dict(e) for e in doc["events"]),
        float(doc["total_duration"]),
        int(doc["sample_rate"]),
    )


# -- CSV mapping report -------------------------------------------------------

@dataclass(frozen=True)
class MappingReportRow:
    id: str
    mncs: float
    oa: int
    impact_class: int
    pitch: str


def report_rows(mapped: Iterable[MappedPublication]) -> list[MappingReportRow]:
    return [MappingReportRow(m.source_id, m.mncs, int(m.oa), m.impact_class, m.pitch.pitch_class) for m in mapped]


def write_mapping_report(rows: Iterable[MappingReportRow]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([r.id, repr(float(r.mncs)), r.oa, r.impact_class, r.pitch])
    return buf.getvalue().encode("utf-8")


def read_mapping_report(raw: bytes) -> list[MappingReportRow]:
    reader = csv.DictReader(io.StringIO(raw.decode("utf-8"), newline=""))
    return [
        MappingReportRow(row["id"], float(row["mncs"]), int(row["oa"]), int(row["class"]), row["pitch"])
        for row in reader
    ]


# -- records -----------------------------------------------------------------

def write_records(records: Iterable[PublicationRecord], format: str = "csv") -> bytes:
    """Serialize records in the ingest input format (inverse of ``parse_records``)."""
    dicts = [record_to_dict(r) for r in records]
    if format == "json":
        return (json.dumps(dicts, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    buf = io.StringIO()
    # quote every text cell: the csv module leaves a bare "\r" unquoted otherwise
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_NONNUMERIC)
    w.writerow(COLUMNS)
    for d in dicts:
        cats = d["categories"]
        w.writerow(
            [
                d["id"],
                d["year"],
                "" if d["month"] is None else d["month"],
                "" if d["mncs"] is None else repr(d["mncs"]),
                "" if d["citations"] is None else d["citations"],
                "" if cats is None else ";".join(cats),
                1 if d["oa"] else 0,
                "" if d["title"] is None else d["title"],
            ]
        )
    return buf.getvalue().encode("utf-8")


def atomic_write(path: str | os.PathLike[str], data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    path = os.fspath(path)
    tmp = f"{path}.tmp-{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
