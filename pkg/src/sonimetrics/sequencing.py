"""Scheduling mapped publications into timed sound events."""

from __future__ import annotations

import json
import math
import wave
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Iterable, Sequence

from .errors import ConfigError, InsertIOError
from .mapping import (
    DEFAULT_SCHEMA,
    EventKind,
    EventSounds,
    MappedPublication,
    MappingSchema,
    class_frequency,
)

DEFAULT_SAMPLE_RATE = 44100

# legend demonstrates a medium, a high and a low impact tone, in that order
LEGEND_TONE_CLASSES = (3, 6, 1)


@dataclass(frozen=True)
class SonicEvent:
    kind: EventKind
    onset: float
    duration: float
    gain: float = 1.0
    impact_class: int | None = None
    freq: float | None = None
    source_id: str | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        if self.onset < 0:
            raise ConfigError(f"event onset must be >= 0, got {self.onset}")
        if not self.duration > 0:
            raise ConfigError(f"event duration must be > 0, got {self.duration}")
        if not 0 <= self.gain <= 1:
            raise ConfigError(f"event gain must be within [0, 1], got {self.gain}")

    @property
    def end(self) -> float:
        return self.onset + self.duration

    @property
    def audible(self) -> bool:
        return self.kind is not EventKind.CLASS_MARKER

    def shifted(self, offset: float) -> SonicEvent:
        return replace(self, onset=self.onset + offset)


def _event_order(e: SonicEvent) -> tuple[float, int]:
    return (e.onset, int(e.kind))


@dataclass(frozen=True)
class Timeline:
    events: tuple[SonicEvent, ...] = ()
    total_duration: float = 0.0
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self) -> None:
        events = tuple(sorted(self.events, key=_event_order))
        object.__setattr__(self, "events", events)
        latest = max((e.end for e in events), default=0.0)
        if self.total_duration < latest:
            object.__setattr__(self, "total_duration", latest)
        if self.sample_rate <= 0:
            raise ConfigError(f"sample rate must be positive, got {self.sample_rate}")

    def __len__(self) -> int:
        return len(self.events)

    def count(self, kind: EventKind) -> int:
        return sum(1 for e in self.events if e.kind is kind)


@dataclass(frozen=True)
class TimingConfig:
    slot: float = 0.75
    oa_offset: float = 0.15
    tone_offset: float = 0.30
    tone_duration: float = 0.40
    lead_in: float = 1.0
    segment_gap: float = 2.0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not value > 0 or math.isinf(value):
                raise ConfigError(f"timing.{f.name} must be a positive number, got {value!r}")
        if not self.oa_offset < self.tone_offset < self.slot:
            raise ConfigError("timing requires oa_offset < tone_offset < slot")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TimingConfig:
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown timing key(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_json(cls, raw: bytes | str) -> TimingConfig:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"timing file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("timing file must contain a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def _publication_events(
    pub: MappedPublication, start: float, cfg: TimingConfig, sounds: EventSounds
) -> list[SonicEvent]:
    events = [SonicEvent(EventKind.PUB_WHOOSH, start, sounds.whoosh_duration, sounds.whoosh_gain, source_id=pub.source_id)]
    if pub.oa:
        events.append(
            SonicEvent(EventKind.OA_DROP, start + cfg.oa_offset, sounds.oa_duration, sounds.oa_gain, source_id=pub.source_id)
        )
    tone_at = start + cfg.tone_offset
    events.append(
        SonicEvent(
            EventKind.IMPACT_TONE,
            tone_at,
            cfg.tone_duration,
            sounds.tone_gain,
            impact_class=pub.impact_class,
            freq=pub.freq,
            source_id=pub.source_id,
        )
    )
    events.append(
        SonicEvent(EventKind.CLASS_MARKER, tone_at, cfg.tone_duration, 0.0, impact_class=pub.impact_class, source_id=pub.source_id)
    )
    return events


def schedule(
    mapped: Sequence[MappedPublication],
    cfg: TimingConfig | None = None,
    sounds: EventSounds | None = None,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> Timeline:
    """Give each publication its own slot after the lead-in.

    Within a slot the whoosh opens, the OA drop (if any) follows, and the
    impact tone closes the sequence together with its silent class marker.
    """
    cfg = cfg or TimingConfig()
    sounds = sounds or DEFAULT_SCHEMA.event_sounds
    events: list[SonicEvent] = []
    for i, pub in enumerate(mapped):
        events.extend(_publication_events(pub, cfg.lead_in + i * cfg.slot, cfg, sounds))
    total = cfg.lead_in + len(mapped) * cfg.slot
    return Timeline(tuple(events), total, sample_rate)


def build_legend(
    schema: MappingSchema | None = None, cfg: TimingConfig | None = None, sample_rate: int = DEFAULT_SAMPLE_RATE
) -> Timeline:
    """Introductory segment demonstrating each mapped sound once.

    Order: publication whoosh, OA drop, medium/high/low impact tones, then
    the seven class markers.
    """
    schema = schema or DEFAULT_SCHEMA
    cfg = cfg or TimingConfig()
    sounds = schema.event_sounds
    t = cfg.lead_in
    events = []
    demo = [
        SonicEvent(EventKind.PUB_WHOOSH, 0.0, sounds.whoosh_duration, sounds.whoosh_gain),
        SonicEvent(EventKind.OA_DROP, 0.0, sounds.oa_duration, sounds.oa_gain),
    ]
    demo += [
        SonicEvent(
            EventKind.IMPACT_TONE, 0.0, cfg.tone_duration, sounds.tone_gain, impact_class=c, freq=class_frequency(c, schema)
        )
        for c in LEGEND_TONE_CLASSES
    ]
    for ev in demo:
        events.append(ev.shifted(t))
        t += ev.duration + cfg.segment_gap
    for c in range(1, len(schema.scale) + 1):
        events.append(SonicEvent(EventKind.CLASS_MARKER, t, cfg.tone_duration, 0.0, impact_class=c))
        t += cfg.slot
    return Timeline(tuple(events), max(e.end for e in events), sample_rate)


def concat(segments: Iterable[Timeline], gap: float = 0.0) -> Timeline:
    """Lay segments end to end with ``gap`` seconds between them."""
    segments = list(segments)
    if not segments:
        return Timeline()
    if gap < 0:
        raise ConfigError(f"gap must be non-negative, got {gap}")
    rate = segments[0].sample_rate
    if any(s.sample_rate != rate for s in segments):
        raise ConfigError(f"cannot concatenate timelines with sample rates {sorted({s.sample_rate for s in segments})}")
    if len(segments) == 1:
        return segments[0]
    events: list[SonicEvent] = []
    offset = 0.0
    for i, seg in enumerate(segments):
        if i:
            offset += gap
        events.extend(e.shifted(offset) for e in seg.events)
        offset += seg.total_duration
    return Timeline(tuple(events), offset, rate)


def external_insert(path: str, sample_rate: int = DEFAULT_SAMPLE_RATE, gain: float = 1.0) -> Timeline:
    """Segment holding one pre-recorded 16-bit mono WAV at ``sample_rate``."""
    try:
        with wave.open(str(path), "rb") as w:
            params = w.getparams()
    except (OSError, EOFError, wave.Error) as exc:
        raise InsertIOError(str(path), f"cannot read WAV ({exc})") from None
    if params.nchannels != 1 or params.sampwidth != 2:
        raise InsertIOError(str(path), "external inserts must be 16-bit PCM mono")
    if params.framerate != sample_rate:
        raise InsertIOError(str(path), f"sample rate {params.framerate} differs from timeline rate {sample_rate}")
    if params.nframes == 0:
        raise InsertIOError(str(path), "WAV holds no samples")
    ev = SonicEvent(EventKind.EXTERNAL_INSERT, 0.0, params.nframes / sample_rate, gain, path=str(path))
    return Timeline((ev,), ev.duration, sample_rate)
