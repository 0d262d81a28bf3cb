"""Impact classes, scale degrees and pitch arithmetic.

MNCS values are rounded to one decimal, binned into seven impact classes
and each class is assigned one degree of a seven-tone scale (F natural
minor by default).
"""

from __future__ import annotations

import bisect
import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Sequence

from .errors import ConfigError, DomainError
from .ingest import PublicationRecord

PITCH_CLASSES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
_ALIASES = {"DB": "C#", "EB": "D#", "GB": "F#", "AB": "G#", "BB": "A#", "CB": "B", "FB": "E", "E#": "F", "B#": "C"}

F_MINOR = ("F", "G", "G#", "A#", "C", "C#", "D#")


def pitch_index(name: str) -> int:
    """Chromatic index of a pitch-class name (C=0); flats are accepted."""
    key = name.strip().upper()
    key = _ALIASES.get(key, key)
    try:
        return PITCH_CLASSES.index(key)
    except ValueError:
        raise DomainError(f"unknown pitch class {name!r}") from None


class EventKind(enum.IntEnum):
    # value doubles as the tie-break order for simultaneous events
    PUB_WHOOSH = 0
    OA_DROP = 1
    IMPACT_TONE = 2
    CLASS_MARKER = 3
    EXTERNAL_INSERT = 4

    @property
    def label(self) -> str:
        return _KIND_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> EventKind:
        for kind, name in _KIND_LABELS.items():
            if name == label:
                return kind
        raise ValueError(f"unknown event kind {label!r}")


_KIND_LABELS = {
    EventKind.PUB_WHOOSH: "PubWhoosh",
    EventKind.OA_DROP: "OaDrop",
    EventKind.IMPACT_TONE: "ImpactTone",
    EventKind.CLASS_MARKER: "ClassMarker",
    EventKind.EXTERNAL_INSERT: "ExternalInsert",
}


@dataclass(frozen=True)
class ImpactBin:
    lower: float | None
    upper: float | None
    meaning: str
    impact_class: int

    def contains(self, rounded: float) -> bool:
        return (self.lower is None or rounded >= self.lower) and (self.upper is None or rounded <= self.upper)


DEFAULT_BINS = (
    ImpactBin(None, 0.2, "Far below", 1),
    ImpactBin(0.3, 0.7, "Below", 2),
    ImpactBin(0.8, 1.2, "Average", 3),
    ImpactBin(1.3, 1.6, "Above", 4),
    ImpactBin(1.7, 2.2, "Far above", 5),
    ImpactBin(2.3, 4.0, "Outreaching", 6),
    ImpactBin(4.1, None, "Far outreaching", 7),
)


@dataclass(frozen=True)
class EventSounds:
    """Synthesis parameters for the non-melodic event sounds and the tone envelope."""

    whoosh_duration: float = 0.35
    whoosh_low_hz: float = 800.0
    whoosh_high_hz: float = 4000.0
    whoosh_q: float = 2.0
    whoosh_gain: float = 0.35
    oa_duration: float = 0.5
    oa_start_hz: float = 80.0
    oa_end_hz: float = 40.0
    oa_gain: float = 0.8
    tone_gain: float = 0.5
    tone_attack: float = 0.01
    tone_decay: float = 0.05
    tone_sustain: float = 0.7
    tone_release: float = 0.1

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (value > 0) or math.isinf(value):
                raise ConfigError(f"event_sounds.{f.name} must be positive, got {value}")
        for name in ("whoosh_gain", "oa_gain", "tone_gain", "tone_sustain"):
            if getattr(self, name) > 1:
                raise ConfigError(f"event_sounds.{name} must be at most 1")
        if self.whoosh_low_hz >= self.whoosh_high_hz:
            raise ConfigError("whoosh band must rise: whoosh_low_hz < whoosh_high_hz")


@dataclass(frozen=True)
class PitchLabel:
    pitch_class: str
    octave: int

    def __str__(self) -> str:
        return f"{self.pitch_class}{self.octave}"

    @property
    def midi(self) -> int:
        return pitch_to_midi(self)


@dataclass(frozen=True)
class MappingSchema:
    bins: tuple[ImpactBin, ...] = DEFAULT_BINS
    scale: tuple[str, ...] = F_MINOR
    octave_anchor: int = 4
    reference_pitch: float = 440.0
    event_sounds: EventSounds = field(default_factory=EventSounds)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bins", tuple(self.bins))
        object.__setattr__(self, "scale", tuple(PITCH_CLASSES[pitch_index(p)] for p in self.scale))
        if len(self.scale) != len(self.bins):
            raise ConfigError(f"scale has {len(self.scale)} tones but there are {len(self.bins)} bins")
        if not self.reference_pitch > 0:
            raise ConfigError("reference_pitch must be positive")
        _check_bins(self.bins)
        # the upper bounds of all but the last bin drive bisection in classify()
        object.__setattr__(self, "_uppers", tuple(b.upper for b in self.bins[:-1]))

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MappingSchema:
        kwargs: dict[str, Any] = {}
        if "bins" in data:
            kwargs["bins"] = tuple(
                ImpactBin(b.get("lower"), b.get("upper"), b.get("meaning", ""), int(b["class"])) for b in data["bins"]
            )
        if "scale" in data:
            kwargs["scale"] = tuple(data["scale"])
        if "octave_anchor" in data:
            kwargs["octave_anchor"] = int(data["octave_anchor"])
        if "reference_pitch" in data:
            kwargs["reference_pitch"] = float(data["reference_pitch"])
        if "event_sounds" in data:
            kwargs["event_sounds"] = replace(EventSounds(), **data["event_sounds"])
        try:
            return cls(**kwargs)
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"invalid mapping schema: {exc}") from None

    @classmethod
    def from_json(cls, raw: bytes | str) -> MappingSchema:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"schema file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("schema file must contain a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return {
            "bins": [
                {"lower": b.lower, "upper": b.upper, "class": b.impact_class, "meaning": b.meaning} for b in self.bins
            ],
            "scale": list(self.scale),
            "octave_anchor": self.octave_anchor,
            "reference_pitch": self.reference_pitch,
            "event_sounds": asdict(self.event_sounds),
        }


def _check_bins(bins: Sequence[ImpactBin]) -> None:
    if not bins:
        raise ConfigError("schema needs at least one bin")
    if bins[0].lower not in (None, 0, 0.0):
        raise ConfigError("first bin must start at 0 (or be open below)")
    if bins[-1].upper is not None:
        raise ConfigError("last bin must be open above")
    for i, (a, b) in enumerate(zip(bins, bins[1:])):
        if a.upper is None or b.lower is None:
            raise ConfigError(f"bins {i + 1} and {i + 2}: only the outermost bounds may be open")
        if round_one_decimal(a.upper + 0.1) != round_one_decimal(b.lower):
            raise ConfigError(f"bins {i + 1} and {i + 2}: bounds {a.upper} and {b.lower} leave a gap or overlap")
    for b in bins:
        if b.lower is not None and b.upper is not None and b.lower > b.upper:
            raise ConfigError(f"bin {b.impact_class}: lower bound exceeds upper bound")


def round_one_decimal(x: float) -> float:
    """Round to one decimal place, halves away from zero (0.25 -> 0.3).

    Rounding operates on the shortest decimal repr of ``x``, so values that
    read as ``x.x5`` round up even when their binary form sits just below.
    """
    return float(Decimal(repr(float(x))).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def classify(mncs: float, schema: MappingSchema | None = None) -> int:
    """Impact class of a score: the bin containing its one-decimal rounding."""
    if mncs < 0 or math.isnan(mncs):
        raise DomainError(f"mncs must be non-negative, got {mncs}")
    schema = schema or DEFAULT_SCHEMA
    rounded = round_one_decimal(mncs)
    pos = bisect.bisect_left(schema._uppers, rounded)  # type: ignore[attr-defined]
    return schema.bins[pos].impact_class


def class_to_pitch(impact_class: int, schema: MappingSchema | None = None) -> PitchLabel:
    schema = schema or DEFAULT_SCHEMA
    if not 1 <= impact_class <= len(schema.scale):
        raise DomainError(f"impact class {impact_class} outside 1-{len(schema.scale)}")
    octave = schema.octave_anchor
    prev = pitch_index(schema.scale[0])
    for name in schema.scale[1:impact_class]:
        idx = pitch_index(name)
        if idx <= prev:
            octave += 1
        prev = idx
    return PitchLabel(schema.scale[impact_class - 1], octave)


def pitch_to_midi(p: PitchLabel) -> int:
    n = 12 * (p.octave + 1) + pitch_index(p.pitch_class)
    if not 0 <= n <= 127:
        raise DomainError(f"{p} maps to MIDI note {n}, outside 0-127")
    return n


def midi_to_freq(n: int, reference_pitch: float = 440.0) -> float:
    """Equal-tempered frequency in Hz, A4 (note 69) at ``reference_pitch``."""
    return reference_pitch * 2.0 ** ((n - 69) / 12)


def class_frequency(impact_class: int, schema: MappingSchema | None = None) -> float:
    schema = schema or DEFAULT_SCHEMA
    return midi_to_freq(pitch_to_midi(class_to_pitch(impact_class, schema)), schema.reference_pitch)


@dataclass(frozen=True)
class MappedPublication:
    source_id: str
    year: int
    month: int | None
    mncs: float
    oa: bool
    impact_class: int
    pitch: PitchLabel
    midi: int
    freq: float

    @property
    def kinds(self) -> tuple[EventKind, ...]:
        """Event kinds this publication contributes, in slot order."""
        if self.oa:
            return (EventKind.PUB_WHOOSH, EventKind.OA_DROP, EventKind.IMPACT_TONE, EventKind.CLASS_MARKER)
        return (EventKind.PUB_WHOOSH, EventKind.IMPACT_TONE, EventKind.CLASS_MARKER)


def map_record(record: PublicationRecord, mncs: float, schema: MappingSchema | None = None) -> MappedPublication:
    schema = schema or DEFAULT_SCHEMA
    cls = classify(mncs, schema)
    pitch = class_to_pitch(cls, schema)
    midi = pitch_to_midi(pitch)
    return MappedPublication(
        source_id=record.id,
        year=record.year,
        month=record.month,
        mncs=mncs,
        oa=record.oa,
        impact_class=cls,
        pitch=pitch,
        midi=midi,
        freq=midi_to_freq(midi, schema.reference_pitch),
    )


DEFAULT_SCHEMA = MappingSchema()
