"""Sound generators and the timeline renderer.

Three generators cover the audible event kinds: an enveloped sine for
impact tones, band-passed seeded noise with a rising centre for the
publication whoosh, and an exponentially gliding sub-bass for OA drops.
"""

from __future__ import annotations

import math
import wave
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._ext import biquad_tv
from .errors import ConfigError, DomainError, InsertIOError
from .mapping import DEFAULT_SCHEMA, EventKind, MappingSchema
from .sequencing import DEFAULT_SAMPLE_RATE, SonicEvent, Timeline

NORMALIZE_CEILING = 0.9
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class Envelope:
    attack: float
    decay: float
    sustain: float
    release: float

    def __post_init__(self) -> None:
        if min(self.attack, self.decay, self.release) < 0:
            raise ConfigError("envelope times must be non-negative")
        if not 0 <= self.sustain <= 1:
            raise ConfigError(f"sustain level must be within [0, 1], got {self.sustain}")

    def curve(self, n: int, sample_rate: int) -> np.ndarray:
        """Piecewise-linear ADSR over ``n`` samples; starts and ends at exactly 0."""
        if n == 1:
            return np.zeros(1)
        end = (n - 1) / sample_rate
        a = min(self.attack, end)
        d = min(a + self.decay, end)
        r = max(d, end - self.release)
        t = np.arange(n) / sample_rate
        return np.interp(t, [0.0, a, d, r, end], [0.0, 1.0, self.sustain, self.sustain, 0.0])


@dataclass(eq=False)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    channels = 1

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("only mono buffers are supported")
        if self.samples.size and np.max(np.abs(self.samples)) > 1.0:
            raise ValueError("samples must lie within [-1, 1]")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0


def n_samples(duration: float, sample_rate: int) -> int:
    return max(1, int(math.floor(duration * sample_rate + 0.5)))


def tone_envelope(schema: MappingSchema | None = None) -> Envelope:
    s = (schema or DEFAULT_SCHEMA).event_sounds
    return Envelope(s.tone_attack, s.tone_decay, s.tone_sustain, s.tone_release)


def render_tone(
    freq: float, duration: float, env: Envelope | None = None, sample_rate: int = DEFAULT_SAMPLE_RATE
) -> np.ndarray:
    if not 20.0 <= freq <= 20000.0:
        raise DomainError(f"tone frequency {freq} Hz outside the audible range 20-20000 Hz")
    if freq >= sample_rate / 2:
        raise DomainError(f"tone frequency {freq} Hz is above Nyquist for {sample_rate} Hz")
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    env = env or tone_envelope()
    n = n_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    return np.sin(2.0 * np.pi * freq * t) * env.curve(n, sample_rate)


def _bandpass_coefficients(center: np.ndarray, q: float, sample_rate: int):
    # RBJ cookbook band-pass, 0 dB peak gain, normalized by a0
    w0 = 2.0 * np.pi * center / sample_rate
    alpha = np.sin(w0) / (2.0 * q)
    a0 = 1.0 + alpha
    b0 = alpha / a0
    return b0, np.zeros_like(b0), -b0, (-2.0 * np.cos(w0)) / a0, (1.0 - alpha) / a0


def render_whoosh(
    duration: float,
    seed: int,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    low_hz: float = 800.0,
    high_hz: float = 4000.0,
    q: float = 2.0,
) -> np.ndarray:
    """Seeded white noise through a band-pass whose centre sweeps up from ``low_hz`` to ``high_hz``.

    The filter runs twice (fourth-order slope) and the result is scaled to
    unit peak before a 40/60 rise-fall envelope is applied.
    """
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    n = n_samples(duration, sample_rate)
    rng = np.random.Generator(np.random.PCG64(int(seed) & _U64))
    noise = rng.uniform(-1.0, 1.0, n)
    frac = np.arange(n) / max(n - 1, 1)
    center = low_hz * (high_hz / low_hz) ** frac
    coeffs = _bandpass_coefficients(center, q, sample_rate)
    y = biquad_tv(biquad_tv(noise, *coeffs), *coeffs)
    peak = np.max(np.abs(y))
    if peak > 0:
        y = y / peak
    return y * Envelope(0.4 * duration, 0.0, 1.0, 0.6 * duration).curve(n, sample_rate)


def render_oa_drop(
    duration: float, sample_rate: int = DEFAULT_SAMPLE_RATE, start_hz: float = 80.0, end_hz: float = 40.0
) -> np.ndarray:
    """Sine gliding exponentially from ``start_hz`` to ``end_hz`` with a short attack and quadratic decay."""
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    n = n_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    span = max((n - 1) / sample_rate, 1.0 / sample_rate)
    rate = math.log(end_hz / start_hz) / span
    if rate == 0:
        phase = 2.0 * np.pi * start_hz * t
    else:
        phase = 2.0 * np.pi * start_hz * np.expm1(rate * t) / rate
    u = t / span
    env = np.minimum(t / 0.01, 1.0) * (1.0 - u) ** 2
    return np.sin(phase) * env


def read_insert(path: str, sample_rate: int) -> np.ndarray:
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1 or w.getsampwidth() != 2:
                raise InsertIOError(str(path), "external inserts must be 16-bit PCM mono")
            if w.getframerate() != sample_rate:
                raise InsertIOError(str(path), f"sample rate {w.getframerate()} differs from timeline rate {sample_rate}")
            frames = w.readframes(w.getnframes())
    except InsertIOError:
        raise
    except (OSError, EOFError, wave.Error) as exc:
        raise InsertIOError(str(path), f"cannot read WAV ({exc})") from None
    pcm = np.frombuffer(frames, dtype="<i2").astype(np.float64)
    return np.clip(pcm / 32767.0, -1.0, 1.0)


def derive_seed(master_seed: int, index: int) -> int:
    """Per-event seed: depends only on the master seed and the event's position."""
    state = np.random.SeedSequence([int(master_seed) & _U64, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def render_event(
    event: SonicEvent, schema: MappingSchema | None = None, seed: int = 0, sample_rate: int = DEFAULT_SAMPLE_RATE
) -> np.ndarray | None:
    """Samples for one event with its gain applied, or None when it is silent."""
    schema = schema or DEFAULT_SCHEMA
    s = schema.event_sounds
    kind = event.kind
    if kind is EventKind.CLASS_MARKER:
        return None
    if kind is EventKind.IMPACT_TONE:
        if event.freq is None:
            raise ConfigError("impact tone event lacks a frequency")
        out = render_tone(event.freq, event.duration, tone_envelope(schema), sample_rate)
    elif kind is EventKind.PUB_WHOOSH:
        out = render_whoosh(event.duration, seed, sample_rate, s.whoosh_low_hz, s.whoosh_high_hz, s.whoosh_q)
    elif kind is EventKind.OA_DROP:
        out = render_oa_drop(event.duration, sample_rate, s.oa_start_hz, s.oa_end_hz)
    elif kind is EventKind.EXTERNAL_INSERT:
        if event.path is None:
            raise ConfigError("external insert event lacks a path")
        out = read_insert(event.path, sample_rate)
    else:  # pragma: no cover
        raise ConfigError(f"unhandled event kind {kind!r}")
    return out * event.gain


def buffer_length(timeline: Timeline) -> int:
    # tolerance keeps 49.0 s * 44100 from rounding up to an extra sample
    return max(0, math.ceil(timeline.total_duration * timeline.sample_rate - 1e-6))


def mix(
    timeline: Timeline, schema: MappingSchema | None = None, master_seed: int = 0, threads: int = 1
) -> np.ndarray:
    """Sum every audible event at its onset, without normalization.

    Events may render on several threads; accumulation always happens in
    event order, so the result does not depend on ``threads``.
    """
    schema = schema or DEFAULT_SCHEMA
    rate = timeline.sample_rate
    out = np.zeros(buffer_length(timeline))
    events = timeline.events

    def one(i: int) -> np.ndarray | None:
        return render_event(events[i], schema, derive_seed(master_seed, i), rate)

    if threads > 1 and len(events) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rendered = list(pool.map(one, range(len(events))))
    else:
        rendered = [one(i) for i in range(len(events))]
    for ev, samples in zip(events, rendered):
        if samples is None:
            continue
        start = int(math.floor(ev.onset * rate + 0.5))
        stop = min(start + samples.size, out.size)
        if stop > start:
            out[start:stop] += samples[: stop - start]
    return out


def normalize_peak(samples: np.ndarray, ceiling: float = NORMALIZE_CEILING) -> np.ndarray:
    """Scale down to ``ceiling`` if the peak exceeds it; quieter signals pass untouched."""
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    if peak > ceiling:
        samples = samples * (ceiling / peak)
    return samples


def render(
    timeline: Timeline,
    schema: MappingSchema | None = None,
    master_seed: int = 0,
    threads: int = 1,
    ceiling: float = NORMALIZE_CEILING,
) -> AudioBuffer:
    if not 0 < ceiling <= 1:
        raise ConfigError(f"normalization ceiling must be within (0, 1], got {ceiling}")
    raw = mix(timeline, schema, master_seed, threads)
    return AudioBuffer(normalize_peak(raw, ceiling), timeline.sample_rate)
