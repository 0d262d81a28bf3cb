import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import band_energy_fraction, cents, fft_peak_hz
from sonimetrics.errors import DomainError, InsertIOError
from sonimetrics.mapping import EventKind, class_frequency, midi_to_freq
from sonimetrics.sequencing import SonicEvent, Timeline, TimingConfig, concat, external_insert, schedule
from sonimetrics.synthesis import (
    AudioBuffer,
    Envelope,
    buffer_length,
    derive_seed,
    mix,
    render,
    render_event,
    render_oa_drop,
    render_tone,
    render_whoosh,
)

SR = 44100


def test_tone_length_and_pitch():
    x = render_tone(440.0, 1.0, sample_rate=SR)
    assert x.size == 44100
    assert abs(fft_peak_hz(x, SR) - 440.0) <= 1.0


def test_tone_has_no_clicks():
    x = render_tone(415.3, 0.4, Envelope(0.01, 0.05, 0.7, 0.1), SR)
    assert abs(x[0]) < 1e-3 and abs(x[-1]) < 1e-3


def test_tone_deterministic():
    assert np.array_equal(render_tone(523.25, 0.4), render_tone(523.25, 0.4))


@pytest.mark.parametrize("freq", [19.9, 20000.1, 0.0])
def test_tone_outside_audible_range(freq):
    with pytest.raises(DomainError):
        render_tone(freq, 0.5)


@pytest.mark.parametrize("cls", range(1, 8))
def test_class_tone_pitch_within_5_cents(cls):
    target = class_frequency(cls)
    x = render_tone(target, 1.0, sample_rate=SR)
    assert abs(cents(fft_peak_hz(x, SR), target)) <= 5.0


def test_whoosh_seeded():
    a, b = render_whoosh(0.35, 1), render_whoosh(0.35, 1)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, render_whoosh(0.35, 2))


@pytest.mark.parametrize("seed", [0, 1, 2, 2**63 + 5])
def test_whoosh_band_limited(seed):
    x = render_whoosh(0.35, seed, SR)
    assert band_energy_fraction(x, SR, 8000.0, SR) < 0.10
    assert abs(x[0]) < 1e-3 and abs(x[-1]) < 1e-3
    assert np.max(np.abs(x)) <= 1.0


def test_whoosh_centre_rises():
    x = render_whoosh(1.0, 3, SR)
    n = x.size // 5
    early, late = fft_peak_hz(x[n : 2 * n], SR, pad=1), fft_peak_hz(x[3 * n : 4 * n], SR, pad=1)
    assert early < late


def test_oa_drop_glide():
    x = render_oa_drop(0.5, SR)
    n = x.size // 10
    assert abs(fft_peak_hz(x[:n], SR) - 80.0) <= 5.0
    assert abs(fft_peak_hz(x[-n:], SR) - 40.0) <= 5.0
    assert band_energy_fraction(x, SR, 0.0, 200.0) >= 0.95
    assert np.array_equal(x, render_oa_drop(0.5, SR))


def test_empty_timeline_is_lead_in_silence():
    buf = render(schedule([]))
    assert len(buf) == SR and not buf.samples.any()


def test_single_tone_timeline_peak():
    ev = SonicEvent(EventKind.IMPACT_TONE, 0.0, 1.0, 0.5, impact_class=3, freq=midi_to_freq(68))
    buf = render(Timeline((ev,), 1.0))
    assert abs(fft_peak_hz(buf.samples, SR) - 415.30) <= 1.0


def test_markers_are_silent():
    ev = SonicEvent(EventKind.CLASS_MARKER, 0.1, 0.4, 0.0, impact_class=5)
    assert render_event(ev) is None
    assert not render(Timeline((ev,), 1.0)).samples.any()


def test_buffer_length_is_ceil():
    assert buffer_length(Timeline((), 49.0)) == 49 * SR
    assert buffer_length(Timeline((), 1.00001)) == 44101


def _dense_timeline():
    mapped = []
    from sonimetrics.ingest import PublicationRecord
    from sonimetrics.mapping import map_record

    for i in range(12):
        mapped.append(map_record(PublicationRecord(f"P{i}", 2000, oa=i % 2 == 0, mncs=i * 0.4), i * 0.4))
    # tight slots so events overlap and the mix exceeds the ceiling
    return schedule(mapped, TimingConfig(slot=0.35, oa_offset=0.05, tone_offset=0.1, lead_in=0.1))


def test_peak_normalization():
    tl = _dense_timeline()
    raw = mix(tl)
    assert np.max(np.abs(raw)) > 0.9
    buf = render(tl)
    assert buf.peak <= 0.9 + 1e-9
    quiet = Timeline((SonicEvent(EventKind.IMPACT_TONE, 0.0, 0.5, 0.3, impact_class=1, freq=349.23),), 0.5)
    assert np.array_equal(render(quiet).samples, mix(quiet))


def test_thread_count_does_not_change_output():
    tl = _dense_timeline()
    ref = render(tl, master_seed=7, threads=1).samples
    for threads in (2, 4, 8):
        assert render(tl, master_seed=7, threads=threads).samples.tobytes() == ref.tobytes()


def test_linearity_before_normalization():
    tl = _dense_timeline()
    total = np.zeros(buffer_length(tl))
    for i, ev in enumerate(tl.events):
        part = render_event(ev, seed=derive_seed(0, i))
        if part is None:
            continue
        start = int(np.floor(ev.onset * SR + 0.5))
        stop = min(start + part.size, total.size)
        total[start:stop] += part[: stop - start]
    assert np.max(np.abs(total - mix(tl, master_seed=0))) <= 1e-6


def test_derive_seed_depends_on_both_inputs():
    seeds = {derive_seed(m, i) for m in range(4) for i in range(16)}
    assert len(seeds) == 64
    assert derive_seed(5, 3) == derive_seed(5, 3)


def test_audio_buffer_rejects_out_of_range():
    with pytest.raises(ValueError):
        AudioBuffer(np.array([0.0, 1.5]))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(0, 0.02), st.floats(0, 0.02), st.floats(0, 1), st.floats(0, 0.02))
def test_envelope_bounds(duration, a, d, s, r):
    x = render_tone(440.0, duration, Envelope(a, d, s, r))
    assert np.max(np.abs(x)) <= 1.0
    assert x[0] == 0.0 and abs(x[-1]) < 1e-3


def _write_pcm(path, samples, rate=SR, channels=1):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(np.asarray(samples, dtype="<i2").tobytes())


def test_external_insert(tmp_path):
    path = tmp_path / "intro.wav"
    _write_pcm(path, [0, 16384, -16384, 32767] * 100)
    seg = external_insert(str(path))
    assert seg.total_duration == pytest.approx(400 / SR)
    buf = render(concat([seg, schedule([])], 0.0))
    # full-scale insert is pulled down to the 0.9 ceiling
    assert buf.peak == pytest.approx(0.9)
    assert buf.samples[1] == pytest.approx(0.9 * 16384 / 32767)


def test_external_insert_errors(tmp_path):
    with pytest.raises(InsertIOError, match="missing.wav"):
        external_insert(str(tmp_path / "missing.wav"))
    stereo = tmp_path / "stereo.wav"
    _write_pcm(stereo, [0, 0] * 10, channels=2)
    with pytest.raises(InsertIOError):
        external_insert(str(stereo))
    rate = tmp_path / "rate.wav"
    _write_pcm(rate, [0] * 10, rate=48000)
    with pytest.raises(InsertIOError, match="sample rate"):
        external_insert(str(rate))
    ev = SonicEvent(EventKind.EXTERNAL_INSERT, 0.0, 0.1, path=str(tmp_path / "gone.wav"))
    with pytest.raises(InsertIOError, match="gone.wav"):
        render(Timeline((ev,), 0.1))
