"""Command-line driver: metadata files in, WAV/MIDI/JSON/CSV out."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import export
from .errors import ConfigError, SonificationError
from .ingest import filter_years, parse_records, sort_chronological
from .mapping import EventKind, MappedPublication, MappingSchema, map_record
from .normalization import baseline_index, parse_baselines, resolve_mncs
from .sequencing import Timeline, TimingConfig, build_legend, concat, external_insert, schedule
from .synthesis import AudioBuffer, render

log = logging.getLogger("sonimetrics")

U64_MAX = (1 << 64) - 1


@dataclass
class RunConfig:
    inputs: list[str]
    format: str | None = None
    baselines: str | None = None
    schema: str | None = None
    timing: str | None = None
    out_wav: str | None = None
    out_midi: str | None = None
    out_log: str | None = None
    out_report: str | None = None
    seed: int = 0
    legend: bool = True
    min_pub_year: int | None = None
    max_pub_year: int | None = None
    inserts: list[str] = field(default_factory=list)
    threads: int = 1
    timing_overrides: dict[str, float] = field(default_factory=dict)


@dataclass
class Track:
    schema: MappingSchema
    timing: TimingConfig
    segments: list[list[MappedPublication]]
    timeline: Timeline
    dropped: int = 0

    @property
    def publications(self) -> list[MappedPublication]:
        return [m for seg in self.segments for m in seg]


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError:
        raise SonificationError(f"{path}: no such file") from None
    except OSError as exc:
        raise SonificationError(f"{path}: cannot read ({exc.strerror})") from None


def _format_for(path: str, declared: str | None) -> str:
    if declared:
        return declared
    return "json" if path.lower().endswith(".json") else "csv"


def build_track(cfg: RunConfig) -> Track:
    """Everything up to (not including) rendering: ingest, normalize, map, schedule."""
    if not cfg.inputs:
        raise ConfigError("at least one --input is required")
    schema = MappingSchema.from_json(_read(cfg.schema)) if cfg.schema else MappingSchema()
    timing = TimingConfig.from_json(_read(cfg.timing)) if cfg.timing else TimingConfig()
    if cfg.timing_overrides:
        timing = replace(timing, **cfg.timing_overrides)
    index = baseline_index(parse_baselines(_read(cfg.baselines))) if cfg.baselines else {}

    segments: list[list[MappedPublication]] = []
    dropped = 0
    for path in cfg.inputs:
        raw = _read(path)
        try:
            records = parse_records(raw, _format_for(path, cfg.format))
        except SonificationError as exc:
            raise SonificationError(f"{path}: {exc}") from exc
        kept, gone = filter_years(records, cfg.min_pub_year, cfg.max_pub_year)
        if gone:
            log.warning("%s: %d record(s) outside the publication-year filter were excluded", path, len(gone))
            dropped += len(gone)
        segments.append([map_record(r, resolve_mncs(r, index), schema) for r in sort_chronological(kept)])

    parts = [external_insert(p) for p in cfg.inserts]
    if cfg.legend:
        parts.append(build_legend(schema, timing))
    parts += [schedule(seg, timing, schema.event_sounds) for seg in segments]
    return Track(schema, timing, segments, concat(parts, timing.segment_gap), dropped)


def run(cfg: RunConfig) -> int:
    try:
        track = build_track(cfg)
        outputs: dict[str, bytes] = {}
        if cfg.out_wav:
            buffer: AudioBuffer = render(track.timeline, track.schema, cfg.seed, cfg.threads)
            outputs[cfg.out_wav] = export.write_wav(buffer)
        if cfg.out_midi:
            outputs[cfg.out_midi] = export.write_midi(track.timeline, track.schema)
        if cfg.out_log:
            outputs[cfg.out_log] = export.write_event_log(track.timeline, track.publications, track.schema, track.timing)
        if cfg.out_report:
            outputs[cfg.out_report] = export.write_mapping_report(export.report_rows(track.publications))
        for path in outputs:
            parent = os.path.dirname(os.path.abspath(path))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                raise SonificationError(f"{path}: output directory is missing or not writable")
        written: list[str] = []
        try:
            for path, data in outputs.items():
                export.atomic_write(path, data)
                written.append(path)
        except OSError as exc:
            for path in written:
                os.remove(path)
            raise SonificationError(f"{exc.filename or 'output'}: cannot write ({exc.strerror})") from None
    except SonificationError as exc:
        print(f"sonimetrics: error: {exc}", file=sys.stderr)
        return 1

    pubs = track.publications
    oa = sum(m.oa for m in pubs)
    print(
        f"publications={len(pubs)} oa={oa} segments={len(track.segments)} "
        f"events={len(track.timeline)} markers={track.timeline.count(EventKind.CLASS_MARKER)} "
        f"duration={track.timeline.total_duration:.3f}s"
    )
    return 0


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sonimetrics",
        description="Sonify publication metadata: publication whooshes, OA drops and impact-class tones.",
    )
    p.add_argument("--input", dest="inputs", action="append", required=True, metavar="PATH",
                   help="publication file; repeat for consecutive segments (e.g. early and late phase)")
    p.add_argument("--format", choices=("csv", "json"), help="input format (default: by file extension, else csv)")
    p.add_argument("--baselines", metavar="PATH", help="category,year,expected CSV for computing MNCS")
    p.add_argument("--schema", metavar="PATH", help="JSON mapping schema overriding the F-minor default")
    p.add_argument("--timing", metavar="PATH", help="JSON timing config")
    p.add_argument("--out-wav", metavar="PATH")
    p.add_argument("--out-midi", metavar="PATH")
    p.add_argument("--out-log", metavar="PATH")
    p.add_argument("--out-report", metavar="PATH")
    p.add_argument("--seed", type=_u64, default=0, help="master seed for noise generators (default 0)")
    p.add_argument("--legend", type=_bool, nargs="?", const=True, default=True, metavar="BOOL",
                   help="prepend the legend segment (default true)")
    p.add_argument("--no-legend", dest="legend", action="store_false")
    p.add_argument("--min-pub-year", type=int, metavar="YEAR")
    p.add_argument("--max-pub-year", type=int, metavar="YEAR",
                   help="exclude papers published after YEAR, e.g. to enforce a citation window")
    p.add_argument("--insert", dest="inserts", action="append", default=[], metavar="WAV",
                   help="16-bit mono WAV played before everything else; repeatable")
    p.add_argument("--threads", type=int, default=1, help="render threads (output is identical for any value)")
    for name in ("slot", "lead_in", "segment_gap", "tone_duration"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, metavar="SECONDS")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="sonimetrics: %(message)s", level=logging.INFO)
    ns = build_parser().parse_args(argv)
    overrides = {
        k: getattr(ns, k) for k in ("slot", "lead_in", "segment_gap", "tone_duration") if getattr(ns, k) is not None
    }
    cfg = RunConfig(
        inputs=ns.inputs,
        format=ns.format,
        baselines=ns.baselines,
        schema=ns.schema,
        timing=ns.timing,
        out_wav=ns.out_wav,
        out_midi=ns.out_midi,
        out_log=ns.out_log,
        out_report=ns.out_report,
        seed=ns.seed,
        legend=ns.legend,
        min_pub_year=ns.min_pub_year,
        max_pub_year=ns.max_pub_year,
        inserts=ns.inserts,
        threads=max(1, ns.threads),
        timing_overrides=overrides,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
