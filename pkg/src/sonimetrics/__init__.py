"""Parameter-mapping sonification of bibliometric publication data.

Publication events become noise whooshes, open-access papers add a
descending sub-bass drop, and field-normalized citation impact (MNCS)
selects one of seven scale tones.
"""

from ._ext import BACKEND as KERNEL_BACKEND
from .errors import (
    ConfigError,
    DomainError,
    InsertIOError,
    MissingBaselineError,
    ParseError,
    RangeError,
    SonificationError,
    ValidationError,
)
from .export import (
    MappingReportRow,
    read_event_log,
    report_rows,
    write_event_log,
    write_mapping_report,
    write_midi,
    write_records,
    write_wav,
)
from .ingest import PublicationRecord, parse_records, sort_chronological
from .mapping import (
    DEFAULT_SCHEMA,
    EventKind,
    EventSounds,
    ImpactBin,
    MappedPublication,
    MappingSchema,
    PitchLabel,
    class_to_pitch,
    classify,
    map_record,
    midi_to_freq,
    pitch_to_midi,
    round_one_decimal,
)
from .normalization import CitationBaseline, compute_mncs, resolve_mncs
from .sequencing import SonicEvent, Timeline, TimingConfig, build_legend, concat, schedule
from .synthesis import AudioBuffer, Envelope, render, render_oa_drop, render_tone, render_whoosh

__version__ = "0.1.0"
