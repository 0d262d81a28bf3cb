import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import EARLY, LATE
from sonimetrics.cli import RunConfig, build_track, main
from sonimetrics.ingest import COLUMNS
from sonimetrics.mapping import EventKind


def _outs(tmp_path, stem="run"):
    return [
        "--out-wav", str(tmp_path / f"{stem}.wav"),
        "--out-midi", str(tmp_path / f"{stem}.mid"),
        "--out-log", str(tmp_path / f"{stem}.json"),
        "--out-report", str(tmp_path / f"{stem}.csv"),
    ]


def test_two_phase_corpus(tmp_path, capsys):
    assert main(["--input", str(EARLY), "--input", str(LATE), *_outs(tmp_path)]) == 0
    summary = capsys.readouterr().out
    assert "publications=64" in summary and "oa=34" in summary
    rows = list(csv.DictReader(io.StringIO((tmp_path / "run.csv").read_text())))
    assert len(rows) == 64
    log = json.loads((tmp_path / "run.json").read_text())
    assert sum(e["kind"] == "OaDrop" for e in log["events"]) == 34 + 1  # plus the legend demo


def test_no_legend_empty_input_is_silence(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(COLUMNS) + "\n")
    wav = tmp_path / "e.wav"
    assert main(["--input", str(empty), "--legend", "false", "--out-wav", str(wav)]) == 0
    data = wav.read_bytes()
    assert len(data) == 44 + 2 * 44100
    assert data[44:] == b"\x00" * (2 * 44100)
    assert main(["--input", str(empty), "--no-legend", "--out-wav", str(wav)]) == 0
    assert wav.read_bytes() == data


def test_missing_input(tmp_path, capsys):
    wav = tmp_path / "x.wav"
    missing = tmp_path / "nope.csv"
    assert main(["--input", str(missing), "--out-wav", str(wav)]) != 0
    assert str(missing) in capsys.readouterr().err
    assert not wav.exists()


def test_bad_record_leaves_no_partial_output(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(",".join(COLUMNS) + "\nA,2000,,-3,,,0,\n")
    wav = tmp_path / "x.wav"
    assert main(["--input", str(EARLY), "--input", str(bad), "--out-wav", str(wav)]) == 1
    assert "bad.csv" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == [bad]


def test_unwritable_output_dir(tmp_path, capsys):
    out = tmp_path / "missing-dir" / "x.wav"
    assert main(["--input", str(EARLY), "--out-wav", str(out)]) == 1
    assert "missing-dir" in capsys.readouterr().err


def test_year_filter_is_reported(tmp_path, capsys, caplog):
    assert main(["--input", str(EARLY), "--input", str(LATE), "--max-pub-year", "2019", "--out-report", str(tmp_path / "r.csv")]) == 0
    assert "publications=56" in capsys.readouterr().out
    assert "8 record(s)" in caplog.text and "excluded" in caplog.text


def test_baselines_and_json_input(tmp_path, capsys):
    recs = [
        {"id": "A", "year": 2019, "month": 2, "citations": 9, "categories": ["X"], "oa": True},
        {"id": "B", "year": 2019, "month": 1, "citations": 0, "categories": "X;Y", "oa": False},
    ]
    (tmp_path / "in.json").write_text(json.dumps(recs))
    (tmp_path / "base.csv").write_text("category,year,expected\nX,2019,3.0\nY,2019,5.0\n")
    report = tmp_path / "r.csv"
    assert main(["--input", str(tmp_path / "in.json"), "--baselines", str(tmp_path / "base.csv"), "--out-report", str(report)]) == 0
    rows = list(csv.DictReader(io.StringIO(report.read_text())))
    assert [(r["id"], r["mncs"], r["class"], r["pitch"]) for r in rows] == [("B", "0.0", "1", "F"), ("A", "3.0", "6", "C#")]


def test_missing_baseline_fails(tmp_path, capsys):
    (tmp_path / "in.csv").write_text(",".join(COLUMNS) + "\nA,2019,,,4,Z,1,\n")
    assert main(["--input", str(tmp_path / "in.csv")]) == 1
    assert "A" in capsys.readouterr().err


def test_schema_and_timing_files(tmp_path):
    (tmp_path / "schema.json").write_text(json.dumps({"octave_anchor": 3, "reference_pitch": 432.0}))
    (tmp_path / "timing.json").write_text(json.dumps({"slot": 1.0, "lead_in": 0.5}))
    cfg = RunConfig(inputs=[str(EARLY)], schema=str(tmp_path / "schema.json"), timing=str(tmp_path / "timing.json"), legend=False)
    track = build_track(cfg)
    assert track.timing.slot == 1.0
    assert track.timeline.total_duration == pytest.approx(0.5 + 32 * 1.0)
    tone = next(e for e in track.timeline.events if e.kind is EventKind.IMPACT_TONE)
    assert str(track.publications[0].pitch) == "G#3"
    assert tone.freq == pytest.approx(432.0 * 2 ** ((56 - 69) / 12))


def test_timing_flag_overrides(tmp_path):
    from sonimetrics.cli import build_parser

    ns = build_parser().parse_args(["--input", "x", "--slot", "1.5", "--lead-in", "0.2"])
    assert (ns.slot, ns.lead_in) == (1.5, 0.2)


def test_bad_seed_rejected():
    with pytest.raises(SystemExit):
        main(["--input", str(EARLY), "--seed", "-1"])


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sonimetrics", "--input", str(EARLY), "--out-report", str(tmp_path / "r.csv")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("publications=32 oa=7")
