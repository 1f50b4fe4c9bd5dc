import csv
import io
import json
import math

import numpy as np
import pytest

from secwire import (
    Alphabet,
    DecoderSpec,
    StochasticEncoderSpec,
    SymbolSequence,
    bsc,
    cli,
    dump_channel,
    dump_fsm,
    dump_sequence,
)


def _h2(p):
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def _write_seq(path, symbols, size=2):
    dump_sequence(SymbolSequence(Alphabet(size), tuple(symbols)), path)
    return str(path)


def _write_bsc(path, p):
    dump_channel(bsc(p), path)
    return str(path)


def _identity_fsm_files(tmp_path):
    enc = StochasticEncoderSpec(
        k=1,
        m=1,
        in_size=2,
        out_size=2,
        n_states=1,
        emit={(0, 0): [(0, 1.0)], (0, 1): [(1, 1.0)]},
        next_state=np.zeros((1, 2, 1), dtype=int),
    )
    dec = DecoderSpec(
        k=1,
        m=1,
        in_size=2,
        out_size=2,
        n_states=1,
        out_table=np.arange(2).reshape(1, 2, 1),
        next_state=np.zeros((1, 2, 1), dtype=int),
    )
    epath, dpath = tmp_path / "enc.fsm", tmp_path / "dec.fsm"
    dump_fsm(enc, epath)
    dump_fsm(dec, dpath)
    return str(epath), str(dpath)


def test_parse_reports_complexity(tmp_path, capsys):
    seq = _write_seq(tmp_path / "u.seq", (0, 0, 0, 0, 1, 1, 0, 1, 1, 0))
    assert cli.main(["parse", "--seq", seq]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "parse"
    assert doc["config"]["seq"] == seq
    assert doc["config"]["threads"] == 1
    res = doc["results"]
    assert res["n"] == 10
    assert res["alphabet"] == 2
    assert res["c"] == 6
    assert res["last_incomplete"] is True
    assert res["rho"] > 0


def test_parse_with_side_and_phrases(tmp_path, capsys):
    seq = _write_seq(tmp_path / "u.seq", (0, 1, 0, 0, 0, 1))
    side = _write_seq(tmp_path / "w.seq", (0, 1, 0, 1, 0, 1))
    assert cli.main(["parse", "--seq", seq, "--side", side, "--phrases"]) == 0
    res = json.loads(capsys.readouterr().out)["results"]
    assert len(res["phrases"]) == res["c"]
    assert res["c_joint"] == 4
    assert res["c_w"] == 3
    assert res["multiplicities"] == [1, 1, 2]
    assert math.isclose(res["rho_conditional"], 1 / 3)


def test_capacity_secrecy_closed_form(tmp_path, capsys):
    main = _write_bsc(tmp_path / "m.ch", 0.1)
    wire = _write_bsc(tmp_path / "w.ch", 0.1)
    assert cli.main(["capacity", "--main", main, "--wiretap", wire]) == 0
    res = json.loads(capsys.readouterr().out)["results"]
    assert res["kind"] == "secrecy"
    assert abs(res["value"] - (_h2(0.18) - _h2(0.1))) < 1e-6
    assert res["certified_gap"] <= 1e-8


def test_capacity_gamma_requires_wiretap(tmp_path, capsys):
    main = _write_bsc(tmp_path / "m.ch", 0.1)
    assert cli.main(["capacity", "--main", main, "--gamma", "0.1"]) == 2
    assert "validation error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    missing = str(tmp_path / "nope.seq")
    assert cli.main(["parse", "--seq", missing]) == 2
    assert missing in capsys.readouterr().err


def test_usage_error_exits_64(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["parse"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 64


def test_enumeration_budget_exits_3(tmp_path, capsys):
    rng = np.random.default_rng(0)
    seq = _write_seq(tmp_path / "u.seq", rng.integers(0, 2, 30))
    main = _write_bsc(tmp_path / "m.ch", 0.1)
    wire = _write_bsc(tmp_path / "w.ch", 0.2)
    enc, dec = _identity_fsm_files(tmp_path)
    rc = cli.main(
        [
            "simulate",
            "--enc", enc, "--dec", dec,
            "--main", main, "--wiretap", wire,
            "--seq", seq, "--trials", "2", "--seed", "1",
            "--exact-leakage",
        ]
    )
    assert rc == 3
    assert "budget exceeded" in capsys.readouterr().err


def test_out_writes_file(tmp_path, capsys):
    seq = _write_seq(tmp_path / "u.seq", (0, 1, 1, 0))
    out = tmp_path / "report.json"
    assert cli.main(["parse", "--seq", seq, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert doc["results"]["n"] == 4


def test_csv_format(tmp_path, capsys):
    seq = _write_seq(tmp_path / "u.seq", (0, 1, 1, 0))
    assert cli.main(["parse", "--seq", seq, "--format", "csv"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 2
    header, values = rows
    assert header[0] == "command"
    assert values[0] == "parse"
    assert values[header.index("results.n")] == "4"


def test_feedback_emits_jsonl(tmp_path, capsys):
    rng = np.random.default_rng(2)
    u = rng.integers(0, 2, 8)
    seq = _write_seq(tmp_path / "u.seq", u)
    side = _write_seq(tmp_path / "w.seq", u ^ (rng.random(8) < 0.2))
    rc = cli.main(
        ["feedback", "--seq", seq, "--side", side,
         "--r", "3", "--delta", "0.05", "--sessions", "3", "--seed", "7"]
    )
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    head = json.loads(lines[0])
    assert head["command"] == "feedback"
    for s, line in enumerate(lines[1:]):
        row = json.loads(line)
        assert row["session"] == s
        assert row["acked"] is True


def test_feedback_csv_rows(tmp_path, capsys):
    rng = np.random.default_rng(2)
    u = rng.integers(0, 2, 8)
    seq = _write_seq(tmp_path / "u.seq", u)
    side = _write_seq(tmp_path / "w.seq", u ^ (rng.random(8) < 0.2))
    rc = cli.main(
        ["feedback", "--seq", seq, "--side", side,
         "--r", "3", "--delta", "0.05", "--sessions", "2", "--seed", "7",
         "--format", "csv"]
    )
    assert rc == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 3
    assert rows[0][0] == "command"
    assert "session" in rows[0]


def test_rerun_is_byte_identical(tmp_path, capsys):
    main = _write_bsc(tmp_path / "m.ch", 0.05)
    wire = _write_bsc(tmp_path / "w.ch", 0.2)
    argv = [
        "wyner", "--N", "4", "--secret-bits", "1", "--random-bits", "1",
        "--main", main, "--wiretap", wire, "--trials", "50", "--seed", "3",
    ]
    assert cli.main(argv) == 0
    first = capsys.readouterr().out
    assert cli.main(argv) == 0
    assert capsys.readouterr().out == first


def test_wyner_audit_requires_ell(tmp_path, capsys):
    main = _write_bsc(tmp_path / "m.ch", 0.05)
    wire = _write_bsc(tmp_path / "w.ch", 0.2)
    rc = cli.main(
        ["wyner", "--N", "4", "--secret-bits", "1", "--random-bits", "1",
         "--main", main, "--wiretap", wire, "--trials", "10", "--seed", "3",
         "--audit"]
    )
    assert rc == 2
    assert "--ell" in capsys.readouterr().err


def test_threads_env_echoed_and_validated(tmp_path, capsys, monkeypatch):
    seq = _write_seq(tmp_path / "u.seq", (0, 1, 1, 0))
    monkeypatch.setenv("SECWIRE_THREADS", "3")
    assert cli.main(["parse", "--seq", seq]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["threads"] == 3
    monkeypatch.setenv("SECWIRE_THREADS", "abc")
    assert cli.main(["parse", "--seq", seq]) == 2
    assert "SECWIRE_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("SECWIRE_THREADS", "0")
    assert cli.main(["parse", "--seq", seq]) == 2
