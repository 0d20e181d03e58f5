import csv
import io
import json
import subprocess
import sys

import pytest

from mdsmod import cli

TABLE_II = """bits,decimal,digits,prefix,tuple
[0 0 0],0,"(0, 0)","(1, 1)","(1, 1, 1)"
[0 0 1],1,"(0, 1)","(1, 2)","(1, 2, 3)"
[0 1 0],2,"(0, 2)","(1, 3)","(1, 3, 2)"
[0 1 1],3,"(1, 0)","(2, 1)","(2, 1, 3)"
[1 0 0],4,"(1, 1)","(2, 2)","(2, 2, 2)"
[1 0 1],5,"(1, 2)","(2, 3)","(2, 3, 1)"
[1 1 0],6,"(2, 0)","(3, 1)","(3, 1, 2)"
[1 1 1],7,"(2, 1)","(3, 2)","(3, 2, 1)"
"""


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("text,expected", [
    ("0:5:40", [0, 5, 10, 15, 20, 25, 30, 35, 40]),
    ("10", [10]),
    ("0:0.5:1", [0, 0.5, 1]),
    ("0:3:10", [0, 3, 6, 9]),
])
def test_parse_snr(text, expected):
    assert cli.parse_snr(text) == expected


@pytest.mark.parametrize("bad", ["0:0:10", "5:1:0", "a:b:c", "1:2", "0:-1:5"])
def test_parse_snr_errors(bad):
    with pytest.raises(cli.UsageError):
        cli.parse_snr(bad)


def test_ber_row_count(capsys):
    code, out, _ = run(["ber", "--scheme", "apm", "--n", "2", "--k", "2", "--p", "2", "--m", "1",
                        "--snr", "0:5:40", "--detector", "ml", "--seed", "7", "--max-frames", "3000",
                        "--threads", "1"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 9
    assert list(r[0]) == ["snr_db", "ber", "bit_errors", "bits_sent", "frames", "detector", "seed"]
    assert r[0]["seed"] == "7" and r[0]["detector"] == "ml"


def test_ber_is_byte_stable(tmp_path):
    args = ["ber", "--scheme", "iqm", "--n", "3", "--r", "2", "--t", "2", "--m", "2", "--snr", "0:4:12",
            "--detector", "lcml", "--seed", "3", "--max-frames", "20000", "--threads", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--output", str(a)]) == 0
    assert cli.main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_tables_two_exact(capsys):
    code, out, _ = run(["tables", "--which", "2"], capsys)
    assert code == 0 and out == TABLE_II


def test_tables_all(capsys):
    code, out, _ = run(["tables"], capsys)
    assert code == 0
    assert out.count("# table") == 4
    assert "sqrt(2/3)" in out and "-sqrt(3)/2" in out and ",52.0," in out


def test_complexity_example(capsys):
    code, out, _ = run(["complexity", "--scheme", "iqm", "--n", "4", "--r", "2", "--t", "2", "--m", "4"], capsys)
    assert code == 0
    r = {row["detector"]: row for row in rows(out)}
    assert float(r["lcml"]["metrics_per_subcarrier"]) == 52
    assert float(r["ml"]["metrics_per_subcarrier"]) == 1048576


def test_complexity_curves(capsys):
    code, out, _ = run(["complexity", "--curves", "--m", "4"], capsys)
    r = rows(out)
    assert code == 0 and len(r) == 10 and r[0]["n"] == "2"


def test_bound_and_rate(capsys):
    code, out, _ = run(["bound", "--scheme", "iqm", "--n", "2", "--r", "2", "--t", "2", "--snr", "0:10:40"], capsys)
    assert code == 0 and len(rows(out)) == 5
    code, out, _ = run(["rate", "--scheme", "apm", "--n", "2", "--k", "2", "--p", "2", "--snr", "0:10:20",
                        "--samples", "200"], capsys)
    r = rows(out)
    assert code == 0 and list(r[0]) == ["snr_db", "rate_bps", "samples", "stderr"] and r[0]["samples"] == "200"


def test_med(capsys):
    code, out, _ = run(["med", "--scheme", "apm", "--n", "2", "--k", "3", "--p", "2", "--m", "2"], capsys)
    names = [row["quantity"] for row in rows(out)]
    assert code == 0 and names == ["d1", "d2", "d3", "d4", "d_min", "brute_constellation", "brute_codebook"]
    code, out, _ = run(["med", "--scheme", "iqm", "--n", "2", "--r", "2", "--t", "2", "--m", "2"], capsys)
    assert [row["quantity"] for row in rows(out)][:2] == ["d_min", "d1"]


def test_unsupported_configuration(capsys):
    code, _, err = run(["bound", "--scheme", "apm", "--n", "4", "--k", "2", "--p", "8", "--m", "2"], capsys)
    assert code == 3 and "unsupported configuration" in err


def test_invalid_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["ber", "--bogus"])
    assert exc.value.code != 0
    code, _, err = run(["ber", "--scheme", "apm", "--m", "3", "--max-frames", "10"], capsys)
    assert code == 2 and "usage" in err
    code, _, err = run(["ber", "--snr", "5:0:1"], capsys)
    assert code == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scheme": "iqm", "n": 2, "r": 2, "t": 2, "snr": "0:10:30"}))
    code, out, _ = run(["bound", "--config", str(cfg), "--snr", "0:10:10"], capsys)
    assert code == 0 and len(rows(out)) == 2
    cfg.write_text(json.dumps({"schema": "iqm"}))
    code, _, err = run(["bound", "--config", str(cfg)], capsys)
    assert code == 2 and "unknown config keys" in err


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("MDSMOD_SEED", "41")
    code, out, _ = run(["ber", "--snr", "10", "--max-frames", "1000"], capsys)
    assert code == 0 and rows(out)[0]["seed"] == "41"
    code, out, _ = run(["ber", "--snr", "10", "--max-frames", "1000", "--seed", "2"], capsys)
    assert rows(out)[0]["seed"] == "2"
    monkeypatch.setenv("MDSMOD_SEED", "x")
    code, _, _ = run(["ber", "--snr", "10"], capsys)
    assert code == 2


@pytest.mark.parametrize("name", sorted(cli.PRESETS))
def test_presets_map_to_specs(name, tmp_path, capsys):
    code, out, _ = run(["preset", name, "--outdir", str(tmp_path), "--dry-run"], capsys)
    assert code == 0
    specs = [json.loads(line) for line in out.splitlines()]
    assert specs and all(s["output"].startswith(str(tmp_path)) for s in specs)
    for s in specs:
        cli.build_scheme(cli.ExperimentSpec(**s))


def test_preset_runs(tmp_path, capsys):
    code, _, err = run(["preset", "fig4", "--outdir", str(tmp_path), "--max-frames", "500"], capsys)
    assert code == 0 and err.count("wrote") == 3
    assert len((tmp_path / "fig4_bpsk_ml.csv").read_text().splitlines()) == 10


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mdsmod", "tables", "--which", "2"],
                         capture_output=True, text=True, check=True)
    assert res.stdout == TABLE_II
