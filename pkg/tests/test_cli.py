import json
import subprocess
import sys
from pathlib import Path

import pytest

from motstem.cli import main, parse_range
from motstem.errors import ParseError

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pi_text_and_json(capsys):
    code, out, _ = run(capsys, "pi", "--field", "Fq=9", "--weight", "0")
    assert code == 0
    assert out.splitlines() == ["Z/2{ηη_s} ⊕ Z/2{η_s}", "≅ Z/2 ⊕ Z/2", "addition law: −4[u,v]ν"]
    code, out, _ = run(capsys, "pi", "--field", "Fq=9", "--weight", "0", "--json")
    data = json.loads(out)
    assert code == 0 and data["field"] == "Fq=9" and data["result"]["additionLaw"] == "twist4nu"


def test_pi_number_field_extension(capsys):
    code, out, _ = run(capsys, "pi", "--field", "numberfield:r2=1", "--weight", "0")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "0 → K^M_2(k)/24 → π₁ → k×/2 ⊕ Z/2 → 0"
    assert "addition law: −12[u,v]ν" in lines


def test_pi_l_complete(capsys):
    code, out, _ = run(capsys, "pi", "--field", "Fq=5", "--weight", "2", "--prime", "2")
    assert code == 0 and out.startswith("Z/8")
    code, out, _ = run(capsys, "pi", "--field", "Fq=5", "--weight", "2", "--prime", "11")
    assert code == 0 and out.strip() == "0"


@pytest.mark.parametrize("argv,code", [
    (["pi", "--field", "Fq=6", "--weight", "0"], 2),
    (["pi", "--field", "Fq=5", "--weight", "0", "--prime", "4"], 2),
    (["sweep", "--field", "Fq=5", "--weights", "3..1"], 2),
    (["pi", "--field", "funcfield:q=4", "--weight", "0", "--prime", "2"], 3),
    (["chart", "--field", "Fq=5", "--prime", "2", "--stems", "0..9"], 1),
    (["chart", "--field", "numberfield:r2=1", "--prime", "2", "--strict"], 4),
    (["verify", "finitefield-table"], 1),
    (["dump", "--dataset", "nope"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    if code:
        assert err.startswith("error:") or argv[0] == "verify"


def test_missing_option_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["pi", "--field", "Fq=5"])
    assert info.value.code == 2
    assert "--weight" in capsys.readouterr().err


def test_inconsistency_exit_code(capsys, monkeypatch):
    import motstem.manss as manss
    from motstem.manss import ChartColumn

    real = manss.apply_differential_rules

    def doctored(*a, **kw):
        col = real(*a, **kw)
        return ChartColumn(col.stem, col.weight, col.prime, col.entries[:-1], col.page, col.notes)

    monkeypatch.setattr(manss, "apply_differential_rules", doctored)
    code, _, err = run(capsys, "pi", "--field", "Fq=5", "--weight", "0", "--prime", "2")
    assert code == 5 and "error:" in err


def test_sweep_text(capsys):
    code, out, _ = run(capsys, "sweep", "--field", "Fq=9", "--weights", "-6..6")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 14
    assert lines[0].startswith("π_{1+nα}S[1/p] over")
    rows = dict(line.split(": ", 1) for line in lines[1:])
    assert rows["n=  2"] == "Z/8" and rows["n= -2"] == "Z/80" and rows["n=  5"] == "0"


def test_sweep_is_deterministic_and_parallel_safe(capsys):
    argv = ["sweep", "--field", "numberfield:r2=1", "--weights", "-4..3", "--json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    assert first == second == parallel
    data = json.loads(first)
    assert [r["weight"] for r in data["results"]] == list(range(-4, 4))


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": "Fq=7", "weight": 1, "json": True}))
    code, out, _ = run(capsys, "--config", str(cfg), "pi")
    assert code == 0 and json.loads(out)["weight"] == 1
    # command-line flags win over the file
    code, out, _ = run(capsys, "--config", str(cfg), "pi", "--weight", "2")
    assert json.loads(out)["weight"] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(capsys, "--config", str(bad), "pi")[0] == 2


def test_chart_formats(capsys, tmp_path):
    code, out, _ = run(capsys, "chart", "--field", "Fq=5", "--prime", "2")
    assert code == 0 and "α₁²⊗π_{1-2α}" in out
    svg = tmp_path / "c.svg"
    code, _, _ = run(capsys, "chart", "--field", "Fq=5", "--prime", "2", "--format", "svg",
                     "--output", str(svg))
    assert code == 0 and svg.read_text(encoding="utf-8").startswith("<svg")
    code, out, _ = run(capsys, "chart", "--field", "Fq=5", "--prime", "2", "--json",
                       "--weight", "-1")
    assert code == 0 and [c["stem"] for c in json.loads(out)] == [0, 1, 2]
    code, out, _ = run(capsys, "chart", "--field", "Fq=5", "--prime", "2", "--page", "Einf")
    assert code == 0 and out.startswith("E∞")
    assert run(capsys, "chart", "--field", "Fq=5", "--prime", "2", "--page", "Einf",
               "--stems", "2..2")[0] == 1


@pytest.mark.parametrize("suite", ["abgrp-oracle", "uct-orders", "twistlaw", "slice-collapse"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    assert code == 0 and out.startswith("PASS")


@pytest.mark.parametrize("suite", ["table1-golden", "table3-golden"])
def test_golden_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", suite, "--golden-dir", str(GOLDEN), "--json")
    assert code == 0 and json.loads(out)["failures"] == []


def test_dump(capsys):
    code, out, _ = run(capsys, "dump", "--dataset", "anss", "--prime", "3")
    data = json.loads(out)
    assert code == 0 and data["prime"] == 3 and data["entries"][0]["name"] == "1"


def test_parse_range():
    assert parse_range("-6..6") == (-6, 6)
    assert parse_range("4") == (4, 4)
    for bad in ("a..b", "5..1", "0..500"):
        with pytest.raises(ParseError):
            parse_range(bad)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "motstem", "pi", "--field", "algclosed:p=0",
                           "--weight", "2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("Z/24{ν}")
