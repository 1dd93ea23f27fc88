import csv
import io
import json
from fractions import Fraction

import pytest

from rieszip.cli.main import main
from rieszip.cli.plotting import emit_plotdata


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_seq_gen_stdout(capsys):
    code, out, _ = run(capsys, "seq", "gen", "--family", "erdos-taylor", "--count", "5")
    assert code == 0
    assert json.loads(out)["terms"] == ["1", "2", "5", "16", "65"]


def test_pipeline_through_files(capsys, tmp_path):
    seq = tmp_path / "seq.json"
    spec = tmp_path / "spec.json"
    assert main(["seq", "gen", "--family", "pow2sq", "--count", "12", "--file", str(seq)]) == 0
    assert main(["riesz", "choose", "--seq", str(seq), "--file", str(spec)]) == 0
    d = json.loads(spec.read_text())
    assert d["orders"] == [2, 4, 6, 10, 16, 25, 41, 65, 101] and d["start"] == 3
    code, out, _ = run(capsys, "riesz", "certify", "--spec", str(spec))
    assert code == 0 and json.loads(out)["increasing"] is True
    targets = tmp_path / "targets.json"
    n = 2 ** 9 + 2 ** 16
    targets.write_text(json.dumps([str(n), "3"]))
    code, out, _ = run(capsys, "riesz", "coeff", "--spec", str(spec), "--targets", str(targets))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["digits"] == "3:1 4:1" and rows[1]["digits"] == "none"
    assert Fraction(rows[1]["value"]) == 0
    code, out, _ = run(capsys, "riesz", "bound", "--spec", str(spec), "--subset", "3,4")
    assert code == 0 and "bound" in json.loads(out)
    code, out, _ = run(capsys, "ip", "check", "--seq", str(seq), "--source", str(spec),
                       "--k0", "6", "--width", "6")
    assert json.loads(out)["worst_subset"] == [6, 7, 8, 9, 10, 11]


def test_dissociation_failure_exit_code(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"terms": ["1", "4", "100"], "orders": [2, 2]}))
    code, _, err = run(capsys, "riesz", "certify", "--spec", str(spec))
    assert code == 2 and "k=1" in err


def test_kernel_commands(capsys):
    code, out, _ = run(capsys, "kernel", "fejer", "--m", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["frequency"] for r in rows] == ["-2", "-1", "0", "1", "2"]
    code, out, _ = run(capsys, "kernel", "kahane", "--j", "7")
    assert "127/343" in out
    code, out, _ = run(capsys, "kernel", "phi-bound")
    assert json.loads(out)["c"] == "54" and json.loads(out)["gamma"] == "31/96"
    code, out, _ = run(capsys, "kernel", "nonneg", "--j", "7", "--grid", "64")
    assert code == 0 and json.loads(out)["grid"] == 64


def test_group_commands(capsys, tmp_path):
    seq = tmp_path / "th1.json"
    main(["seq", "gen", "--family", "th1", "--count", "5", "--file", str(seq)])
    code, out, _ = run(capsys, "group", "witness", "--seq", str(seq), "--depth", "5",
                       "--avoid-lattice")
    cert = json.loads(out)
    assert code == 0 and cert["degenerate"] is False and len(cert["entries"]) == 4
    code, out, _ = run(capsys, "group", "et", "--theta", "3/8", "--terms", "30")
    assert json.loads(out)["holds"] is True
    code, out, _ = run(capsys, "group", "scan", "--seq", str(seq), "--theta", "1/3", "--p", "inf",
                       "--terms", "10")
    assert json.loads(out)["p"] == "inf"


def test_ip_commands(capsys):
    code, out, _ = run(capsys, "ip", "lemma1", "--l", "2", "--q", "1")
    d = json.loads(out)
    assert d["exact"] and d["top_multiple"] == "460"
    code, out, _ = run(capsys, "ip", "section62", "--qmax", "2", "--theta", "1/3,2/7")
    assert [r["pairs_checked"] for r in json.loads(out)] == [52, 52]


def test_oracle_commands(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"terms": ["1", "3", "15"], "orders": [1, 2, 3]}))
    a = tmp_path / "a.csv"
    assert main(["oracle", "expand", "--spec", str(spec), "--file", str(a)]) == 0
    assert len(a.read_text().splitlines()) == 1 + 105
    code, out, _ = run(capsys, "oracle", "compare", "--a", str(a), "--b", str(a))
    assert code == 0 and json.loads(out)["passed"]
    b = tmp_path / "b.csv"
    b.write_text("frequency,value,radius\n0,0.5,0\n")
    code, out, _ = run(capsys, "oracle", "compare", "--a", str(a), "--b", str(b))
    assert code == 1 and not json.loads(out)["passed"]


def test_run_and_plotdata(capsys, tmp_path):
    out = tmp_path / "out"
    code, stdout, _ = run(capsys, "--out", str(out), "run", "prop3-demo")
    assert code == 0 and "pass" in stdout
    report = out / "prop3_demo.json"
    d = json.loads(report.read_text())
    assert d["passed"] and d["files"] == ["prop3_demo.png", "prop3_demo_coefficients.csv"]
    assert all(c["passed"] for c in d["checks"])
    assert (out / "prop3_demo.png").read_bytes()[:4] == b"\x89PNG"
    code, text, _ = run(capsys, "plotdata", "--report", str(report), "--kind", "coefficients")
    assert code == 0 and text.splitlines()[0].startswith("n,")
    code, _, err = run(capsys, "plotdata", "--report", str(report), "--kind", "sumset")
    assert code == 1 and "no 'sumset' series" in err
    with pytest.raises(SystemExit):
        main(["plotdata", "--report", str(report), "--kind", "nope"])
    with pytest.raises(ValueError):
        emit_plotdata(d, "nope")


def test_run_parameter_overrides(capsys, tmp_path):
    code, _, _ = run(capsys, "run", "lemma1", "--l", "3", "--q", "0", "--out", str(tmp_path))
    assert code == 0
    d = json.loads((tmp_path / "lemma1.json").read_text())
    assert d["params"] == {"l": 3, "q": 0}
    code, _, err = run(capsys, "run", "lemma1", "--bogus", "1", "--out", str(tmp_path))
    assert code == 1 and "bogus" in err


def test_global_flags_after_subcommand(capsys):
    code, out, _ = run(capsys, "kernel", "fejer", "--m", "1", "--precision", "64")
    assert code == 0
    code, out2, _ = run(capsys, "--precision", "64", "kernel", "fejer", "--m", "1")
    assert out == out2
