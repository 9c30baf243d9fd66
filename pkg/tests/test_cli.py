import json
import subprocess
import sys

import pytest

from constgen.cli import EXIT_INPUT, EXIT_NOCERT, EXIT_PASS, EXIT_WITNESS, main
from constgen.errors import SpecSyntaxError
from constgen.specfile import parse_spec

Z5SQ = "group abelian { p = 5; rank = 2; }\n"
C2_TORSION = "group torsion { rank = 2; }\n"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def spec_file(tmp_path):
    def write(text, name="g.spec"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_spec_examples():
    (g,) = parse_spec("group scalar { p=3; rank=2; lambda=4; }").groups
    assert str(g.form) == "Plus(1)"
    with pytest.raises(SpecSyntaxError):
        parse_spec("group scalar { p=2; rank=2; lambda=5; s... }")


def test_verify_star_pass(spec_file, capsys):
    code, out, _ = run(["verify", "star", spec_file(Z5SQ), "--max-index", "2"], capsys)
    assert code == EXIT_PASS
    rep = json.loads(out)
    assert rep["results"][0]["outcome"] == "Pass"
    assert [c["mode"] for c in rep["certificate"]] == ["Exact"]
    assert rep["timing"] is None


def test_verify_star_witness(spec_file, capsys):
    code, out, _ = run(["verify", "star", spec_file(C2_TORSION), "--max-index", "1"], capsys)
    assert code == EXIT_WITNESS
    w = json.loads(out)["results"][0]["witness"]
    assert (w["index"], w["d_found"], w["d_expected"], w["verified"]) == (2, 2, 3, True)


def test_table1_p3(capsys):
    code, out, _ = run(["table1", "--p", "3", "--max-dim", "4"], capsys)
    assert code == EXIT_PASS
    rows = json.loads(out)["results"][0]["rows"]
    assert {(r["n1"], r["n2"], r["n3"], r["label"]) for r in rows} == {
        (2, 0, 0, "T 3.1"), (3, 0, 0, "T 3.1"), (4, 0, 0, "T 3.1"), (0, 1, 0, "T 3.2")}


def test_exit_code_no_certificate(spec_file, capsys):
    doc = "group scalar { p = 3; rank = 2; lambda = 4; }\n"
    code, _, err = run(["verify", "star", spec_file(doc), "--max-index", "2", "--precision", "2"], capsys)
    assert code == EXIT_NOCERT and "certificate" in err


@pytest.mark.parametrize("argv", [
    ["verify", "star", "catalog:no-such-entry"],
    ["verify", "bogus", "x"],
    ["decompose", "[[1, 1], [0, 1]]", "--p", "2"],
    ["decompose", "--p", "4", "--synth", "1,0,0"],
    ["table1", "--p", "3"],
    ["lattice", "{not json"],
])
def test_exit_code_input_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == EXIT_INPUT


def test_missing_file_and_bad_syntax(spec_file, capsys):
    assert run(["profile", "/nonexistent/x.spec"], capsys)[0] == EXIT_INPUT
    code, _, err = run(["profile", spec_file("group abelian { p = 3 rank = 2; }")], capsys)
    assert code == EXIT_INPUT and "line 1" in err


def test_decompose_and_synth(capsys):
    code, out, _ = run(["decompose", "[[0, 1], [1, 0]]", "--p", "2"], capsys)
    assert code == EXIT_PASS
    r = json.loads(out)["results"][0]
    assert r["counts"] == [0, 0, 1] and r["table1_label"] == "T 2.6" and r["rational_d"] == 1
    code, out, _ = run(["decompose", "--p", "3", "--synth", "2,1,1", "--seed", "5"], capsys)
    r = json.loads(out)["results"][0]
    assert code == EXIT_PASS and r["counts"] == [2, 1, 1] and r["n"] == 7


def test_lattice_command(tmp_path, capsys):
    good = tmp_path / "l.json"
    good.write_text(json.dumps({"p": 3, "dim": 2, "brackets": {"1,2": [0, 3]}}))
    assert run(["lattice", str(good), "--max-index", "2"], capsys)[0] == EXIT_PASS
    bad = tmp_path / "u.json"
    bad.write_text(json.dumps({"p": 5, "dim": 3, "brackets": {"1,3": [0, 5, 0]}}))
    assert run(["lattice", str(bad), "--max-index", "1"], capsys)[0] == EXIT_WITNESS
    jac = tmp_path / "j.json"
    jac.write_text(json.dumps({"p": 3, "dim": 3, "brackets": {"1,2": [0, 0, 1], "2,3": [0, 1, 0]}}))
    assert run(["lattice", str(jac)], capsys)[0] == EXIT_INPUT


def test_reports_are_deterministic(spec_file, capsys):
    path = spec_file(C2_TORSION + "group maxclass3 {}\n")
    outs = [run(["verify", "star", path, "--max-index", "1"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(["profile", "catalog:maxclass3", "--max-index", "1"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_timing_is_opt_in(spec_file, capsys):
    _, out, _ = run(["verify", "star", spec_file(Z5SQ), "--max-index", "1", "--timing"], capsys)
    assert json.loads(out)["timing"]["seconds"] >= 0


def test_recheck_round_trip(spec_file, tmp_path, capsys):
    spec = spec_file(C2_TORSION)
    report = tmp_path / "rep.json"
    code, _, _ = run(["verify", "star", spec, "--max-index", "1", "--out", str(report)], capsys)
    assert code == EXIT_WITNESS and report.exists()
    code, out, _ = run(["recheck", spec, str(report)], capsys)
    results = json.loads(out)["results"]
    assert code == EXIT_PASS and results and all(r["matches"] for r in results)
    # a tampered witness no longer matches
    data = json.loads(report.read_text())
    data["results"][0]["witnesses_by_d"][0]["generators"].pop()
    report.write_text(json.dumps(data))
    code, out, _ = run(["recheck", spec, str(report)], capsys)
    assert code == EXIT_WITNESS
    assert not all(r["matches"] for r in json.loads(out)["results"])


def test_en_and_schreier(capsys):
    code, out, _ = run(["verify", "en", "catalog:scalar-p3-d2-s1", "--max-index", "1"], capsys)
    assert code == EXIT_PASS
    code, out, _ = run(["verify", "en", "catalog:scalar-p3-d2-s1", "--max-index", "1", "--n", "1"], capsys)
    assert code == EXIT_WITNESS
    code, out, _ = run(["verify", "schreier", "catalog:maxclass3", "--max-index", "1"], capsys)
    assert json.loads(out)["results"][0]["free_like"] is False


def test_text_format_and_catalog(capsys):
    code, out, _ = run(["catalog", "list", "--format", "text"], capsys)
    assert code == EXIT_PASS and "maxclass3" in out and "unipotent-p5" in out
    code, out, _ = run(["verify", "star", "catalog:unipotent-p5", "--max-index", "1", "--format", "text"], capsys)
    assert code == EXIT_WITNESS and "Witness" in out


def test_stdin_spec(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(Z5SQ))
    assert run(["verify", "star", "-", "--max-index", "1"], capsys)[0] == EXIT_PASS


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "constgen.cli", "table1", "--p", "2", "--max-dim", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "T 2.6" in proc.stdout
