import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from polyvi.cli import main
from polyvi.io import ProblemFileError, load_problem, parse_problem
from polyvi.kkt import verify_solution

ROOT = Path(__file__).resolve().parents[1]
EX1 = str(ROOT / "problems" / "example1.json")
EX2 = str(ROOT / "problems" / "example2.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def with_p(path, p, tmp_path, **extra):
    doc = json.loads(Path(path).read_text())
    doc["p"] = list(p)
    doc.update(extra)
    f = tmp_path / "prob.json"
    f.write_text(json.dumps(doc))
    return str(f)


# problem files


def test_parse_rejects_unknown_and_missing_keys():
    doc = json.loads(Path(EX1).read_text())
    with pytest.raises(ProblemFileError):
        parse_problem({**doc, "extra": 1})
    with pytest.raises(ProblemFileError):
        parse_problem({k: v for k, v in doc.items() if k != "K"})
    with pytest.raises(ProblemFileError):
        parse_problem({**doc, "config": {"multistart": 0}})
    with pytest.raises(ProblemFileError):
        parse_problem({**doc, "config": {"bogus": 1}})


def test_config_overrides_resolve_in_order():
    doc = json.loads(Path(EX1).read_text())
    pf = parse_problem({**doc, "config": {"seed": 4, "multistart": 32}}, {"seed": 9})
    assert pf.config.seed == 9 and pf.config.multistart == 32


# solve


def test_solve_example2(capsys):
    code, out, _ = run(capsys, "solve", EX2)
    assert code == 0
    doc = json.loads(out)
    assert [pt["x"] for pt in doc["result"]["points"]] == [[2.0, 3.0]]
    assert doc["seed"] == 0 and len(doc["config_hash"]) == 16


def test_solve_example1(capsys):
    code, out, _ = run(capsys, "solve", EX1)
    assert code == 0
    assert [pt["x"] for pt in json.loads(out)["result"]["points"]] == [[0.0, 0.0]]


def test_missing_K_is_input_error(capsys, tmp_path):
    doc = json.loads(Path(EX1).read_text())
    del doc["K"]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(doc))
    code, out, err = run(capsys, "solve", str(f))
    assert code == 1 and out == "" and "K" in err


def test_malformed_json_and_missing_file(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert run(capsys, "solve", str(f))[0] == 1
    assert run(capsys, "solve", str(tmp_path / "nope.json"))[0] == 1


def test_licq_failure_is_input_error(capsys, tmp_path):
    doc = {"P": {"n": 2, "d": 1, "coeffs": [[0, 1, 0], [0, 0, 1]]},
           "K": {"C": [[1, 0], [1, 0], [-1, 0]], "b": [1, 1, 0]}}
    f = tmp_path / "licq.json"
    f.write_text(json.dumps(doc))
    assert run(capsys, "solve", str(f))[0] == 1


def test_inconclusive_exit_code(capsys, tmp_path, monkeypatch):
    from polyvi import cli
    from polyvi.kkt import SolutionSet

    monkeypatch.setattr(cli, "solve", lambda prob, cfg: SolutionSet((), (), "inconclusive", {}))
    assert run(capsys, "solve", EX1)[0] == 2


def test_solve_round_trip_verifies(capsys, tmp_path):
    path = with_p(EX1, [-1.0, 0.5], tmp_path)
    code, out, _ = run(capsys, "solve", path)
    assert code == 0
    pf = load_problem(path)
    pts = [np.array(pt["x"]) for pt in json.loads(out)["result"]["points"]]
    assert pts and all(verify_solution(pf.problem, x) for x in pts)


def test_stdin_problem():
    text = Path(EX2).read_text()
    proc = subprocess.run([sys.executable, "-m", "polyvi.cli", "solve", "-"], input=text,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["points"][0]["x"] == [2.0, 3.0]


def test_out_file_is_byte_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    path = with_p(EX1, [-1.0, -1.0], tmp_path)
    assert run(capsys, "solve", path, "--out", str(a))[0] == 0
    assert run(capsys, "solve", path, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_flags_reach_config(capsys):
    code, out, _ = run(capsys, "solve", EX2, "--seed", "7", "--threads", "2", "--tol", "1e-9")
    doc = json.loads(out)
    assert doc["seed"] == 7 and doc["config"]["threads"] == 2 and doc["config"]["verify_tol"] == 1e-9


# analysis commands


def test_r0_commands(capsys):
    code, out, _ = run(capsys, "r0", EX1)
    assert code == 0 and json.loads(out)["result"]["status"] == "not_r0"
    code, out, _ = run(capsys, "r0", EX2)
    assert code == 0 and json.loads(out)["result"]["status"] == "r0"


def test_copositive_command(capsys):
    code, out, _ = run(capsys, "copositive", EX1, "--budget", "8")
    assert code == 0 and json.loads(out)["result"]["status"] == "copositive_numeric"


def test_certify_command(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", with_p(EX1, [1.0, 2.0], tmp_path))
    assert code == 0 and json.loads(out)["result"]["conclusion"] == "nonempty_bounded"


# stability commands


def test_sweep_command(capsys):
    code, out, _ = run(capsys, "sweep", EX1, "--grid=-1,0,1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# seed=0 config_hash=")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == 9
    card = {(float(r["p1"]), float(r["p2"])): int(r["cardinality"]) for r in rows}
    assert card[(1.0, 1.0)] == 1 and card[(-1.0, -1.0)] == 2


def test_sweep_json_output(capsys, tmp_path):
    out = tmp_path / "sweep.json"
    assert run(capsys, "sweep", EX2, "--grid=-1,1", "--out", str(out))[0] == 0
    doc = json.loads(out.read_text())
    assert len(doc["result"]["cells"]) == 4


def test_hoelder_command(capsys):
    code, out, _ = run(capsys, "hoelder", EX2, "--anchor=0,0", "--samples", "8")
    assert code == 0
    c = json.loads(out)["result"]["c"]
    assert abs(c - 1 / 3) < 0.02


def test_hoelder_bad_anchor(capsys):
    assert run(capsys, "hoelder", EX2, "--anchor=0,0,0")[0] == 1


def test_generic_command_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["generic", "--n", "2", "--d", "2", "--trials", "10", "--seed", "7"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["seed"] == 7 and doc["result"]["trials"] == 10
