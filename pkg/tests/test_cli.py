import csv
import io
import json

import pytest

from freeping.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "z^2", "z^2-2")
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == "freeping/1" and obj["kind"] == "independence"
    assert obj["witness"] == {"a": "2", "b": "1"}
    assert obj["config"]["seed"] == 0 and "workers" not in obj["config"]

    code, out, _ = run(capsys, "certify", "z^2", "z^4")
    assert code == 2
    obj = json.loads(out)
    assert obj["word1"] == [1, 2] and obj["word2"] == [2, 1]
    assert run(capsys, "certify", "z^2", "z^2")[0] == 2
    assert run(capsys, "certify", "z^2", "z^2-1")[0] == 3


def test_parse_and_degenerate_exit_codes(capsys):
    assert run(capsys, "certify", "z^2", "y")[0] == 64
    assert run(capsys, "certify", "z^2", "5")[0] == 65
    assert run(capsys, "certify", "z^2", "[1,0,0]/[0,1,0]")[0] == 65
    assert run(capsys, "height", "z^2", "1/0")[0] == 64
    assert run(capsys, "bogus")[0] == 64
    assert run(capsys)[0] == 64


def test_verify_round_trip(capsys, tmp_path):
    cert = tmp_path / "c.json"
    assert main(["certify", "z^2", "z^2-2", "-o", str(cert)]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == 0 and json.loads(out)["valid"] is True
    assert run(capsys, "--verify", str(cert))[0] == 0

    obj = json.loads(cert.read_text())
    obj["separation"]["n"] = 0
    cert.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == 1 and json.loads(out)["valid"] is False


def test_verify_relation_and_preper(capsys, tmp_path):
    rel = tmp_path / "r.json"
    main(["certify", "z^2", "z^4", "-o", str(rel)])
    pre = tmp_path / "p.json"
    main(["preper", "z^2-1", "0", "-o", str(pre)])
    capsys.readouterr()
    assert run(capsys, "verify", str(rel))[0] == 0
    assert run(capsys, "verify", str(pre))[0] == 0
    assert json.loads(pre.read_text())["result"]["verdict"] == "Preperiodic"


def test_height_command(capsys):
    code, out, _ = run(capsys, "height", "z^2", "2", "--tol", "1e-9")
    assert code == 0
    enc = json.loads(out)["enclosure"]
    assert enc["lower"] <= 0.6931471805599453 <= enc["upper"]
    code, out, _ = run(capsys, "height", "z^2", "3", "--tol", "1e-12", "--max-iterations", "3")
    assert code == 4 and json.loads(out)["status"] == "partial"


def test_preper_command(capsys):
    code, out, _ = run(capsys, "preper", "z^2", "2")
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "Wandering"


def test_growth_command_csv(capsys, tmp_path):
    gens = tmp_path / "gens.json"
    gens.write_text(json.dumps(["z^2", "z^2-2"]))
    code, out, _ = run(capsys, "growth", "--gens", str(gens), "--n", "5")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "size", "entropy_estimate"]
    assert [int(r[1]) for r in rows[1:]] == [2, 6, 14, 30, 62]


def test_growth_command_json_and_budget(capsys, monkeypatch):
    code, out, _ = run(capsys, "growth", "--gen", "z^2", "--gen", "z^4", "--n", "3",
                       "--format", "json", "--delta", "2")
    assert code == 0
    obj = json.loads(out)
    assert obj["sizes"] == [2, 4, 6] and obj["delta"] is None
    monkeypatch.setenv("FREEPING_DIGIT_BUDGET", "50")
    code, out, _ = run(capsys, "growth", "--gen", "z^2", "--gen", "z^2-2", "--n", "8",
                       "--format", "json")
    assert code == 4
    obj = json.loads(out)
    assert obj["status"] == "partial" and obj["config"]["digit_budget"] == 50
    assert obj["sizes"] == [2, 6, 14][: len(obj["sizes"])]


def test_env_override_precedence(monkeypatch):
    import argparse
    from freeping.cli import build_config
    monkeypatch.setenv("FREEPING_MAX_PERIOD", "5")
    monkeypatch.setenv("FREEPING_TOL", "1e-4")
    cfg = build_config(argparse.Namespace(max_period=None, tol=1e-6))
    assert cfg.max_period == 5 and cfg.tol == 1e-6
    monkeypatch.setenv("FREEPING_SEED", "x")
    with pytest.raises(ValueError):
        build_config(argparse.Namespace())


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(max_period=0)


def test_delta_and_scan(capsys):
    code, out, _ = run(capsys, "delta", "--gen=-z", "--gen", "z^2", "--gen", "z^2-2")
    assert code == 0 and json.loads(out)["delta"] == 1
    code, out, _ = run(capsys, "delta", "--gen", "z^2", "--gen", "z^4", "--n-max", "2")
    assert code == 3
    code, out, _ = run(capsys, "scan", "--gen=-z", "--gen", "z^2", "--gen", "z^2-2")
    obj = json.loads(out)
    assert code == 0 and obj["delta_bound"] <= 2
    assert run(capsys, "scan", "--gen", "z^2")[0] == 3


def test_ifs_commands(capsys):
    code, out, _ = run(capsys, "ifs", "sharpness", "--n", "2")
    assert code == 0
    obj = json.loads(out)
    assert abs(float(obj["approx"]) - 0.6180339887) < 1e-9
    assert obj["relation"]["word1"] == [1, 2, 2]

    code, out, _ = run(capsys, "ifs", "attract", "--c1", "1/3", "--t1", "0", "--c2", "1/3",
                       "--t2", "2/3", "--n", "2")
    obj = json.loads(out)
    assert code == 0 and obj["cover_sum"] == "4/9" and obj["gap"] == "1/3"

    code, out, _ = run(capsys, "ifs", "attract", "--c1", "1/2", "--t1", "0", "--c2", "1/2",
                       "--t2", "1/2", "--n", "1", "--format", "csv")
    assert out.splitlines() == ["word,lo,hi", "1,0,1/2", "2,1/2,1"]

    code, out, _ = run(capsys, "ifs", "relations", "--c1", "1/2", "--t1", "0", "--c2", "1/2",
                       "--t2", "1/2", "--L", "8")
    assert code == 0 and json.loads(out)["relations"] == []
    code, _, _ = run(capsys, "ifs", "relations", "--c1", "1/2", "--t1", "1", "--c2", "1/4",
                     "--t2", "3/2", "--L", "2")
    assert code == 2
    assert run(capsys, "ifs", "attract", "--c1", "3", "--t1", "0", "--c2", "1/2",
               "--t2", "1")[0] == 64


def test_outputs_deterministic_across_workers(capsys):
    outs = []
    for w in ("1", "3"):
        code, out, _ = run(capsys, "growth", "--gen", "z^2", "--gen", "z^2-2", "--gen", "z^3",
                           "--n", "3", "--format", "json", "--workers", w)
        outs.append(out)
    assert outs[0] == outs[1]
