"""Command-line behaviour: every subcommand, exit codes, config merge,
and byte-identical reruns."""

import json

import pytest

from fsmwm import format_fsm, parse_fsm
from fsmwm.cli import main
from conftest import make_host8


@pytest.fixture
def host_file(tmp_path):
    path = tmp_path / "host.json"
    path.write_text(format_fsm(make_host8()))
    return str(path)


def test_extract_cg(host_file, tmp_path):
    out = tmp_path / "cg.json"
    assert main(["extract-cg", host_file, "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["root"] == 0 and len(doc["vertices"]) == 8


def test_extract_cg_kiss2(tmp_path):
    src = tmp_path / "m.kiss2"
    src.write_text(".i 1\n.o 1\n.r a\n0 a b 1\n1 b a 0\n")
    out = tmp_path / "cg.json"
    assert main(["extract-cg", str(src), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["vertices"] == [0, 1]


def test_lpr_and_machine_output(host_file, tmp_path):
    g = tmp_path / "red.json"
    m = tmp_path / "red_m.json"
    assert main(["lpr", host_file, "-m", "6", "-o", str(g)]) == 0
    assert len(json.loads(g.read_text())["vertices"]) == 6
    assert main(["lpr", host_file, "-m", "6", "--as-machine", "-o", str(m)]) == 0
    assert parse_fsm(m.read_text()).inputs == ("0",)


def test_lprk(host_file, tmp_path):
    out = tmp_path / "lk.json"
    assert main(["lprk", host_file, "-n", "4", "-k", "3", "-o", str(out)]) == 0
    assert len(parse_fsm(out.read_text()).states) == 13


def test_matrix_tool_chain(host_file, tmp_path):
    red = tmp_path / "red.json"
    wm = tmp_path / "wm.json"
    keyf = tmp_path / "key.txt"
    dec = tmp_path / "dec.json"
    assert main(["lpr", host_file, "-m", "5", "-o", str(red)]) == 0
    assert main(["encrypt-matrix", str(red), "--seed", "99",
                 "--out-machine", str(wm), "--out-key", str(keyf)]) == 0
    assert main(["build-decrypt", str(red), "--key", str(keyf),
                 "-o", str(dec)]) == 0
    assert len(parse_fsm(wm.read_text()).states) == 5
    assert len(parse_fsm(dec.read_text()).states) == 5
    assert len(keyf.read_text().split()) == 5


def test_package_verify_pass_and_fail(host_file, tmp_path):
    p = tmp_path / "p.json"
    s = tmp_path / "s.json"
    assert main(["emit-package", host_file, "--mode", "fixed", "-n", "3",
                 "-k", "2", "--out-package", str(p), "--out-secret", str(s)]) == 0
    assert main(["verify", "--package", str(p), "--secret", str(s),
                 "--branch", "1", "--length", "3"]) == 0
    # tamper one transition target in the shipped machine
    doc = json.loads(p.read_text())
    t = doc["watermark"]["transitions"][0]
    t["to"] = next(x for x in doc["watermark"]["states"] if x != t["to"])
    p.write_text(json.dumps(doc))
    results = [
        main(["verify", "--package", str(p), "--secret", str(s),
              "--branch", str(b), "--length", "4"])
        for b in range(2)
    ]
    assert 1 in results


def test_emit_package_deterministic(host_file, tmp_path):
    outs = []
    for i in (1, 2):
        p = tmp_path / f"p{i}.json"
        s = tmp_path / f"s{i}.json"
        assert main(["emit-package", host_file, "--mode", "matrix", "-m", "6",
                     "--out-package", str(p), "--out-secret", str(s)]) == 0
        outs.append((p.read_text(), s.read_text()))
    assert outs[0] == outs[1]


def test_decompose_and_validate(host_file, tmp_path):
    lk = tmp_path / "lk.json"
    assert main(["lprk", host_file, "-n", "3", "-k", "2", "-o", str(lk)]) == 0
    files = {name: tmp_path / name for name in
             ("pi_i.txt", "pi_d.txt", "front.json", "back.json")}
    assert main(["decompose", str(lk), "--mode", "fixed", "-n", "3", "-k", "2",
                 "--out-pi-i", str(files["pi_i.txt"]),
                 "--out-pi-d", str(files["pi_d.txt"]),
                 "--out-front", str(files["front.json"]),
                 "--out-back", str(files["back.json"])]) == 0
    assert main(["validate-partitions", str(lk),
                 "--pi-i", str(files["pi_i.txt"]),
                 "--pi-d", str(files["pi_d.txt"])]) == 0
    # a wrong pair is reported with a failing exit code
    files["pi_i.txt"].write_text(",".join(
        str(s) for s in json.loads(lk.read_text())["states"]) + "\n")
    assert main(["validate-partitions", str(lk),
                 "--pi-i", str(files["pi_i.txt"]),
                 "--pi-d", str(files["pi_d.txt"])]) == 1


def test_decompose_optimal_cap_refusal(host_file, tmp_path, capsys):
    lk = tmp_path / "lk.json"
    assert main(["lprk", host_file, "-n", "4", "-k", "3", "-o", str(lk)]) == 0
    code = main(["decompose", str(lk), "--mode", "optimal", "--cap", "5"])
    assert code == 3
    assert "capped" in capsys.readouterr().err


def test_scan_test_and_decode(host_file, tmp_path, capsys):
    lk = tmp_path / "lk.json"
    assert main(["lprk", host_file, "-n", "3", "-k", "2", "-o", str(lk)]) == 0
    t = tmp_path / "t.txt"
    assert main(["scan-test", str(lk), "--chi", "1", "--omega", "8",
                 "--branch", "1", "--steps", "3", "-o", str(t)]) == 0
    assert main(["decode-scan", str(t)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("setting ")
    assert len(lines) == 1 + 4


def test_attack_command(host_file, tmp_path, capsys):
    lk = tmp_path / "lk.json"
    assert main(["lprk", host_file, "-n", "3", "-k", "2", "-o", str(lk)]) == 0
    out = tmp_path / "att.json"
    assert main(["attack", str(lk), "--chi", "1", "-o", str(out)]) == 0
    assert "resets 2" in capsys.readouterr().err
    parse_fsm(out.read_text())


def test_config_defaults_flags_win(host_file, tmp_path):
    p1 = tmp_path / "p1.json"
    s1 = tmp_path / "s1.json"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rows": 3, "branches": 2, "mode": "fixed",
                               "out_package": str(p1), "out_secret": str(s1)}))
    assert main(["--config", str(cfg), "emit-package", host_file,
                 "--mode", "fixed"]) == 0
    assert json.loads(p1.read_text())["tap"]["n"] == 3
    # explicit flag overrides the config value
    p2 = tmp_path / "p2.json"
    assert main(["--config", str(cfg), "emit-package", host_file,
                 "--mode", "fixed", "-n", "4",
                 "--out-package", str(p2), "--out-secret", str(s1)]) == 0
    assert json.loads(p2.read_text())["tap"]["n"] == 4


def test_bad_input_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["extract-cg", str(bad)]) == 3
    assert main(["extract-cg", str(tmp_path / "missing.json")]) == 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["lpr"])  # missing required --size and source
    assert e.value.code == 2
