import json
import os

import numpy as np
import pytest

from idphase.cli import main
from idphase.signatures import write_matrix_txt


def test_theory_happy_path(tmp_path):
    out = tmp_path / "o"
    assert main(["theory", "--eps-min", "0.01", "--eps-max", "0.99",
                 "--steps", "99", "--out", str(out)]) == 0
    lines = (out / "theory_curve.csv").read_text().splitlines()
    assert len(lines) == 100
    assert (out / "manifest.json").exists()


def test_theory_domain_usage_error(tmp_path):
    assert main(["theory", "--eps-min", "1.5", "--out", str(tmp_path)]) == 1


def test_unknown_flag_is_usage_error(capsys):
    assert main(["theory", "--bogus", "1"]) == 1
    assert "usage error" in capsys.readouterr().err


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 1


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["transition", "--help"])
    assert exc.value.code == 0
    msg = capsys.readouterr().out
    assert "--trials" in msg and "--seed" in msg and "--workers" in msg


def test_certify_identity_matrix(tmp_path, capsys):
    path = tmp_path / "id3.txt"
    write_matrix_txt(path, np.eye(3))
    assert main(["certify", "--matrix", str(path), "--k", "1"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["verdict"] == "identifiable"


def test_certify_k_out_of_range(tmp_path):
    path = tmp_path / "id3.txt"
    write_matrix_txt(path, np.eye(3))
    assert main(["certify", "--matrix", str(path), "--k", "7"]) == 1


def test_statdim_and_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv("IDPHASE_OUT", str(tmp_path / "envout"))
    assert main(["statdim", "--n", "100", "--samples", "10", "--eps", "0.3"]) == 0
    assert (tmp_path / "envout" / "statdim.csv").exists()


def test_config_file_merge_and_flag_priority(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"eps-min": 0.2, "steps": 5}))
    out = tmp_path / "o"
    assert main(["theory", "--config", str(conf), "--steps", "7",
                 "--out", str(out)]) == 0
    lines = (out / "theory_curve.csv").read_text().splitlines()
    assert len(lines) == 8  # flag --steps 7 beats config's 5
    assert lines[1].startswith("0.2,")  # config eps-min applied
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"not-a-flag": 1}))
    assert main(["theory", "--config", str(bad), "--out", str(out)]) == 1


def test_phase_subcommand_writes_csv(tmp_path):
    out = tmp_path / "ph"
    assert main(["phase", "--model", "rademacher", "--n", "40", "--alpha", "0.4",
                 "--eps", "0.1", "--eps", "0.4", "--trials", "4",
                 "--seed", "3", "--workers", "1", "--out", str(out)]) == 0
    lines = (out / "phase_diagram.csv").read_text().splitlines()
    assert len(lines) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["trials"] == 4


def test_phase_rerun_identical_bytes(tmp_path):
    args = ["phase", "--model", "gaussian", "--n", "30", "--alpha", "0.35",
            "--eps", "0.2", "--trials", "3", "--seed", "9", "--workers", "1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a/phase_diagram.csv").read_bytes() == \
           (tmp_path / "b/phase_diagram.csv").read_bytes()


def test_rank_scan_cli(tmp_path):
    out = tmp_path / "rs"
    assert main(["rank-scan", "--n-full", "128", "--n", "30", "--l", "6",
                 "--seeds", "2", "--out", str(out)]) == 0
    assert len((out / "rank_scan.csv").read_text().splitlines()) == 3
    assert main(["rank-scan", "--n-full", "128", "--n", "30", "--n", "40",
                 "--l", "6", "--out", str(out)]) == 1


def test_spectrum_cli(tmp_path):
    out = tmp_path / "sp"
    assert main(["spectrum", "--model", "rademacher", "--n", "40",
                 "--alpha", "0.4", "--out", str(out)]) == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "sigma"
    assert main(["spectrum", "--model", "hadamard", "--n", "40",
                 "--alpha", "0.4", "--out", str(out)]) == 1  # missing --n-full


def test_transition_cli(tmp_path):
    out = tmp_path / "tr"
    assert main(["transition", "--model", "rademacher", "--n", "50",
                 "--alpha", "0.4", "--trials", "6", "--seed", "2",
                 "--resolution", "0.1", "--workers", "1", "--out", str(out)]) == 0
    lines = (out / "transitions.csv").read_text().splitlines()
    assert len(lines) == 2
