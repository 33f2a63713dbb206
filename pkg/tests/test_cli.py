"""Command-line interface: configs, commands, exit codes."""
import json
from pathlib import Path

import pytest

from pvtransfer.cli import (
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_OK,
    main,
    parse_config,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_json(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


class TestConfigParsing:
    def test_minimal_config(self):
        cfg = parse_config({
            "initial": {"r_km": 6553.71, "vr_ms": 74.57,
                        "vtheta_ms": 6994.07},
            "final": {"vfr_ms": 2913.68, "vftheta_ms": 6685.04,
                      "rf_km": 11595.0},
        })
        assert cfg.kind == "I" and cfg.coplanar
        assert cfg.initial.r == pytest.approx(6553.71e3)
        assert cfg.spec().n_unknowns == 2

    def test_elements_initial_state(self):
        cfg = parse_config({
            "initial": {"l_km": 5271.04, "e": 0.195904, "f_deg": 177.49},
            "final": {"vfr_ms": 2913.68, "vftheta_ms": 6685.04,
                      "rf_km": 11595.0},
        })
        assert cfg.initial.r == pytest.approx(6553.71e3, rel=1e-5)

    def test_missing_section_rejected(self, tmp_path):
        path = write_json(tmp_path, "bad.json",
                          {"initial": {"r_km": 7000, "vr_ms": 0,
                                       "vtheta_ms": 7500}})
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_kind_constraint_mismatch_rejected(self, tmp_path):
        path = write_json(tmp_path, "bad.json", {
            "kind": "II",
            "initial": {"r_km": 6553.71, "vr_ms": 74.57,
                        "vtheta_ms": 6994.07},
            "final": {"vfr_ms": 2913.68, "vftheta_ms": 6685.04,
                      "rf_km": 11595.0},   # no dtheta for kind II
        })
        assert main(["solve", "--config", path]) == EXIT_CONFIG

    def test_invalid_json_rejected(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        assert main(["solve", "--config", str(p)]) == EXIT_CONFIG

    def test_config_roundtrip(self):
        raw = json.load(open(CONFIGS / "kind3_noncoplanar_i10.json"))
        cfg = parse_config(raw)
        dumped = cfg.to_dict()
        assert dumped["final"]["dt_s"] == raw["final"]["dt_s"]
        assert dumped["guess"]["lambda0"] == raw["guess"]["lambda0"]


class TestCommands:
    def test_dataset_dump(self, capsys):
        assert main(["dataset"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert "table6" in out

    def test_solve_writes_json(self, tmp_path, capsys):
        out = tmp_path / "sol.json"
        code = main(["solve", "--config",
                     str(CONFIGS / "kind3_noncoplanar_i10.json"),
                     "--out", str(out), "--format", "json"])
        assert code == EXIT_OK
        sol = json.loads(out.read_text())
        assert sol["converged"]
        assert sol["dv_total_ms"] == pytest.approx(3991.46, abs=4.0)
        assert len(sol["burn_schedule"]) >= 3

    def test_propagate_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = main(["propagate", "--config",
                     str(CONFIGS / "verify_kind1.json"),
                     "--out", str(out)])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("t,r,vr")
        assert len(lines) > 2000

    def test_propagate_requires_explicit_guess(self, tmp_path):
        code = main(["propagate", "--config",
                     str(CONFIGS / "kind1_coplanar.json")])
        assert code == EXIT_CONFIG

    def test_verify_clean(self, capsys):
        code = main(["verify", "--config",
                     str(CONFIGS / "verify_kind1.json")])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["violations"] == []
        assert report["reduced_hamiltonian_scaled_max"] < 1e-9

    def test_verify_detects_corrupted_dynamics(self, capsys):
        code = main(["verify", "--config",
                     str(CONFIGS / "verify_kind1.json"),
                     "--corrupt-dlam", "1.001"])
        assert code == EXIT_INVARIANT
        report = json.loads(capsys.readouterr().out)
        assert report["violations"]
