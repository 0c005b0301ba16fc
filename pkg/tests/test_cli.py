import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from mimowave import optimal_sinr, Waveform
from mimowave.cli import (
    ConfigError,
    EXIT_BUDGET,
    EXIT_CONFIG,
    load_config,
    load_solution,
    main,
    similarity_tolerance,
)
from mimowave.solver import build_feasible_structure
from mimowave.model import chirp_reference

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
REFERENCE = CONFIGS / "reference_scenario.cfg"
TINY = CONFIGS / "tiny_oracle.cfg"


def write_cfg(tmp_path, text, name="test.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


TINY_TEXT = """
scenario.n_tx = 2
scenario.n_rx = 3
scenario.n_samples = 2
scenario.target_angle_deg = 10
scenario.target_power_db = 10
scenario.interferer_angles_deg = -30
scenario.interferer_powers_db = 25
scenario.noise_power_db = 0
constellation.omega = 8
constellation.eta = 2
solver.seed = 1
output.formats = csv, json
"""


class TestLoadConfig:
    def test_reference_config_matches_expected_scene(self):
        cfg = load_config(REFERENCE)
        sc = cfg.scenario
        assert (sc.n_tx, sc.n_rx, sc.n_samples) == (4, 8, 8)
        assert sc.target_angle == pytest.approx(np.deg2rad(15))
        assert sc.target_power_db == 10
        assert [round(np.rad2deg(a)) for a, _ in sc.interferers] == [-50, -10, 40]
        assert all(p == 30 for _, p in sc.interferers)
        assert sc.noise_power_db == 0
        assert (cfg.omega, cfg.eta) == (16, 6)

    def test_odd_eta_rejected(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT.replace("constellation.eta = 2",
                                                  "constellation.eta = 5"))
        with pytest.raises(ConfigError, match="eta must be even"):
            load_config(p)

    def test_eta_above_omega_rejected(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT.replace("constellation.eta = 2",
                                                  "constellation.eta = 20"))
        with pytest.raises(ConfigError, match="eta exceeds omega"):
            load_config(p)

    def test_unknown_key_named(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT + "scenario.bogus = 1\n")
        with pytest.raises(ConfigError, match="scenario.bogus"):
            load_config(p)

    def test_parse_error_carries_line_number(self, tmp_path):
        p = write_cfg(tmp_path, "scenario.n_tx = 2\nnot a key value line\n")
        with pytest.raises(ConfigError, match=":2:"):
            load_config(p)

    def test_missing_required_key(self, tmp_path):
        p = write_cfg(tmp_path, "scenario.n_tx = 2\n")
        with pytest.raises(ConfigError, match="scenario.n_rx"):
            load_config(p)

    def test_overrides_win(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        cfg = load_config(p, mode="sweep", out_dir=str(tmp_path / "o"), seed=77)
        assert cfg.mode == "sweep"
        assert cfg.out_dir == tmp_path / "o"
        assert cfg.solver.seed == 77


class TestRunModes:
    def test_solve_writes_trace_and_solution(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        out = tmp_path / "out"
        assert main(["solve", "--config", str(p), "--out", str(out)]) == 0
        trace = (out / "sinr_trace.csv").read_text()
        assert trace.splitlines()[0] == "iter,sinr_db_relaxed"
        payload = json.loads((out / "solution.json").read_text())
        assert len(payload["entries"]) == 4
        assert payload["similarity_tolerance"] == pytest.approx(similarity_tolerance(8, 2))

    def test_solution_roundtrip_rescores(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        out = tmp_path / "out"
        main(["solve", "--config", str(p), "--out", str(out)])
        payload = json.loads((out / "solution.json").read_text())
        entries = load_solution(out / "solution.json")
        cfg = load_config(p)
        w = Waveform(entries, modulus=cfg.scenario.modulus, constant_modulus=True)
        rescored = 10 * np.log10(optimal_sinr(cfg.scenario, w))
        assert rescored == pytest.approx(payload["sinr_db"], rel=1e-9)
        # every reloaded entry is a member of its similarity set
        s0 = chirp_reference(cfg.scenario.n_tx, cfg.scenario.n_samples)
        _, sets, _, _ = build_feasible_structure(s0, cfg.omega, cfg.eta)
        for k, z in enumerate(entries):
            assert np.min(np.abs(sets[k].points - z)) < 1e-12

    def test_baseline_mode(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        out = tmp_path / "out"
        assert main(["baseline", "--config", str(p), "--out", str(out)]) == 0
        assert (out / "sinr_trace.csv").exists()

    def test_beampattern_mode(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        out = tmp_path / "out"
        assert main(["beampattern", "--config", str(p), "--out", str(out)]) == 0
        lines = (out / "beampattern.csv").read_text().splitlines()
        assert lines[0] == "theta_deg,power_db,power_db_normalized"
        assert len(lines) == 722

    def test_oracle_mode_gaps_nonnegative(self, tmp_path):
        out = tmp_path / "out"
        assert main(["oracle", "--config", str(TINY), "--out", str(out)]) == 0
        lines = (out / "oracle_gap.csv").read_text().splitlines()
        assert lines[0] == "trial,oracle_obj,cam_obj,gap_db"
        for line in lines[1:]:
            assert float(line.split(",")[3]) >= -1e-12

    def test_sweep_mode_equal_epsilon_column(self, tmp_path):
        text = TINY_TEXT + "sweep.n_values = 2\nsweep.omega_values = 16, 32, 48\nsweep.eta_values = 6, 12, 18\n"
        p = write_cfg(tmp_path, text)
        out = tmp_path / "out"
        assert main(["sweep", "--config", str(p), "--out", str(out)]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "n,omega,eta,epsilon,cam_sinr_db,baseline_sinr_db,gap_db"
        eps = {line.split(",")[3] for line in lines[1:]}
        assert len(lines) == 4
        assert len(eps) == 1

    def test_rerun_is_byte_identical(self, tmp_path):
        p = write_cfg(tmp_path, TINY_TEXT)
        digests = []
        for d in ("a", "b"):
            out = tmp_path / d
            main(["solve", "--config", str(p), "--out", str(out), "--seed", "5"])
            h = hashlib.sha256()
            for name in sorted(f.name for f in out.iterdir()):
                h.update((out / name).read_bytes())
            digests.append(h.hexdigest())
        assert digests[0] == digests[1]


class TestExitCodes:
    def test_config_error_exit(self, tmp_path, capsys):
        p = write_cfg(tmp_path, "scenario.n_tx = banana\n")
        code = main(["solve", "--config", str(p), "--out", str(tmp_path / "o")])
        assert code == EXIT_CONFIG
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "config_error"

    def test_missing_file_exit(self, tmp_path, capsys):
        code = main(["solve", "--config", str(tmp_path / "nope.cfg")])
        assert code == EXIT_CONFIG

    def test_oracle_budget_exit(self, tmp_path, capsys):
        text = TINY_TEXT + "oracle.trials = 1\noracle.budget = 2\n"
        p = write_cfg(tmp_path, text)
        code = main(["oracle", "--config", str(p), "--out", str(tmp_path / "o")])
        assert code == EXIT_BUDGET
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "oracle_budget_exceeded"
