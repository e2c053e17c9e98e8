import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from jumpchain import runio, scenarios
from jumpchain.cli import main
from jumpchain.particles import MixingPolicy


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


TINY_CONFIG = {
    "name": "tiny",
    "space": {"type": "interval"},
    "initial": {"type": "point_mass", "location": 0.3},
    "j": 1,
    "k": 2,
    "engine": "mc",
    "n_particles": 2000,
    "n_iterations": 3,
    "seed": 7,
    "policy": {"mode": "fixed", "t_fixed": 4},
    "thin_cap": 500,
}


class TestBinomialCommands:
    def test_classify_output(self, capsys):
        code, out, _ = run_cli(capsys, "binomial", "classify", "--j", "4", "--k", "5")
        assert code == 0
        assert out.strip() == "type=III p_crit=0.17267"

    def test_map_half(self, capsys):
        code, out, _ = run_cli(capsys, "binomial", "map", "--p", "0.5", "--j", "3", "--k", "7")
        assert code == 0
        assert float(out.strip()) == 0.5

    def test_table_rows(self, capsys):
        code, out, _ = run_cli(capsys, "binomial", "table", "--kmax", "9")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "k,j,type,p_crit"
        assert len(lines) == 45  # header + 44 pairs

    def test_nonexistence(self, capsys):
        code, out, _ = run_cli(capsys, "binomial", "nonexistence", "--j", "2", "--k", "2")
        assert (code, out.strip()) == (0, "true")

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as e:
            main(["binomial", "classify", "--j", "4"])
        assert e.value.code == 2

    def test_validation_error_exit_3(self, capsys):
        code, _, err = run_cli(capsys, "binomial", "classify", "--j", "9", "--k", "5")
        assert code == 3
        assert "error" in err


class TestFiniteCommands:
    def test_kernel_golden_via_scenario(self, capsys):
        code, out, _ = run_cli(
            capsys, "finite", "kernel", "--scenario", "paper-R2", "--j", "1", "--k", "2"
        )
        assert code == 0
        rows = [[float(v) for v in line.split(",")] for line in out.strip().splitlines()]
        assert abs(rows[0][0] - 11 / 36) < 1e-12
        assert abs(rows[0][1] - 1 / 4) < 1e-12
        assert abs(rows[0][2] - 1 / 9) < 1e-12
        assert abs(rows[0][3] - 1 / 3) < 1e-12

    def test_stationary_doubly_stochastic(self, capsys):
        code, out, _ = run_cli(
            capsys, "finite", "stationary", "--scenario", "paper-0.4-0.6", "--j", "3", "--k", "4"
        )
        assert code == 0
        w = [float(v) for v in out.strip().split(",")]
        assert max(abs(x - 0.25) for x in w) < 1e-12

    def test_fixed_points_five_point(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "finite", "fixed-points", "--scenario", "paper-5pt",
            "--j", "1", "--k", "2", "--restarts", "48", "--seed", "0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["input"]["j"] == 1
        target = np.array([0.149, 0.188, 0.203, 0.298, 0.162])
        hit = [
            fp
            for fp in payload["fixed_points"]
            if fp["support_size"] == 5
            and np.abs(np.array(fp["theta_star"]) - target).max() < 1e-3
        ]
        assert hit and hit[0]["stability"] == "unstable"

    def test_feasibility_found_and_not_found(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "finite", "feasibility", "--scenario", "paper-R2")
        assert code == 0 and "not found" not in out
        asym = tmp_path / "asym.csv"
        asym.write_text("1,2,3,4\n3,1,4,2\n2,4,1,3\n4,3,2,1\n")
        code, out, _ = run_cli(capsys, "finite", "feasibility", "--rank-csv", str(asym))
        assert code == 0 and out.strip() == "not found"

    def test_iterate_writes_rows(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "finite", "iterate", "--scenario", "paper-R2",
            "--j", "2", "--k", "2", "--steps", "5",
            "--theta", "0.18,0.18,0.32,0.32",
        )
        assert code == 0
        rows = out.strip().splitlines()
        assert len(rows) == 6

    def test_btl_scan_small(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "finite", "btl-scan", "--leaves", "4", "--trials", "2",
            "--k", "2", "--restarts", "8",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 0

    def test_input_flag_conflict(self, capsys):
        code, _, err = run_cli(
            capsys, "finite", "kernel", "--scenario", "paper-R2",
            "--rank-csv", "x.csv", "--j", "1", "--k", "2",
        )
        assert code == 3


class TestScenarios:
    def test_bundled_round_trip(self):
        for cfg in scenarios.bundled_scenarios():
            again = runio.ScenarioConfig.from_jsonable(json.loads(json.dumps(cfg.to_jsonable())))
            assert again == cfg

    def test_tencube_family_size(self):
        names = [c.name for c in scenarios.bundled_scenarios()]
        assert len([n for n in names if n.startswith("tencube_")]) == 8

    def test_interval_family(self):
        names = [c.name for c in scenarios.bundled_scenarios()]
        assert len([n for n in names if n.startswith("interval_u_")]) == sum(range(2, 7))

    def test_required_names_present(self):
        names = {c.name for c in scenarios.bundled_scenarios()}
        required = {
            "paper-5pt", "paper-R2", "paper-0.4-0.6", "ninepoint_k10",
            "interval_tilted", "interval_more_tilted",
            "circle_uniform_k4", "circle_disc_k4",
        }
        assert required <= names

    def test_exact_engine_requires_finite_space(self):
        with pytest.raises(ValueError):
            runio.ScenarioConfig(
                name="bad", space={"type": "interval"}, initial={"type": "uniform_interval"},
                j=1, k=2, engine="exact", n_particles=1, n_iterations=1, seed=0,
            )

    def test_schema_rejects_unknown_fields(self):
        import jsonschema

        bad = dict(TINY_CONFIG, extra_field=1)
        with pytest.raises(jsonschema.ValidationError):
            runio.ScenarioConfig.from_jsonable(bad)

    def test_list_command(self, capsys):
        code, out, _ = run_cli(capsys, "scenarios")
        assert code == 0
        assert "paper-R2" in out


class TestRunArtifacts:
    def test_point_mass_run_and_classify(self, capsys, tmp_path):
        cfg_path = tmp_path / "tiny.json"
        cfg_path.write_text(json.dumps(TINY_CONFIG))
        out_dir = tmp_path / "run"
        code, out, _ = run_cli(
            capsys, "mc", "run", "--config", str(cfg_path), "--out", str(out_dir)
        )
        assert code == 0
        assert (out_dir / "config.json").exists()
        assert (out_dir / "summaries.csv").exists()
        assert (out_dir / "iter_3" / "summary.json").exists()
        assert (out_dir / "artifact.json").exists()
        artifact = json.loads((out_dir / "artifact.json").read_text())
        assert artifact["classification"]["kind"] == "one_point"
        code, out, _ = run_cli(capsys, "mc", "classify", str(out_dir))
        assert code == 0
        assert json.loads(out)["kind"] == "one_point"

    def test_rerun_is_bit_identical(self, tmp_path):
        cfg = runio.ScenarioConfig.from_jsonable(
            dict(TINY_CONFIG, initial={"type": "uniform_interval"})
        )
        a = tmp_path / "a"
        b = tmp_path / "b"
        runio.run_iterative(cfg, a)
        runio.run_iterative(cfg, b)
        assert (a / "summaries.csv").read_bytes() == (b / "summaries.csv").read_bytes()
        for g in range(4):
            assert (a / f"iter_{g}" / "samples.csv").read_bytes() == (
                b / f"iter_{g}" / "samples.csv"
            ).read_bytes()

    def test_resume_matches_uninterrupted_run(self, tmp_path):
        full_cfg = runio.ScenarioConfig.from_jsonable(
            dict(TINY_CONFIG, initial={"type": "uniform_interval"})
        )
        full_dir = tmp_path / "full"
        runio.run_iterative(full_cfg, full_dir)

        part_cfg = dataclasses.replace(full_cfg, n_iterations=1)
        part_dir = tmp_path / "part"
        runio.run_iterative(part_cfg, part_dir)
        echo = json.loads((part_dir / "config.json").read_text())
        echo["n_iterations"] = TINY_CONFIG["n_iterations"]
        (part_dir / "config.json").write_text(json.dumps(echo))
        runio.resume_run(part_dir)
        assert (part_dir / "summaries.csv").read_bytes() == (
            full_dir / "summaries.csv"
        ).read_bytes()

    def test_locked_directory_refused(self, capsys, tmp_path):
        cfg_path = tmp_path / "tiny.json"
        cfg_path.write_text(json.dumps(TINY_CONFIG))
        out_dir = tmp_path / "locked"
        out_dir.mkdir()
        (out_dir / "run.lock").touch()
        code, _, err = run_cli(
            capsys, "mc", "run", "--config", str(cfg_path), "--out", str(out_dir)
        )
        assert code == 4
        assert "locked" in err

    def test_thinning_cap_respected(self, tmp_path):
        cfg = runio.ScenarioConfig.from_jsonable(
            dict(TINY_CONFIG, initial={"type": "uniform_interval"}, thin_cap=100)
        )
        out_dir = tmp_path / "thin"
        runio.run_iterative(cfg, out_dir)
        rows = (out_dir / "iter_0" / "samples.csv").read_text().strip().splitlines()
        assert len(rows) == 101  # header + cap

    def test_store_full_flag(self, tmp_path):
        cfg = runio.ScenarioConfig.from_jsonable(
            dict(TINY_CONFIG, initial={"type": "uniform_interval"}, store_full=True)
        )
        out_dir = tmp_path / "full"
        runio.run_iterative(cfg, out_dir)
        full = np.load(out_dir / "iter_0" / "population.npy")
        assert full.shape == (TINY_CONFIG["n_particles"],)

    def test_out_root_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("JUMPCHAIN_OUT_ROOT", str(tmp_path / "root"))
        cfg_path = tmp_path / "tiny.json"
        cfg_path.write_text(json.dumps(TINY_CONFIG))
        code, _, _ = run_cli(capsys, "mc", "run", "--config", str(cfg_path))
        assert code == 0
        assert (tmp_path / "root" / "tiny" / "summaries.csv").exists()

    def test_missing_config_exit_4(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "mc", "run", "--config", str(tmp_path / "nope.json"))
        assert code == 4

    def test_scenario_override(self, capsys, tmp_path):
        out_dir = tmp_path / "nine"
        code, out, _ = run_cli(
            capsys,
            "mc", "run", "--scenario", "ninepoint_k10",
            "--j", "2", "--n-particles", "2000", "--iterations", "3",
            "--out", str(out_dir),
        )
        assert code == 0
        echo = json.loads((out_dir / "config.json").read_text())
        assert echo["j"] == 2 and echo["n_particles"] == 2000
