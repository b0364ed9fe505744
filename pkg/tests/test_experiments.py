"""Tests for sweeps, bound finding, result files, and the CLI."""

import io
import json
import math

import pytest

from weakqec.error_model import analytic_fidelity
from weakqec.experiments import (
    BoundResult,
    SweepSpec,
    bound_rows,
    find_bounds,
    improvement_gap,
    main,
    oracle_model_name,
    read_results_csv,
    results_to_csv_bytes,
    run_sweep,
)


class TestSweepSpec:
    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            SweepSpec(
                code="bitflip3", modes=("weak",), alpha_taus=(0.1,), g_taus=(),
                n_traj=10, master_seed=1,
            )

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValueError, match="sorted"):
            SweepSpec(
                code="bitflip3", modes=("weak",), alpha_taus=(0.3, 0.1), g_taus=(5.0,),
                n_traj=10, master_seed=1,
            )

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(
                code="bitflip3", modes=("medium",), alpha_taus=(0.1,), g_taus=(5.0,),
                n_traj=10, master_seed=1,
            )


class TestRunSweep:
    def test_unencoded_rows_carry_gaussian_oracle(self):
        spec = SweepSpec(
            code="unencoded1", modes=("none",), alpha_taus=(0.1, 0.3), g_taus=(0.0,),
            n_traj=400, master_seed=9, n_workers=1,
        )
        rows = run_sweep(spec)
        assert len(rows) == 2
        for row in rows:
            x = row["alpha_tau"]
            expected = 0.5 * (1.0 + math.exp(-2.0 * x * x))
            assert row["oracle_fidelity"] == pytest.approx(expected, abs=1e-15)
            assert abs(row["mean_fidelity"] - expected) <= 6 * row["std_err"]

    def test_mode_without_oracle_has_empty_column(self):
        spec = SweepSpec(
            code="bitflip3", modes=("weak",), alpha_taus=(0.2,), g_taus=(5.0,),
            n_traj=200, master_seed=9, n_workers=1,
        )
        rows = run_sweep(spec)
        assert rows[0]["oracle_fidelity"] is None

    def test_oracle_mapping(self):
        assert oracle_model_name("unencoded1", "none", "gaussian") == "unenc_flip_gauss"
        assert oracle_model_name("unencoded1_arb", "none", "binary") == "unenc_arb_binary"
        assert oracle_model_name("bitflip3", "projective", "gaussian") == "proj_ec_bitflip3"
        assert oracle_model_name("bitflip3", "weak", "gaussian") is None


class TestResultFiles:
    def test_csv_round_trip_is_byte_identical(self):
        spec = SweepSpec(
            code="unencoded1", modes=("none",), alpha_taus=(0.15, 0.25), g_taus=(0.0,),
            n_traj=300, master_seed=4, n_workers=1,
        )
        rows = run_sweep(spec)
        blob = results_to_csv_bytes(rows)
        reread = read_results_csv(io.StringIO(blob.decode()))
        assert results_to_csv_bytes(reread) == blob

    def test_header_guard(self):
        with pytest.raises(ValueError, match="header"):
            read_results_csv(io.StringIO("a,b,c\n1,2,3\n"))


class TestFindBounds:
    def test_small_coupling_has_no_window(self):
        # heavy current noise at g tau = 3 makes the feedback net-harmful at
        # every error size, so the factor-two criterion is never met
        res = find_bounds(
            "bitflip3", 3.0, "factor_two", n_traj=1500, master_seed=40,
            grid_start=0.1, grid_stop=0.7, grid_step=0.1, coarse_traj=800, n_workers=2,
        )
        assert not res.window
        assert res.lower is None and res.upper is None

    def test_window_at_moderate_coupling(self):
        res = find_bounds(
            "bitflip3", 6.0, "factor_two", n_traj=4000, master_seed=41,
            grid_start=0.1, grid_stop=0.7, grid_step=0.05, coarse_traj=1500, n_workers=2,
        )
        assert res.window
        assert res.lower is not None and res.upper is not None
        assert res.lower < res.upper
        assert res.lower_err > 0 and res.upper_err > 0
        # matches the probe region for this coupling
        assert 0.1 < res.lower < 0.35
        assert 0.3 < res.upper < 0.6

    def test_improvement_gap_sign(self):
        gap, se = improvement_gap("bitflip3", 0.3, 6.0, "factor_two", 3000, 42, n_workers=2)
        assert gap < 0  # correction wins comfortably here
        assert se > 0

    def test_bad_criterion(self):
        with pytest.raises(ValueError, match="criterion"):
            find_bounds("bitflip3", 5.0, "factor_three", 100, 1)

    def test_bound_rows_serialization(self):
        res = BoundResult(g_tau=5.0, criterion="factor_two", window=False, n_traj=10, master_seed=1)
        rows = bound_rows([res])
        assert rows[0]["window"] is False and rows[0]["lower"] is None


class TestCli:
    def test_sweep_stdout_csv(self, capsys):
        rc = main([
            "sweep", "--code", "unencoded1", "--mode", "none", "--alpha-tau", "0.2",
            "--g-tau", "0", "--traj", "200", "--seed", "5", "--workers", "1",
        ])
        out = capsys.readouterr().out
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("code,mode,alpha_tau")
        assert lines[1].startswith("unencoded1,none,0.2,")

    def test_sweep_json_to_file(self, tmp_path):
        out_path = tmp_path / "rows.json"
        rc = main([
            "sweep", "--code", "unencoded1", "--mode", "none", "--alpha-tau", "0.2",
            "--g-tau", "0", "--traj", "150", "--seed", "5", "--workers", "1",
            "--format", "json", "--out", str(out_path),
        ])
        assert rc == 0
        rows = json.loads(out_path.read_text())
        assert rows[0]["code"] == "unencoded1"

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"code": "unencoded1", "mode": "none", "alpha_tau": [0.1], "g_tau": [0.0], "traj": 5000}))
        rc = main(["--config", str(cfg), "sweep", "--traj", "120", "--seed", "6", "--workers", "1"])
        out = capsys.readouterr().out
        assert rc == 0
        assert ",120," in out.strip().splitlines()[1]

    def test_unknown_config_key_is_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"trajectories": 10}))
        rc = main(["--config", str(cfg), "sweep"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_cycle_dump(self, capsys):
        rc = main([
            "cycle", "--code", "bitflip3", "--mode", "weak", "--alpha-tau", "0.3",
            "--g-tau", "5", "--seed", "8", "--index", "1",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["config"]["code"] == "bitflip3"
        assert len(payload["trace"]) == 1
        assert len(payload["trace"][0]["records"]) == 2

    def test_validate_fast_passes(self, capsys):
        rc = main(["validate", "--fast", "--seed", "20240813"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "OK (" in out
        assert "FAIL" not in out.replace("FAILED", "")

    def test_missing_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
