import json

import numpy as np
import pytest

from qrouter.circuit import Circuit, Gate, dumps
from qrouter.config import DEFAULT_GAMMA_GRID, config_to_json, parse_config
from qrouter.errors import ConfigError
from qrouter.gates import GateKind
from qrouter.cli import main
from qrouter.sweep import RESULTS_HEADER, SUMMARY_HEADER, run_sweep

TINY = {
    "gamma_grid": [0.0, 0.5],
    "repetitions": 2,
    "shots_per_setting": 400,
    "base_seed": 7,
}


class TestParseConfig:
    def test_empty_document_gives_defaults(self):
        cfg = parse_config({})
        assert cfg.gamma_grid == DEFAULT_GAMMA_GRID
        assert len(cfg.gamma_grid) == 11
        assert cfg.gamma_guess == 0.5
        assert cfg.shots_per_setting == 100_000
        assert cfg.repetitions == 10
        assert cfg.variant == "both-qubits"

    def test_out_of_range_gamma_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"gamma_grid": [1.5]})

    def test_signal_only_with_mitigation_is_valid(self):
        cfg = parse_config({"variant": "signal-only", "mitigation": True})
        assert cfg.variant == "signal-only" and cfg.mitigation

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config({"bogus": 1})
        with pytest.raises(ConfigError, match="typo"):
            parse_config({"noise": {"typo": 0.1}})

    def test_bad_values_rejected(self):
        for doc in (
            {"gamma_grid": []},
            {"gamma_guess": 1.0},
            {"shots_per_setting": 0},
            {"repetitions": 0},
            {"variant": "nope"},
            {"noise": {"readout_p01": 2.0}},
        ):
            with pytest.raises(ConfigError):
                parse_config(doc)

    def test_round_trip(self):
        cfg = parse_config(TINY)
        assert parse_config(config_to_json(cfg)) == cfg

    def test_explicit_coupling_map(self):
        cfg = parse_config({"coupling_map": {"n_physical": 3, "edges": [[0, 1], [1, 2]]}})
        assert cfg.resolved_coupling_map().n_physical == 3


class TestRunSweep:
    def test_files_and_schema(self, tmp_path):
        cfg = parse_config(TINY)
        report = run_sweep(cfg, out_dir=str(tmp_path))
        for name in ("results.csv", "summary.csv", "manifest.json", "ideal_density.json"):
            assert (tmp_path / name).exists()
        results = (tmp_path / "results.csv").read_text().splitlines()
        assert results[0] == RESULTS_HEADER
        assert len(results) == 1 + 2 * 2
        summary = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary[0] == SUMMARY_HEADER
        assert len(summary) == 1 + 2
        assert len(report.rows) == 2
        dm_files = sorted(p.name for p in tmp_path.glob("dm_gamma*.json"))
        assert len(dm_files) == 4
        doc = json.loads((tmp_path / dm_files[0]).read_text())
        assert doc["dim"] == 8 and len(doc["real"]) == 8

    def test_p_theory_column_formula(self, tmp_path):
        cfg = parse_config({**TINY, "gamma_grid": [0.0, 0.3, 0.9]})
        report = run_sweep(cfg, out_dir=str(tmp_path))
        for row in report.rows:
            g = row.gamma
            expected = ((3 - 2 * g) / (3 * (2 - g))) ** 2
            assert abs(row.P_theory - expected) < 1e-12
            assert abs(row.p1_theory - (0.5 + 0.5 * (1 - g))) < 1e-12
            assert row.two_sigma_F >= 0 and row.two_sigma_P >= 0

    def test_byte_identical_rerun(self, tmp_path):
        cfg = parse_config(TINY)
        a, b = tmp_path / "a", tmp_path / "b"
        run_sweep(cfg, out_dir=str(a))
        run_sweep(cfg, out_dir=str(b))
        for name in ["results.csv", "summary.csv"] + sorted(
            p.name for p in a.glob("dm_gamma*.json")
        ):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_unwritable_output_dir(self, tmp_path):
        # a regular file where the directory should go fails before any
        # simulation starts (works regardless of uid)
        target = tmp_path / "blocked"
        target.write_text("")
        cfg = parse_config(TINY)
        with pytest.raises(OSError):
            run_sweep(cfg, out_dir=str(target))

    def test_theory_columns_pure_functions_of_config(self, tmp_path):
        # different seed, same theory columns
        cfg1 = parse_config(TINY)
        cfg2 = parse_config({**TINY, "base_seed": 99})
        r1 = run_sweep(cfg1, out_dir=str(tmp_path / "s1"))
        r2 = run_sweep(cfg2, out_dir=str(tmp_path / "s2"))
        for a, b in zip(r1.rows, r2.rows):
            assert a.P_theory == b.P_theory and a.p1_theory == b.p1_theory


class TestCli:
    def test_dump_ideal_entry(self, tmp_path, capsys):
        out = tmp_path / "ideal.json"
        assert main(["dump-ideal", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["dim"] == 8
        assert abs(doc["real"][0][0] - 0.25) < 1e-12

    def test_sweep_cli(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text(json.dumps(TINY))
        out = tmp_path / "results"
        assert main(["sweep", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "results.csv").exists()

    def test_transpile_cli(self, tmp_path):
        circ = Circuit(3, [Gate(GateKind.H, (0,)), Gate(GateKind.CSWAP, (0, 1, 2))])
        src = tmp_path / "circuit.json"
        src.write_text(dumps(circ))
        out = tmp_path / "report.json"
        assert main(["transpile", "--in", str(src), "--map", "jakarta", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["equivalent"] is True
        assert doc["max_deviation"] < 1e-9
        assert set(doc) >= {"swap_count", "cx_count", "depth", "final_permutation"}

    def test_calibrate_cli(self, tmp_path):
        out = tmp_path / "cal.json"
        code = main(["calibrate", "--qubits", "2", "--p01", "0.02", "--p10", "0.02", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        m = np.array(doc["matrix"])
        np.testing.assert_allclose(m.sum(axis=0), 1.0, atol=1e-10)
        assert abs(m[0, 0] - 0.98 * 0.98) < 1e-12

    def test_tomo_cli(self, tmp_path):
        # exact single-qubit |0> counts in all three bases
        counts = {
            "X": {"0": 500, "1": 500},
            "Y": {"0": 500, "1": 500},
            "Z": {"0": 1000},
        }
        src = tmp_path / "counts.json"
        src.write_text(json.dumps({"settings": counts}))
        out = tmp_path / "dm.json"
        assert main(["tomo", "--counts", str(src), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["dim"] == 2
        assert abs(doc["real"][0][0] - 1.0) < 1e-9

    def test_error_exit_code(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        assert main(["sweep", "--config", str(missing)]) == 1
        err = capsys.readouterr().err
        assert "error:" in err
