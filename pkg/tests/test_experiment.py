"""Tests for the Monte Carlo harness, config parsing, and CSV round-trip."""

import numpy as np
import pytest

from quditmse.errors import ConfigError, RangeError
from quditmse.experiment import (
    CSV_HEADER,
    ExperimentConfig,
    ResultRow,
    ResultsTable,
    build_experiment_config,
    emit_csv,
    fit_report,
    parse_config_text,
    read_csv,
    run_experiment,
    run_state_experiment,
    run_unitary_experiment,
)


def small_state_config(**kw):
    base = dict(
        mode="state", d=2, shots=(100,), k_max=6, targets=3, runs=2, seed=0
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfigParsing:
    def test_basic_keys(self):
        text = """
        # comment line
        mode = state
        d = 4
        shots = 100, 1000
        iterations = 50
        targets = 5
        runs = 3
        seed = 9
        noiseless = yes
        mle = off
        """
        mapping = parse_config_text(text)
        assert mapping["mode"] == "state"
        assert mapping["d"] == 4
        assert mapping["shots"] == (100, 1000)
        assert mapping["iterations"] == 50
        assert mapping["noiseless"] is True
        assert mapping["mle"] is False

    def test_unknown_key_rejected_with_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("bogus = 1")

    def test_malformed_line_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("just some words")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("d = two")
        with pytest.raises(ConfigError):
            parse_config_text("noiseless = maybe")

    def test_build_fills_defaults(self):
        cfg = build_experiment_config({"d": 3})
        assert cfg.mode == "state"
        assert cfg.d == 3
        assert cfg.shots == (1000,)
        assert cfg.k_max == 100
        assert cfg.gains is None
        assert cfg.simplex is None

    def test_build_gain_overrides_merge_with_defaults(self):
        cfg = build_experiment_config({"d": 2, "gain_a": 2.0})
        assert cfg.gains.a == 2.0
        assert cfg.gains.A == 4.0
        assert cfg.gains.b == 0.35

    def test_build_post_aliases(self):
        cfg = build_experiment_config({"post": "closest"})
        assert cfg.unitary.post_processing == "closest_unitary"
        cfg = build_experiment_config({"post": "gs", "re_update": True})
        assert cfg.unitary.post_processing == "gram_schmidt"
        assert cfg.unitary.re_update is True

    def test_build_rejects_unknown_post(self):
        with pytest.raises(ConfigError):
            build_experiment_config({"post": "qr"})

    def test_invalid_grid_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(mode="state", targets=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(mode="nonsense")


class TestStateExperiment:
    def test_row_layout(self):
        cfg = small_state_config()
        table = run_state_experiment(cfg)
        assert len(table.rows) == 6
        for k, row in enumerate(table.rows, start=1):
            assert row.k == k
            assert row.n_t == 2 * 100 * k
            assert row.variant == "raw"
            assert row.samples == 6
            assert row.gm_benchmark > 0
            assert row.q1 <= row.median_mse <= row.q3
        assert table.target_curves[(100, "raw")].shape == (3, 6)

    def test_deterministic(self):
        a = run_state_experiment(small_state_config())
        b = run_state_experiment(small_state_config())
        assert a.rows == b.rows

    def test_seed_changes_results(self):
        a = run_state_experiment(small_state_config(seed=0))
        b = run_state_experiment(small_state_config(seed=1))
        assert a.rows != b.rows

    def test_parallel_output_identical(self, tmp_path):
        serial = run_state_experiment(small_state_config(jobs=1))
        parallel = run_state_experiment(small_state_config(jobs=2))
        p1 = tmp_path / "serial.csv"
        p2 = tmp_path / "parallel.csv"
        emit_csv(serial, p1)
        emit_csv(parallel, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_noiseless_mean_converges(self):
        cfg = small_state_config(
            shots=(1,), k_max=200, targets=3, runs=1, noiseless=True
        )
        table = run_state_experiment(cfg)
        final = [r for r in table.rows if r.k == 200][0]
        assert final.mean_mse < 1e-4

    def test_mode_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            run_unitary_experiment(small_state_config())

    def test_dispatcher(self):
        table = run_experiment(small_state_config())
        assert table.rows[0].mode == "state"


class TestUnitaryExperiment:
    def test_row_layout(self):
        cfg = ExperimentConfig(
            mode="unitary", d=2, shots=(50,), k_max=4, targets=2, runs=2, seed=3
        )
        table = run_unitary_experiment(cfg)
        assert len(table.rows) == 12
        for row in table.rows:
            assert row.mode == "unitary"
            assert row.n_t == 2 * 2 * 50 * row.k
            assert row.samples == 4
        variants = {row.variant for row in table.rows}
        assert variants == {"raw", "closest", "gs"}
        assert table.target_curves[(50, "closest")].shape == (2, 4)

    def test_deterministic(self):
        cfg = ExperimentConfig(
            mode="unitary", d=2, shots=(50,), k_max=3, targets=2, runs=1, seed=5
        )
        a = run_unitary_experiment(cfg)
        b = run_unitary_experiment(cfg)
        assert a.rows == b.rows


class TestFitReport:
    def _synthetic_table(self, p=5.0, a=1.0, k_max=20, n_shots=100):
        rows = []
        for k in range(1, k_max + 1):
            n_t = 2 * n_shots * k
            mse = p / n_t ** a
            rows.append(
                ResultRow(
                    mode="state",
                    d=2,
                    N=n_shots,
                    k=k,
                    n_t=n_t,
                    variant="raw",
                    mean_mse=mse,
                    median_mse=mse,
                    q1=mse,
                    q3=mse,
                    gm_benchmark=3.0 / n_t,
                    samples=1,
                )
            )
        return ResultsTable(rows=rows)

    def test_recovers_exact_law(self):
        table = self._synthetic_table(p=7.41, a=1.04)
        entries = fit_report(table, [(5, 20)])
        assert len(entries) == 1
        fit = entries[0].fit
        assert abs(fit.a - 1.04) < 1e-9
        assert abs(fit.p - 7.41) < 1e-6

    def test_window_outside_range_rejected(self):
        table = self._synthetic_table(k_max=20)
        with pytest.raises(RangeError):
            fit_report(table, [(5, 30)])
        with pytest.raises(RangeError):
            fit_report(table, [(10, 10)])

    def test_one_entry_per_cell_and_window(self):
        cfg = ExperimentConfig(
            mode="unitary", d=2, shots=(50,), k_max=8, targets=2, runs=1, seed=1
        )
        table = run_unitary_experiment(cfg)
        entries = fit_report(table, [(1, 4), (5, 8)])
        assert len(entries) == 6
        assert {e.variant for e in entries} == {"raw", "closest", "gs"}


class TestCsvRoundTrip:
    def test_header_and_values(self, tmp_path):
        table = run_state_experiment(small_state_config())
        path = tmp_path / "results.csv"
        emit_csv(table, path)
        text = path.read_text().splitlines()
        assert text[0] == CSV_HEADER
        assert len(text) == 1 + len(table.rows)

        back = read_csv(path)
        for orig, parsed in zip(table.rows, back.rows):
            assert parsed == orig

    def test_empty_table_is_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv(ResultsTable(rows=[]), path)
        assert path.read_text() == CSV_HEADER + "\n"
        assert read_csv(path).rows == []

    def test_unwritable_path_raises_with_context(self, tmp_path):
        table = ResultsTable(rows=[])
        bad = tmp_path / "missing" / "results.csv"
        with pytest.raises(OSError, match="results"):
            emit_csv(table, bad)

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ConfigError):
            read_csv(path)
