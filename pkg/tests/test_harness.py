"""Configuration, result serialization, experiment runner, and CLI."""

import csv
import io
import json
import math
import os

import numpy as np
import numpy.testing as npt
import pytest

from modalcs import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    InvalidArgument,
    IoError,
    ParseError,
    RaggedRows,
    ResultTable,
    build_basis,
    build_system,
    emit_plot_data,
    load_sensor_csv,
    preset,
    preset_config,
    rng_from_seed,
    run_experiment,
    save_sensor_csv,
    write_result_csv,
)
from modalcs.cli import run as cli_run


def small_sweep_config(seed=None, stop=0.5):
    raw = preset("exp1")
    raw["sampling"]["t_max_stop"] = stop
    if seed is not None:
        raw["seed"] = seed
    return ExperimentConfig.from_dict(raw)


class TestConfigValidation:
    def test_presets_resolve(self):
        for name in EXPERIMENTS:
            if name == "realdata":
                continue
            cfg = preset_config(name)
            assert cfg.experiment == name

    def test_realdata_preset_needs_data_path(self):
        with pytest.raises(ConfigError, match="data_path"):
            preset_config("realdata")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset("exp9")

    def test_missing_required_field(self):
        with pytest.raises(ConfigError, match="experiment"):
            ExperimentConfig.from_dict({"seed": 1})

    def test_unknown_field_rejected(self):
        raw = preset("exp1")
        raw["n_bootstrap"] = 10
        with pytest.raises(ConfigError, match="n_bootstrap"):
            ExperimentConfig.from_dict(raw)

    def test_wrong_type_reported_with_path(self):
        raw = preset("exp1")
        raw["sampling"]["t_s"] = "fast"
        with pytest.raises(ConfigError, match="sampling.t_s"):
            ExperimentConfig.from_dict(raw)

    def test_unsorted_frequencies(self):
        raw = preset("exp1")
        raw["frequencies"] = list(reversed(raw["frequencies"]))
        with pytest.raises(ConfigError, match="frequencies"):
            ExperimentConfig.from_dict(raw)

    def test_exp3_sample_counts_cover_modes(self):
        raw = preset("exp3")
        raw["sampling"]["m_values"] = [2, 6]
        with pytest.raises(ConfigError, match="m_values"):
            ExperimentConfig.from_dict(raw)

    def test_round_trip_through_as_dict(self):
        cfg = preset_config("exp4")
        assert ExperimentConfig.from_dict(cfg.as_dict()) == cfg

    def test_as_dict_is_json_serializable(self):
        for name in ("exp1", "exp3", "exp5"):
            json.dumps(preset_config(name).as_dict())


class TestSystemAndBasis:
    def test_default_system_is_symmetric_4dof(self):
        system = build_system(preset_config("exp1"))
        assert system.mass.shape == (4, 4)
        npt.assert_array_equal(system.stiffness, system.stiffness.T)

    def test_custom_system(self):
        cfg = ExperimentConfig.from_dict(
            {
                "experiment": "exp1",
                "seed": 1,
                "system": {"mass": [[1.0, 0.0], [0.0, 1.0]], "stiffness": [[2.0, -1.0], [-1.0, 2.0]]},
                "frequencies": [1.0, 2.0],
                "magnitudes": [1.0, 0.5],
                "sampling": {"t_s": 0.1, "t_max_start": 0.0, "t_max_step": 0.1, "t_max_stop": 0.5},
            }
        )
        basis = build_basis(cfg)
        assert basis.mode_shapes.shape == (2, 2)
        npt.assert_allclose(np.sort(basis.frequencies), [1.0, 2.0])

    def test_listed_order_pairs_with_ascending_modes(self):
        cfg = preset_config("exp1")
        basis = build_basis(cfg)
        # Basis columns are sorted by descending natural frequency, so the
        # ascending listed values appear reversed.
        npt.assert_allclose(basis.frequencies[::-1], cfg.frequencies)
        npt.assert_allclose(basis.amplitudes[::-1].real, cfg.magnitudes)
        assert abs(basis.amplitudes[0]) == pytest.approx(0.01)

    def test_wrong_frequency_count(self):
        raw = preset("exp1")
        raw["frequencies"] = raw["frequencies"][:3]
        raw["magnitudes"] = raw["magnitudes"][:3]
        with pytest.raises(ConfigError, match="frequencies"):
            build_basis(ExperimentConfig.from_dict(raw))


class TestResultTable:
    def table(self):
        return ResultTable(
            "exp1",
            ["t_max", "scheme", "err", "gap", "m"],
            [(0.5, "uniform", 0.25, None, 3), (0.5, "random", 1.0 / 3.0, 0.1, 3)],
            {"experiment": "exp1"},
        )

    def test_row_width_enforced(self):
        with pytest.raises(InvalidArgument):
            ResultTable("exp1", ["a", "b"], [(1.0,)], {})

    def test_column_helper(self):
        assert self.table().column("scheme") == ["uniform", "random"]

    def test_csv_formatting(self):
        text = self.table().to_csv()
        lines = text.split("\r\n")
        assert lines[0] == "t_max,scheme,err,gap,m"
        assert lines[1] == "0.5,uniform,0.25,,3"
        assert text.endswith("\r\n")

    def test_floats_round_trip_exactly(self):
        values = [0.1, 1.0 / 3.0, 1e-17, -2.5e300, 4.9e-324]
        table = ResultTable("exp1", ["v"], [(v,) for v in values], {})
        rows = list(csv.reader(io.StringIO(table.to_csv())))
        assert [float(r[0]) for r in rows[1:]] == values

    def test_unsupported_cell_type(self):
        table = ResultTable("exp1", ["v"], [(1 + 2j,)], {})
        with pytest.raises(InvalidArgument):
            table.to_csv()

    def test_write_result_csv(self, tmp_path):
        path = tmp_path / "out.csv"
        write_result_csv(self.table(), str(path))
        assert path.read_bytes() == self.table().to_csv().encode()

    def test_write_to_bad_path(self, tmp_path):
        with pytest.raises(IoError):
            write_result_csv(self.table(), str(tmp_path / "missing" / "out.csv"))


class TestSensorCsv:
    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "u.csv")
        data = np.array([[0.1, -2.0, 3.5e-7], [1.0 / 3.0, 0.0, -1e222]])
        save_sensor_csv(data, path)
        npt.assert_array_equal(load_sensor_csv(path), data)

    def test_round_trip_large_random(self, tmp_path):
        path = str(tmp_path / "big.csv")
        data = rng_from_seed(40).normal(size=(18, 300))
        save_sensor_csv(data, path)
        npt.assert_array_equal(load_sensor_csv(path), data)

    def test_header_skipped_when_declared(self, tmp_path):
        path = str(tmp_path / "h.csv")
        save_sensor_csv(np.eye(2), path, header=["s1", "s2"])
        npt.assert_array_equal(load_sensor_csv(path, header=True), np.eye(2))

    def test_header_without_flag_is_parse_error(self, tmp_path):
        path = str(tmp_path / "h.csv")
        save_sensor_csv(np.eye(2), path, header=["s1", "s2"])
        with pytest.raises(ParseError) as info:
            load_sensor_csv(path)
        assert info.value.line == 1
        assert info.value.column == 1

    def test_invalid_cell_position(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\r\n3,oops\r\n")
        with pytest.raises(ParseError) as info:
            load_sensor_csv(str(path))
        assert info.value.line == 2
        assert info.value.column == 2
        assert "oops" in str(info.value)

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2,3\r\n4,5\r\n")
        with pytest.raises(RaggedRows) as info:
            load_sensor_csv(str(path))
        assert info.value.line == 2
        assert "expected 3" in str(info.value)

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "gaps.csv"
        path.write_text("1,2\r\n\r\n3,4\r\n")
        npt.assert_array_equal(load_sensor_csv(str(path)), [[1.0, 2.0], [3.0, 4.0]])

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            load_sensor_csv(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_sensor_csv(str(tmp_path / "nope.csv"))

    def test_non_matrix_rejected(self, tmp_path):
        with pytest.raises(InvalidArgument):
            save_sensor_csv(np.zeros(3), str(tmp_path / "v.csv"))


class TestEmitPlotData:
    def test_sweep_layout(self, tmp_path):
        table = ResultTable(
            "exp1",
            ["t_max", "m", "scheme", "err_mode1", "err_mode2"],
            [
                (0.5, 6, "uniform", 0.25, 0.5),
                (0.5, 6, "random", 0.125, 0.75),
                (1.0, 11, "uniform", 0.1, 0.2),
            ],
            {"experiment": "exp1"},
        )
        paths = emit_plot_data(table, str(tmp_path))
        assert [os.path.basename(p) for p in paths] == ["manifest.json", "mode1.csv", "mode2.csv"]
        text = (tmp_path / "mode1.csv").read_bytes().decode()
        assert text == "t_max,err_uniform,err_random\r\n0.5,0.25,0.125\r\n1.0,0.1,\r\n"
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["experiment"] == "exp1"
        assert manifest["files"] == ["mode1.csv", "mode2.csv"]
        assert len(manifest["curves"]) == 2

    def test_empty_table_writes_manifest_only(self, tmp_path):
        table = ResultTable("exp2", ["t_max", "scheme", "err_mode1"], [], {})
        paths = emit_plot_data(table, str(tmp_path))
        assert len(paths) == 1
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["curves"] == []
        assert manifest["files"] == []

    def test_exp3_layout(self, tmp_path):
        cols = [
            "m",
            "t_max_uniform",
            "err_uniform_max",
            "err_random_matched_mean_max",
            "err_random_extended_mean_max",
        ]
        table = ResultTable("exp3", cols, [(6, 0.5, 0.9, 0.8, 0.3), (10, 0.9, 0.5, 0.4, 0.2)], {})
        emit_plot_data(table, str(tmp_path))
        rows = list(csv.reader(io.StringIO((tmp_path / "max_error_vs_m.csv").read_text())))
        assert rows[0][0] == "m"
        assert [r[0] for r in rows[1:]] == ["6", "10"]

    def test_exp4_layout_selects_summary_rows(self, tmp_path):
        cols = ["variant", "seed", "err_mode1", "err_mode2"]
        table = ResultTable(
            "exp4",
            cols,
            [
                ("uniform_sub", None, 0.4, 0.7),
                ("compressed", 1, 0.2, 0.3),
                ("compressed", 2, 0.1, 0.1),
                ("compressed_mean", None, 0.15, 0.2),
            ],
            {},
        )
        emit_plot_data(table, str(tmp_path))
        text = (tmp_path / "errors_by_mode.csv").read_bytes().decode()
        assert text == (
            "mode,err_uniform_sub,err_compressed_mean\r\n"
            "1,0.4,0.15\r\n2,0.7,0.2\r\n"
        )

    def test_exp5_marks_one_peak_per_mode(self, tmp_path):
        table = ResultTable(
            "exp5",
            ["mode"],
            [(1,), (2,)],
            {},
            extras={
                "spectrum_omega": [0.0, 1.0, 2.0],
                "spectrum_magnitudes": [[1.0, 3.0, 2.0], [5.0, 1.0, 0.5]],
                "spectrum_peak_bins": [1, 0],
            },
        )
        paths = emit_plot_data(table, str(tmp_path))
        assert len(paths) == 3
        for k, peak_bin in [(1, 1), (2, 0)]:
            rows = list(csv.reader(io.StringIO((tmp_path / f"spectrum_mode{k}.csv").read_text())))
            flags = [int(r[2]) for r in rows[1:]]
            assert sum(flags) == 1
            assert flags.index(1) == peak_bin

    def test_realdata_layout(self, tmp_path):
        shapes = {
            "benchmark": [[0.1, 0.2, 0.3]],
            "svd_y": [[0.1, 0.25, 0.28]],
            "cs_fdd": [[0.0, 0.3, 0.2]],
        }
        table = ResultTable("realdata", ["mode"], [(1,)], {}, extras={"shapes": shapes})
        emit_plot_data(table, str(tmp_path))
        rows = list(csv.reader(io.StringIO((tmp_path / "shapes_mode1.csv").read_text())))
        assert rows[0] == ["sensor", "benchmark", "svd_y", "cs_fdd"]
        assert [r[0] for r in rows[1:]] == ["1", "2", "3"]

    def test_unknown_layout(self, tmp_path):
        table = ResultTable("exp9", ["x"], [(1.0,)], {})
        with pytest.raises(InvalidArgument):
            emit_plot_data(table, str(tmp_path))

    def test_byte_determinism(self, tmp_path):
        config = small_sweep_config()
        blobs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            table = run_experiment(config)
            paths = emit_plot_data(table, str(out))
            blobs.append(b"".join(open(p, "rb").read() for p in paths) + table.to_csv().encode())
        assert blobs[0] == blobs[1]


class TestRunExperiment:
    def test_sweep_skips_underdetermined_points(self):
        table = run_experiment(small_sweep_config())
        t_max = table.column("t_max")
        assert min(t_max) == pytest.approx(0.3)
        assert max(t_max) == pytest.approx(0.5)
        assert len(table.rows) == 6  # three grid points, two schemes each

    def test_schemes_share_sample_budget(self):
        table = run_experiment(small_sweep_config())
        by_tmax = {}
        for row in table.rows:
            by_tmax.setdefault(row[0], []).append(row)
        for rows in by_tmax.values():
            schemes = {r[2] for r in rows}
            assert schemes == {"uniform", "random"}
            assert len({r[1] for r in rows}) == 1

    def test_gershgorin_only_for_uniform(self):
        table = run_experiment(small_sweep_config())
        g_idx = table.columns.index("gershgorin")
        s_idx = table.columns.index("scheme")
        for row in table.rows:
            if row[s_idx] == "uniform":
                assert row[g_idx] is not None
            else:
                assert row[g_idx] is None

    def test_seed_changes_random_rows_only(self):
        base = run_experiment(small_sweep_config(seed=1))
        other = run_experiment(small_sweep_config(seed=2))
        s_idx = base.columns.index("scheme")
        e_idx = base.columns.index("err_mode1")
        for a, b in zip(base.rows, other.rows):
            if a[s_idx] == "uniform":
                assert a[e_idx] == b[e_idx]
        randoms = [(a[e_idx], b[e_idx]) for a, b in zip(base.rows, other.rows) if a[s_idx] == "random"]
        assert any(x != y for x, y in randoms)

    def test_exp5_estimates_within_tolerance(self):
        table = run_experiment(preset_config("exp5"))
        assert len(table.rows) == 4
        tol = table.columns.index("tolerance")
        err = table.columns.index("abs_error")
        for row in table.rows:
            assert row[err] <= row[tol]
        assert table.rows[0][tol] == pytest.approx(2 * math.pi / 6.03, rel=1e-9)

    def test_realdata_missing_file(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            {
                "experiment": "realdata",
                "seed": 7,
                "data_path": str(tmp_path / "absent.csv"),
                "n_benchmark_modes": 3,
                "sampling": {"t_s": 0.01, "m_prime": 50},
            }
        )
        with pytest.raises(IoError):
            run_experiment(cfg)


class TestCli:
    def overlay(self, tmp_path, extra=None):
        raw = {"sampling": {"t_max_stop": 0.5}}
        if extra:
            raw.update(extra)
        path = tmp_path / "overlay.json"
        path.write_text(json.dumps(raw))
        return str(path)

    def test_run_preset_with_overlay(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = cli_run(
            ["run", "--experiment", "exp1", "--config", self.overlay(tmp_path), "--out", str(out)]
        )
        assert code == 0
        assert (out / "exp1_results.csv").exists()
        assert (out / "manifest.json").exists()
        assert (out / "mode4.csv").exists()
        assert "exp1" in capsys.readouterr().out

    def test_requires_some_source(self, tmp_path, capsys):
        assert cli_run(["run", "--out", str(tmp_path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_json_config(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli_run(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_experiment_mismatch(self, tmp_path, capsys):
        overlay = self.overlay(tmp_path, {"experiment": "exp2"})
        code = cli_run(["run", "--experiment", "exp1", "--config", overlay, "--out", str(tmp_path / "o")])
        assert code == 2
        assert "conflicts" in capsys.readouterr().err

    def test_unknown_schema_field_exit_code(self, tmp_path, capsys):
        overlay = self.overlay(tmp_path, {"n_bootstrap": 5})
        code = cli_run(["run", "--experiment", "exp1", "--config", overlay, "--out", str(tmp_path / "o")])
        assert code == 2

    def test_missing_data_file_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "rd.json"
        cfg.write_text(
            json.dumps(
                {
                    "experiment": "realdata",
                    "seed": 7,
                    "data_path": str(tmp_path / "absent.csv"),
                    "n_benchmark_modes": 3,
                    "sampling": {"t_s": 0.01, "m_prime": 50},
                }
            )
        )
        assert cli_run(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4

    def test_seed_flag_controls_output_bytes(self, tmp_path, capsys):
        overlay = self.overlay(tmp_path)
        blobs = []
        for sub, seed in [("s1", "11"), ("s2", "11"), ("s3", "12")]:
            out = tmp_path / sub
            code = cli_run(
                ["run", "--experiment", "exp1", "--config", overlay, "--out", str(out), "--seed", seed]
            )
            assert code == 0
            blobs.append((out / "exp1_results.csv").read_bytes())
        assert blobs[0] == blobs[1]
        assert blobs[0] != blobs[2]

    def test_unknown_experiment_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit):
            cli_run(["run", "--experiment", "exp9", "--out", str(tmp_path)])
