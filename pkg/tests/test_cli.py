"""Command-line surface: outputs, exit codes, determinism."""

import json

import numpy as np
import pytest

from ecdwitness.cli import main


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestWitnessCommand:
    def test_cat_certifies(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "cat2", "beta": 2.0},
            "points": {"source": "paper"},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "witness"])
        assert code == 0
        result = json.loads((tmp_path / "witness_result.json").read_text())
        assert result["certified"] is True
        assert result["value"] > 0.1
        matrix = json.loads((tmp_path / "witness_matrix.json").read_text())
        assert matrix["N"] == 4

    def test_vacuum_not_certified_still_exit_zero(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "vacuum", "modes": 2},
            "points": {"source": "ring", "n": 3},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "witness"])
        assert code == 0
        result = json.loads((tmp_path / "witness_result.json").read_text())
        assert result["certified"] is False
        assert result["value"] == pytest.approx(0.0, abs=1e-10)

    def test_small_angle_paper_points_not_certified(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "fock_bell", "theta": 0.1 * np.pi},
            "points": {"source": "paper"},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "witness"])
        assert code == 0
        result = json.loads((tmp_path / "witness_result.json").read_text())
        assert result["certified"] is False

    def test_bad_config_exit_two(self, tmp_path):
        cfg = write_config(tmp_path, {"schema": 1,
                                      "state": {"family": "unknown"}})
        assert main(["--config", cfg, "--out", str(tmp_path), "witness"]) == 2

    def test_bad_schema_exit_two(self, tmp_path):
        cfg = write_config(tmp_path, {"schema": 99})
        assert main(["--config", cfg, "--out", str(tmp_path), "witness"]) == 2

    def test_truncation_exit_three(self, tmp_path):
        # a cat too large for the forced cutoffs trips the reliability gate
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "cat2", "beta": 3.0, "cutoffs": [6, 6]},
            "points": {"source": "paper"},
        })
        assert main(["--config", cfg, "--out", str(tmp_path), "witness"]) == 3


class TestStateInfo:
    def test_fock_bell_info(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "fock_bell", "theta": np.pi / 4},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "state-info"])
        assert code == 0
        info = json.loads((tmp_path / "state_info.json").read_text())
        assert info["num_modes"] == 2
        assert info["e_ppt"] == pytest.approx(1.0, abs=1e-9)
        assert info["e_sep"] == pytest.approx(np.sqrt(2), abs=1e-9)
        assert info["mean_photon"] == pytest.approx(1.0, abs=1e-10)


class TestOptimizeCommand:
    def test_seeded_deterministic_outputs(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "fock_bell", "theta": np.pi / 4},
            "points": {"init": "fock_bell", "n": 4},
            "optimizer": {"max_iters": 10, "restarts": 2, "seed": 5},
        })
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["--config", cfg, "--out", str(out1), "optimize"]) == 0
        assert main(["--config", cfg, "--out", str(out2), "optimize"]) == 0
        assert (out1 / "xi_opt.json").read_text() == \
            (out2 / "xi_opt.json").read_text()
        assert (out1 / "trace.csv").read_text() == \
            (out2 / "trace.csv").read_text()

    def test_zero_iters_returns_init(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "fock_bell", "theta": np.pi / 4},
            "points": {"init": "fock_bell", "n": 4},
            "optimizer": {"max_iters": 0, "restarts": 1},
        })
        assert main(["--config", cfg, "--out", str(tmp_path), "optimize"]) == 0
        from ecdwitness import fock_bell_points, points_from_json
        pairs, _ = points_from_json((tmp_path / "xi_opt.json").read_text())
        got = sorted(np.round([p[0][0] for p in pairs], 12).tolist(),
                     key=lambda z: (z.real, z.imag))
        expect = sorted(np.round(fock_bell_points(np.pi / 4), 12).tolist(),
                        key=lambda z: (z.real, z.imag))
        assert got == expect


class TestMeasureCommand:
    def test_records_and_result(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "fock_bell", "theta": np.pi / 4},
            "points": {"source": "paper"},
            "plan": {"shots": 10000, "confidence": 0.95, "seed": 3},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "measure"])
        assert code == 0
        lines = (tmp_path / "records.jsonl").read_text().strip().splitlines()
        assert len(lines) == 12  # 6 entries x 2 bases
        rec = json.loads(lines[0])
        assert {"setting", "shots", "plus_count", "estimator",
                "radius"} <= set(rec)
        result = json.loads((tmp_path / "witness_result.json").read_text())
        assert result["certified"] is True
        meta = json.loads((tmp_path / "measure_meta.json").read_text())
        assert meta["setting_counts"]["raw"] == 12

    def test_deterministic_given_seed(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "state": {"family": "cat2", "beta": 1.5},
            "points": {"source": "paper"},
            "plan": {"shots": 200, "seed": 11},
        })
        a, b = tmp_path / "a", tmp_path / "b"
        main(["--config", cfg, "--out", str(a), "measure"])
        main(["--config", cfg, "--out", str(b), "measure"])
        assert (a / "records.jsonl").read_text() == (b / "records.jsonl").read_text()


class TestReproduce:
    def test_fig3_squeezing_invariance_column(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "reproduce": {"sweep_points": 7},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "reproduce",
                     "fig3"])
        assert code == 0
        rows = (tmp_path / "fig3.csv").read_text().strip().splitlines()
        header = rows[0].split(",")
        assert header[0] == "r"
        data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
        ec = data[:, header.index("E_C_N4")]
        assert ec.max() - ec.min() < 1e-6  # constant across the sweep
        assert ec.min() > 0.04

    def test_fig2_threshold_small_sweep(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "reproduce": {"sweep_points": 11, "n100": False},
        })
        code = main(["--config", cfg, "--out", str(tmp_path), "reproduce",
                     "fig2"])
        assert code == 0
        rows = (tmp_path / "fig2.csv").read_text().strip().splitlines()
        header = rows[0].split(",")
        data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
        theta = data[:, 0]
        ec = data[:, header.index("E_C_N4")]
        # detection in the middle of the sweep, none at the edges
        assert ec[np.isclose(theta, np.pi / 4)][0] > 0.04
        assert ec[0] == 0.0 and ec[-1] == pytest.approx(0.0, abs=1e-12)

    def test_rows_sorted_and_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "reproduce": {"sweep_points": 5},
        })
        a, b = tmp_path / "a", tmp_path / "b"
        main(["--config", cfg, "--out", str(a), "reproduce", "fig3"])
        main(["--config", cfg, "--out", str(b), "reproduce", "fig3"])
        ta, tb = (a / "fig3.csv").read_text(), (b / "fig3.csv").read_text()
        assert ta == tb
        rs = [float(r.split(",")[0]) for r in ta.strip().splitlines()[1:]]
        assert rs == sorted(rs)

    def test_threads_give_identical_csv(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema": 1,
            "reproduce": {"sweep_points": 4},
        })
        a, b = tmp_path / "a", tmp_path / "b"
        main(["--config", cfg, "--out", str(a), "reproduce", "fig3"])
        main(["--config", cfg, "--out", str(b), "--threads", "2",
              "reproduce", "fig3"])
        assert (a / "fig3.csv").read_text() == (b / "fig3.csv").read_text()
