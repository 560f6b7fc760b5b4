import json

import numpy as np
import pytest

from sun_phase.cli import (
    EXIT_CHECK_FAILURE,
    EXIT_CONFIG_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_PASS,
    dump_report,
    format_float,
    main,
)


def run_to_file(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out


def load(path):
    return json.loads(path.read_text())


class TestSerialization:
    def test_float_formatting(self):
        assert format_float(1.0) == "1"
        assert format_float(0.375) == "0.375"
        assert len(format_float(np.pi)) >= 17

    def test_report_roundtrip(self):
        report = {
            "schema": "sun-phase/1",
            "values": [1.5, 2, True, None, "text"],
            "nested": {"a": 0.1},
            "empty": [],
        }
        parsed = json.loads(dump_report(report))
        assert parsed["values"] == [1.5, 2, True, None, "text"]
        assert parsed["nested"]["a"] == 0.1
        assert parsed["empty"] == []

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            dump_report({"x": float("nan")})


class TestVerifyGroup:
    def test_su2_polar_spin_flip(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "2", "--chart", "su2-polar", "--pair",
             "spin-flip", "--points", "50", "--seed", "7"],
        )
        assert code == EXIT_PASS
        report = load(out)
        assert report["schema"] == "sun-phase/1"
        assert report["pass"] is True
        names = {c["name"] for c in report["checks"]}
        assert {"phase-identity", "modulus-identity", "orthogonality",
                "reconstruction", "gradient-lower-bound"} <= names
        for check in report["checks"]:
            if check["name"] in ("phase-identity", "modulus-identity", "orthogonality"):
                assert check["max_residual"] < 1e-8

    @pytest.mark.parametrize("chart", ["exp", "cartan"])
    def test_random_pairs_n3(self, tmp_path, chart):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "3", "--chart", chart, "--pair", "random",
             "--points", "40", "--seed", "11"],
        )
        assert code == EXIT_PASS
        assert load(out)["pass"] is True

    def test_zero_points_is_config_error(self):
        assert main(["verify-group", "--n", "2", "--points", "0"]) == EXIT_CONFIG_ERROR

    def test_su2_polar_requires_n2(self):
        code = main(["verify-group", "--n", "3", "--chart", "su2-polar", "--points", "5"])
        assert code == EXIT_CONFIG_ERROR

    def test_bad_dimension(self):
        assert main(["verify-group", "--n", "1", "--points", "5"]) == EXIT_CONFIG_ERROR

    def test_forced_tolerance_failure(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "2", "--points", "10", "--seed", "1",
             "--tol", "phase-identity=1e-20"],
        )
        assert code == EXIT_CHECK_FAILURE
        report = load(out)
        assert report["pass"] is False

    def test_inconclusive_sweep(self, tmp_path):
        # an orthogonal fixed pair sampled in a shrunken box keeps the
        # amplitude below threshold everywhere: all points skipped
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "2", "--pair", "explicit", "--psi-i", "1,0",
             "--psi-f", "0,1", "--sample-scale", "1e-4", "--points", "20"],
        )
        assert code == EXIT_INCONCLUSIVE
        report = load(out)
        assert report["inconclusive"] is True
        assert report["points_skipped_low_amplitude"] == 20

    def test_explicit_pair_normalized_with_warning(self, tmp_path, capsys):
        code, _ = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "2", "--pair", "explicit", "--psi-i", "2,0",
             "--psi-f", "0,1", "--points", "5", "--seed", "2"],
        )
        assert code == EXIT_PASS
        assert "normalizing" in capsys.readouterr().err

    def test_per_point_detail(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-group", "--n", "2", "--points", "5", "--seed", "3", "--per-point"],
        )
        assert code == EXIT_PASS
        report = load(out)
        assert len(report["per_point"]) == 5
        assert set(report["per_point"][0]) == {"x", "p", "residuals"}


class TestVerifyRay:
    @pytest.mark.parametrize("n", [2, 3])
    def test_sweep_passes(self, tmp_path, n):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-ray", "--n", str(n), "--points", "25", "--bridge-points",
             "10", "--seed", "5"],
        )
        assert code == EXIT_PASS
        report = load(out)
        assert report["pass"] is True
        names = {c["name"] for c in report["checks"]}
        assert {"ray-phase-identity", "u1-berry-proportionality",
                "fs-metric-agreement", "factorization", "bridge-phase",
                "u1-phase-rate"} <= names

    def test_sign_resolution_reported(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-ray", "--n", "2", "--points", "10", "--bridge-points", "5",
             "--seed", "6"],
        )
        assert code == EXIT_PASS
        report = load(out)
        sign = report["u1_berry_sign"]
        assert sign["residual_with_minus_coefficient"] < 1e-8
        assert sign["residual_with_plus_coefficient"] > 1e-3
        bridge = report["bridge_gauge_sign"]
        assert bridge["residual_with_minus_berry"] < 1e-4
        assert bridge["best_residual_with_plus_berry"] > 1e-3

    def test_inconclusive_orthogonal_pair(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["verify-ray", "--n", "2", "--pair", "explicit", "--psi-i", "1,0",
             "--psi-f", "0,1", "--sample-scale", "1e-4", "--points", "10"],
        )
        assert code == EXIT_INCONCLUSIVE


class TestSu2Demo:
    def test_grid_and_csv(self, tmp_path):
        csv_path = tmp_path / "grid.csv"
        out = tmp_path / "r.json"
        code = main(["su2-demo", "--grid", "21", "--out", str(out), "--csv", str(csv_path)])
        assert code == EXIT_PASS
        report = load(out)
        assert report["pass"] is True
        assert report["rows"] == 21 ** 3

        lines = csv_path.read_text().splitlines()
        assert lines[0] == "chi,theta,phi,p,eta,grad_eta_sq,inv_p,residual"
        assert len(lines) == 21 ** 3 + 1
        # the 21-point grid contains chi = theta = pi/2 and phi = 0:
        # there p = 1 and eta = pi/2
        target = None
        for line in lines[1:]:
            cells = line.split(",")
            chi, theta, phi = (float(cells[i]) for i in range(3))
            if abs(chi - np.pi / 2) < 1e-12 and abs(theta - np.pi / 2) < 1e-12 and phi == 0.0:
                target = cells
        assert target is not None
        assert float(target[3]) == pytest.approx(1.0, abs=1e-12)
        assert float(target[4]) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_closed_form_point_row(self, tmp_path):
        # chi = pi/3, theta = pi/4 is not on the grid; check the closed form
        # through the library instead of the CSV: p = 3/8
        from sun_phase.algebra import StatePair
        from sun_phase.amplitude import polar_amplitude
        from sun_phase.charts import su2_polar_chart

        chart = su2_polar_chart()
        pair = StatePair(
            np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)
        )
        amp = polar_amplitude(pair, chart.evaluate(np.array([np.pi / 3, np.pi / 4, 1.0])))
        assert amp.p == pytest.approx(3.0 / 8.0, abs=1e-14)

    def test_bad_grid(self):
        assert main(["su2-demo", "--grid", "1"]) == EXIT_CONFIG_ERROR


class TestSuperoscCommand:
    def test_random_pair_passes(self, tmp_path):
        csv_path = tmp_path / "trace.csv"
        out = tmp_path / "r.json"
        code = main(
            ["superosc", "--n", "3", "--seed", "5", "--out", str(out), "--csv", str(csv_path)]
        )
        assert code == EXIT_PASS
        report = load(out)
        assert report["pass"] is True
        assert report["omega_zero"] >= report["max_abs_eigenvalue"] - 1e-9
        assert len(report["spectrum"]) == 3
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "t,re_amplitude,im_amplitude,omega,defined"
        assert len(lines) == 1024 + 1

    def test_diagonal_pair_boundary(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            "r.json",
            ["superosc", "--n", "2", "--pair", "explicit", "--psi-i", "1,0",
             "--psi-f", "1,0", "--samples", "128"],
        )
        assert code == EXIT_PASS
        assert load(out)["boundary_case"] is True

    def test_orthogonal_pair_is_config_error(self):
        assert main(["superosc", "--n", "2", "--pair", "spin-flip"]) == EXIT_CONFIG_ERROR


class TestVortexCommand:
    def test_phi_circle(self, tmp_path):
        code, out = run_to_file(
            tmp_path, "r.json",
            ["vortex", "--loop", "phi-circle", "--theta", "0.1", "--expect", "1"],
        )
        assert code == EXIT_PASS
        assert load(out)["winding"] == 1

    def test_reversed(self, tmp_path):
        code, out = run_to_file(
            tmp_path, "r.json",
            ["vortex", "--loop", "phi-circle", "--theta", "0.1", "--reverse",
             "--expect", "-1"],
        )
        assert code == EXIT_PASS
        assert load(out)["winding"] == -1

    def test_contractible(self, tmp_path):
        code, out = run_to_file(
            tmp_path, "r.json",
            ["vortex", "--loop", "contractible", "--chi", "1.2", "--theta", "1.0",
             "--expect", "0"],
        )
        assert code == EXIT_PASS
        assert load(out)["winding"] == 0

    def test_wrong_expectation_fails(self, tmp_path):
        code, _ = run_to_file(
            tmp_path, "r.json",
            ["vortex", "--loop", "phi-circle", "--theta", "0.1", "--expect", "2"],
        )
        assert code == EXIT_CHECK_FAILURE


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["verify-group", "--n", "3", "--chart", "exp", "--points", "30", "--seed", "9"],
            ["verify-ray", "--n", "2", "--points", "15", "--bridge-points", "5", "--seed", "4"],
            ["superosc", "--n", "3", "--seed", "12"],
        ],
    )
    def test_byte_identical_reports(self, tmp_path, argv):
        _, first = run_to_file(tmp_path, "a.json", list(argv))
        _, second = run_to_file(tmp_path, "b.json", list(argv))
        assert first.read_bytes() == second.read_bytes()

    def test_csv_byte_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["su2-demo", "--grid", "6", "--csv", str(a), "--out", str(tmp_path / "ra.json")])
        main(["su2-demo", "--grid", "6", "--csv", str(b), "--out", str(tmp_path / "rb.json")])
        assert a.read_bytes() == b.read_bytes()


class TestParallelism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["verify-group", "--n", "3", "--points", "20", "--seed", "13"],
            ["verify-ray", "--n", "3", "--points", "10", "--bridge-points", "4", "--seed", "13"],
        ],
    )
    def test_threaded_sweep_matches_serial(self, tmp_path, monkeypatch, argv):
        _, serial = run_to_file(tmp_path, "serial.json", list(argv))
        monkeypatch.setenv("SUN_PHASE_THREADS", "4")
        _, threaded = run_to_file(tmp_path, "threaded.json", list(argv))
        assert serial.read_bytes() == threaded.read_bytes()


class TestConsoleScript:
    def test_installed_entrypoint(self, tmp_path):
        import shutil
        import subprocess

        exe = shutil.which("sun-phase")
        if exe is None:
            pytest.skip("console script not installed")
        out = tmp_path / "r.json"
        proc = subprocess.run(
            [exe, "vortex", "--loop", "phi-circle", "--theta", "0.1",
             "--expect", "1", "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0
        assert load(out)["winding"] == 1


class TestParser:
    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_unknown_command_exits_two(self):
        assert main(["no-such-command"]) == 2

    def test_bad_tol_spec(self):
        code = main(["verify-group", "--n", "2", "--points", "5", "--tol", "oops"])
        assert code == EXIT_CONFIG_ERROR
