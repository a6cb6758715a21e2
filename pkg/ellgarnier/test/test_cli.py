import json

import numpy as np
import pytest

from ellgarnier import __version__, garnier, painleve, statefile
from ellgarnier.cli import build_parser, main


def read_output(capsys):
    return json.loads(capsys.readouterr().out)


def read_lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines()]


class TestParser:
    def test_subcommands(self):
        args = build_parser().parse_args(["orbit", "--steps", "3", "--seed", "1"])
        assert args.command == "orbit"
        assert args.steps == 3 and args.seed == 1
        assert args.tol is None

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_complex_flag(self):
        args = build_parser().parse_args(
            ["theta-eval", "--z", "0.5,-0.2", "--nome", "0.3,0"]
        )
        assert args.z == 0.5 - 0.2j

    def test_bad_complex_flag(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["theta-eval", "--z", "0.5", "--nome", "0.3,0"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit):
            main(["--version"])
        assert __version__ in capsys.readouterr().out


class TestVerify:
    def test_fixture(self, capsys):
        """The reference state passes all checks."""
        assert main(["verify", "--state", "fixture-1"]) == 0

        output = read_output(capsys)
        assert output["report"]["passed"] is True
        assert output["header"]["source"] == "fixture-1"
        names = [check["name"] for check in output["report"]["checks"]]
        assert "certificate_iota" in names

    def test_strict_tolerance(self, capsys):
        """Residuals at rounding level fail a tolerance below them."""
        assert main(["verify", "--state", "fixture-1", "--tol", "1e-15"]) == 1
        assert read_output(capsys)["report"]["passed"] is False

    def test_painleve_file(self, tmp_path, capsys):
        path = tmp_path / "state.json"
        statefile.save_state(painleve.normalize(garnier.fixture()), path)

        assert main(["verify", "--state", str(path)]) == 0
        names = [check["name"] for check in read_output(capsys)["report"]["checks"]]
        assert "lax" in names
        assert "garnier_det_u0" in names

    def test_missing_file(self, tmp_path):
        assert main(["verify", "--state", str(tmp_path / "missing.json")]) == 2

    def test_bad_state_file(self, tmp_path):
        path = tmp_path / "state.json"
        path.write_text(json.dumps({"kind": "garnier", "m": 1}))
        assert main(["verify", "--state", str(path)]) == 2

    def test_output_file(self, tmp_path):
        path = tmp_path / "report.json"
        assert main(["verify", "--out", str(path)]) == 0
        assert json.loads(path.read_text())["report"]["passed"] is True


class TestOrbit:
    def test_stdout(self, capsys):
        assert main(["orbit", "--steps", "2"]) == 0

        lines = read_lines(capsys)
        assert len(lines) == 3
        assert lines[0]["command"] == "orbit"
        assert lines[0]["source"] == "fixture-1"
        assert [line["step"] for line in lines[1:]] == [1, 2]

    def test_zero_steps(self, capsys):
        assert main(["orbit", "--steps", "0"]) == 0
        assert len(read_lines(capsys)) == 1

    def test_reproducible(self, tmp_path):
        """Reruns with the same seed write byte-identical files."""
        paths = [tmp_path / "first.jsonl", tmp_path / "second.jsonl"]
        for path in paths:
            argv = ["orbit", "--steps", "3", "--seed", "2", "--out", str(path)]
            assert main(argv) == 0

        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_netcdf(self, tmp_path):
        path = tmp_path / "orbit.nc"
        assert main(["orbit", "--steps", "1", "--out", str(path)]) == 0
        assert path.exists()

    def test_order_two(self):
        """Orbits need states of order one."""
        assert main(["orbit", "--state", "random-m2", "--steps", "1"]) == 2

    def test_collision(self, tmp_path, capsys):
        X = painleve.normalize(garnier.fixture())
        f, g = painleve.base_points(X)[0]
        path = tmp_path / "state.json"
        statefile.save_state(X.replace(f=f, g=g), path)

        assert main(["orbit", "--state", str(path), "--steps", "3"]) == 1
        assert read_lines(capsys)[1]["collision"] is not None

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"command": "orbit", "steps": 1, "seed": 3}))

        assert main(["orbit", "--config", str(path)]) == 0
        lines = read_lines(capsys)
        assert lines[0]["seed"] == 3
        assert len(lines) == 2

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"command": "orbit", "steps": -1}))
        assert main(["orbit", "--config", str(path)]) == 2


class TestDeform:
    def test_program(self, capsys):
        """E_34 followed by F_34 translates u_3 and u_4 by q."""
        argv = ["deform", "--state", "random-m2", "--program", "E(3,4) F(3,4)"]
        assert main(argv) == 0

        head, first, second = read_lines(capsys)
        assert head["initial"]["m"] == 2
        assert [first["kind"], second["kind"]] == ["E", "F"]

        before = garnier.GarnierState.from_dict(head["initial"])
        after = garnier.GarnierState.from_dict(second["state"])
        q = before.base.q
        assert np.allclose(after.u[[3, 4]], q * before.u[[3, 4]], rtol=1e-12)

    def test_empty_program(self):
        assert main(["deform", "--program", "  "]) == 2

    def test_invalid_program(self):
        assert main(["deform", "--program", "E(3,4) G"]) == 2

    def test_out_of_range(self):
        """Indices outside the state are usage errors."""
        assert main(["deform", "--program", "E(3,9)"]) == 2


class TestBasePoints:
    def test_fixture(self, capsys):
        assert main(["base-points"]) == 0

        points = read_output(capsys)["points"]
        assert [p["index"] for p in points] == list(range(1, 9))
        # P_1 lies on g = 0, P_2 on g = inf.
        assert np.hypot(*points[0]["g_coordinates"][2:]) < 1e-12
        assert np.hypot(*points[1]["g_coordinates"][:2]) < 1e-12


class TestThetaEval:
    def test_values(self, capsys):
        assert main(["theta-eval", "--z", "0.5,0.2", "--nome", "0.3,0"]) == 0

        output = read_output(capsys)
        assert "source" not in output["header"]
        assert np.allclose(output["theta"], output["theta_series"], rtol=1e-12)

    def test_invalid_nome(self):
        assert main(["theta-eval", "--z", "0.5,0.2", "--nome", "1.5,0"]) == 2
