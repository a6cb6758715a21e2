import json

import netCDF4
import numpy as np
import pytest

from ellgarnier import core, garnier, painleve
from ellgarnier.core import Orbit
from ellgarnier.errors import SingularAtPoint
from ellgarnier.report import Report


@pytest.fixture
def X():
    return painleve.normalize(garnier.fixture())


class TestOrbit:
    def test_init(self, X):
        orbit = Orbit(X, steps=3)
        assert orbit.steps == 3
        assert orbit.records == []
        assert orbit.initial is X

    def test_garnier_input(self):
        """Garnier states of order one are normalized first."""
        orbit = Orbit(garnier.fixture(), steps=1)
        assert isinstance(orbit.state, painleve.PainleveState)

    def test_invalid_input(self, X):
        with pytest.raises(TypeError):
            Orbit("fixture-1", steps=1)
        with pytest.raises(ValueError):
            Orbit(garnier.random_state(2), steps=1)
        with pytest.raises(ValueError):
            Orbit(X, steps=-1)

    def test_run(self, X):
        """A long orbit stays certified."""
        orbit = Orbit(X, steps=20)
        orbit.run()

        assert len(orbit.records) == 20
        assert orbit.passed
        assert max(r["lax_residual"] for r in orbit.records) <= 1e-6
        assert max(r["state_residual"] for r in orbit.records) <= 1e-6

    def test_points_move(self, X):
        orbit = Orbit(X, steps=3)
        orbit.run()

        q = X.base.q
        assert np.allclose(orbit.state.u[3], q**3 * X.u[3], rtol=1e-12, atol=0)
        assert [r["step"] for r in orbit.records] == [1, 2, 3]

    def test_pipeline(self, X):
        closed = Orbit(X, steps=2)
        pipeline = Orbit(X, steps=2, method="pipeline")
        closed.run()
        pipeline.run()

        assert painleve.painleve_distance(closed.state, pipeline.state) < 1e-8

    def test_collision(self, X):
        """The orbit stops at a base point and flags the record."""
        f, g = painleve.base_points(X)[2]
        orbit = Orbit(X.replace(f=f, g=g), steps=5)
        orbit.run()

        assert len(orbit.records) == 1
        assert orbit.records[0]["collision"] is not None
        assert orbit.records[0]["lax_residual"] is None
        assert not orbit.passed

    def test_forwards_method(self, X, monkeypatch):
        """The certificate checks the step the orbit actually takes."""
        calls = []

        def certificate(state, **kwargs):
            calls.append(kwargs)
            return 0.0

        monkeypatch.setattr(core, "lax_certificate", certificate)
        orbit = Orbit(X, steps=2, method="pipeline")
        orbit.run()

        assert [c["method"] for c in calls] == ["pipeline", "pipeline"]
        assert calls[-1]["image"] is orbit.state

    def test_certificate_failure(self, X, monkeypatch):
        """A certificate that cannot be evaluated fails the step."""

        def certificate(state, **kwargs):
            raise SingularAtPoint("B is singular at a sample point.")

        monkeypatch.setattr(core, "lax_certificate", certificate)
        orbit = Orbit(X, steps=3)
        orbit.run()

        assert len(orbit.records) == 3
        assert all(r["lax_residual"] is None for r in orbit.records)
        assert "singular" in orbit.records[0]["error"]
        assert not orbit.passed

    def test_nan_state_residual(self, X, monkeypatch):
        def verify(state, tol, **kwargs):
            report = Report("PainleveState", tolerance=tol)
            report.add("kernel_u3", 1e-12)
            report.add("det_u0", np.nan)
            return report

        monkeypatch.setattr(core, "verify_painleve", verify)
        orbit = Orbit(X, steps=1)
        orbit.run()

        assert np.isnan(orbit.records[0]["state_residual"])
        assert not orbit.passed

    def test_header(self, X):
        orbit = Orbit(X, steps=0, metadata={"source": "fixture-1"})
        header = orbit.header()

        assert header["steps"] == 0
        assert header["source"] == "fixture-1"
        assert header["initial"]["kind"] == "painleve"

    def test_repr(self, X):
        text = repr(Orbit(X, steps=2))
        assert text.startswith("Orbit(")
        assert "records" not in text


class TestOutput:
    def test_jsonl(self, X, tmp_path):
        """Line-delimited JSON with one header line and one line per step."""
        path = tmp_path / "orbit.jsonl"
        Orbit(X, steps=2, outfile=str(path)).run()

        lines = path.read_text().splitlines()
        assert len(lines) == 3

        header = json.loads(lines[0])
        assert header["experiment"] == "orbit"

        record = json.loads(lines[1])
        assert record["step"] == 1
        assert len(record["u"]) == 8
        assert record["passed"] is True

    def test_empty_orbit(self, X, tmp_path):
        path = tmp_path / "empty.jsonl"
        Orbit(X, steps=0, outfile=str(path)).run()
        assert len(path.read_text().splitlines()) == 1

    def test_reproducible(self, X, tmp_path):
        """Identical runs write identical files."""
        paths = [tmp_path / "first.jsonl", tmp_path / "second.jsonl"]
        for path in paths:
            Orbit(X, steps=2, outfile=str(path), seed=4).run()

        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_netcdf(self, X, tmp_path):
        path = tmp_path / "orbit.nc"
        Orbit(X, steps=2, outfile=str(path)).run()

        with netCDF4.Dataset(path) as root:
            assert root.dimensions["step"].size == 2
            assert root["u"].shape == (2, 8, 2)
            assert list(root["step"][:]) == [1, 2]
            assert root.title == "orbit"

    def test_netcdf_reproducible(self, X, tmp_path):
        """Runs with the same seed differ in the creation time only."""
        paths = [tmp_path / "first.nc", tmp_path / "second.nc"]
        for path in paths:
            Orbit(X, steps=2, outfile=str(path), seed=4).run()

        with netCDF4.Dataset(paths[0]) as first, netCDF4.Dataset(paths[1]) as second:
            attributes = set(first.ncattrs()) - {"created"}
            assert attributes == set(second.ncattrs()) - {"created"}
            for name in attributes:
                assert first.getncattr(name) == second.getncattr(name)
            for name in first.variables:
                assert np.array_equal(first[name][:], second[name][:])

    def test_empty_netcdf(self, X, tmp_path):
        path = tmp_path / "empty.nc"
        Orbit(X, steps=0, outfile=str(path)).run()

        with netCDF4.Dataset(path) as root:
            assert root.dimensions["step"].size == 0

    def test_to_dataset(self, X):
        orbit = Orbit(X, steps=2)
        orbit.run()
        dataset = orbit.to_dataset()

        assert dataset["u"].dims == ("step", "point", "complex")
        assert dataset["f"].shape == (2, 2, 2)
        assert list(dataset["step"].values) == [1, 2]
        assert dataset["u"].attrs["long_name"] == "singular points"
        assert not dataset["collision"].values.any()
