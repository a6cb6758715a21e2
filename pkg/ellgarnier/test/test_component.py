import numpy as np
import pytest
import xarray as xr

from ellgarnier.component import Component


class Points(Component):
    def __init__(self):
        self.label = "demo"
        self.base = 0.3 + 0.1j
        self.create_variable("u", np.array([1.1, 0.9j, -1.0]))


@pytest.fixture
def points():
    return Points()


class TestComponent:
    def test_attrs(self, points):
        """Public attributes are tracked, coordinates are not."""
        assert points.attrs == {"label": "demo", "base": 0.3 + 0.1j}
        assert "coords" not in points.attrs

    def test_create_variable(self, points):
        """Default dimensions are looked up in the variable descriptions."""
        assert points.data_vars["u"][0] == ("point",)
        assert np.array_equal(points.coords["point"], np.arange(3))

    def test_unknown_dims(self, points):
        with pytest.raises(ValueError):
            points.create_variable("unknown", np.zeros(3))

    def test_wrong_rank(self, points):
        with pytest.raises(ValueError):
            points.create_variable("u", np.zeros((3, 2)))

    def test_setitem_keeps_dims(self, points):
        points["u"] = np.zeros(3)
        assert points.data_vars["u"][0] == ("point",)

    def test_get(self, points):
        assert points.get("u").shape == (3,)
        assert points.get("missing", default=[1]) == [1]
        with pytest.raises(KeyError):
            points.get("missing")

    def test_to_dataset(self, points):
        """Complex attributes are stored as strings, descriptions are added."""
        dataset = points.to_dataset()
        assert isinstance(dataset, xr.Dataset)
        assert dataset.attrs["label"] == "demo"
        assert dataset.attrs["base"] == str(0.3 + 0.1j)
        assert dataset["u"].attrs["long_name"] == "singular points"
        assert "dims" not in dataset["u"].attrs

    def test_unhashable(self, points):
        with pytest.raises(TypeError):
            hash(points)

    def test_hash_attributes(self, points):
        """Equal attributes give equal hashes."""
        assert points.hash_attributes() == Points().hash_attributes()

    def test_str(self, points):
        assert str(points) == "Points"
        assert repr(points).startswith("<Points(point: 3)")
