import numpy as np
import pytest

from ellgarnier import utils
from ellgarnier.projective import ProjPoint


def test_return_if_type():
    assert utils.return_if_type(None, "x", int, 3) == 3
    assert utils.return_if_type(2, "x", int, 3) == 2
    with pytest.raises(TypeError):
        utils.return_if_type("2", "x", int, 3)


def test_complex_pairs():
    """Pairs are converted back bit-exactly."""
    values = np.array([0.1 + 0.2j, -3e-300 + 1j])
    pairs = utils.complex_array_to_pairs(values)
    assert pairs[0] == [0.1, 0.2]
    assert np.array_equal(utils.pairs_to_complex_array(pairs), values)


def test_pair_to_complex():
    assert utils.pair_to_complex(2) == 2 + 0j
    with pytest.raises(ValueError):
        utils.pair_to_complex([1, 2, 3])


def test_split_complex():
    split = utils.split_complex([[1 + 2j, 3j]])
    assert split.shape == (1, 2, 2)
    assert np.array_equal(split[0, 0], [1, 2])


def test_affine_display():
    assert utils.affine_display(ProjPoint(0, 1)) == "inf"
    assert utils.affine_display(ProjPoint(2, 1j)) == [0.0, 0.5]


def test_is_away_from():
    """Distances are measured modulo the lattice p^Z."""
    p = 0.3
    assert not utils.is_away_from(p * 1j, [1j], p)
    assert utils.is_away_from(1.0, [1j], p)
    assert utils.is_away_from(1.0, [], p)


def test_sample_unit_circle():
    rng = np.random.default_rng(0)
    z = utils.sample_unit_circle(rng, [1j, -1], 0.3)
    assert np.isclose(abs(z), 1)
    assert utils.is_away_from(z, [1j, -1], 0.3)


def test_sample_generic():
    """Samples lie on the annulus and avoid the forbidden points."""
    forbidden = np.exp(2j * np.pi * np.arange(8) / 8)
    samples = utils.sample_generic(np.random.default_rng(1), 20, forbidden, 0.3)

    assert samples.shape == (20,)
    assert np.all((np.abs(samples) >= 0.85) & (np.abs(samples) <= 1.15))
    assert all(utils.is_away_from(z, forbidden, 0.3) for z in samples)


def test_sample_generic_reproducible():
    first = utils.sample_generic(np.random.default_rng(5), 4, [1], 0.3)
    second = utils.sample_generic(np.random.default_rng(5), 4, [1], 0.3)
    assert np.array_equal(first, second)
