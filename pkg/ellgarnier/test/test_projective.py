import numpy as np
import pytest

from ellgarnier import projective
from ellgarnier.errors import DegenerateTriple, NotSingular, ZeroMatrix
from ellgarnier.projective import ProjPoint


class TestProjPoint:
    def test_normalization(self):
        """The coordinate of larger modulus becomes exactly one."""
        point = ProjPoint(2, 4j)
        assert point.y == 1
        assert np.isclose(point.x, -0.5j)

        assert ProjPoint(3, 3) == ProjPoint(1, 1)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ProjPoint(0, 0)
        with pytest.raises(ValueError):
            ProjPoint(np.nan, 1)

    def test_affine(self):
        assert ProjPoint(2, 1).affine() == 0.5
        assert np.isinf(ProjPoint(0, 5).affine())

    def test_from_affine(self):
        assert ProjPoint.from_affine(np.inf) == ProjPoint(0, 1)
        assert ProjPoint.from_affine("inf") == ProjPoint(0, 1)
        assert ProjPoint.from_affine(0.25).affine() == 0.25

    def test_from_logs(self):
        """Points given by huge logarithms are representable."""
        point = ProjPoint.from_logs(800.0, 800.0 + np.log(2))
        assert np.isclose(point.affine(), 2)

        assert ProjPoint.from_logs(-np.inf, 3.0) == ProjPoint(0, 1)

    def test_list(self):
        point = ProjPoint(1, 0.3 - 0.2j)
        assert ProjPoint.from_list(point.to_list()) == point

    def test_str(self):
        assert str(ProjPoint(1, 0)) == "(1+0j : 0+0j)"


class TestProjectiveEquality:
    def test_proj_eq(self):
        assert projective.proj_eq(ProjPoint(1, 2), (2, 4))
        assert not projective.proj_eq(ProjPoint(1, 2), (1, 2.1))

    def test_proj_distance(self):
        assert projective.proj_distance((1, 0), (0, 1)) == 1
        assert projective.proj_distance((1, 1j), (2, 2j)) < 1e-15

    def test_cross(self):
        assert projective.cross((1, 2), (3, 4)) == -2


class TestRankOne:
    M = np.array([[1, 2], [2, 4]], dtype=complex)

    def test_kernel(self):
        kernel = projective.kernel_of(self.M)
        assert np.allclose(self.M @ kernel.vector(), 0)

    def test_image(self):
        assert projective.proj_eq(projective.image_of(self.M), (1, 2))

    def test_not_singular(self):
        with pytest.raises(NotSingular):
            projective.kernel_of(np.eye(2))
        with pytest.raises(NotSingular):
            projective.image_of(np.eye(2))

    def test_zero_matrix(self):
        with pytest.raises(ZeroMatrix):
            projective.kernel_of(np.zeros((2, 2)))

    def test_adjugate(self):
        """M adj(M) = det(M) I."""
        M = np.array([[1 + 1j, 2], [0.5, -3j]])
        product = M @ projective.adjugate(M)
        assert np.allclose(product, np.linalg.det(M) * np.eye(2))

    def test_as_mat2(self):
        assert projective.as_mat2([[1, 0], [0, 1]]).dtype == complex
        with pytest.raises(ValueError):
            projective.as_mat2(np.eye(3))
        with pytest.raises(ValueError):
            projective.as_mat2([[np.inf, 0], [0, 1]])


class TestFrame:
    def test_standard_frame(self):
        """N maps (1:0), (0:1), (1:1) onto the three given points."""
        p_i, p_j, p_k = ProjPoint(1, 2j), ProjPoint(-0.5, 1), ProjPoint(3, 1 + 1j)
        N = projective.n_ijk(p_i, p_j, p_k)

        assert projective.proj_eq(N @ [1, 0], p_i, 1e-12)
        assert projective.proj_eq(N @ [0, 1], p_j, 1e-12)
        assert projective.proj_eq(N @ [1, 1], p_k, 1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateTriple):
            projective.n_ijk(ProjPoint(1, 0), ProjPoint(2, 0), ProjPoint(1, 1))


class TestMatchPointSets:
    points = [
        (ProjPoint(1, 0), ProjPoint(1, 1)),
        (ProjPoint(0, 1), ProjPoint(1, 2)),
        (ProjPoint(1, 1j), ProjPoint(1, -1)),
    ]

    def test_permutation(self):
        permuted = [self.points[2], self.points[0], self.points[1]]
        assert projective.match_point_sets(self.points, permuted) == [1, 2, 0]

    def test_mismatch(self):
        other = self.points[:2] + [(ProjPoint(1, 1j), ProjPoint(1, 5))]
        assert projective.match_point_sets(self.points, other) is None
        assert projective.match_point_sets(self.points, self.points[:2]) is None
