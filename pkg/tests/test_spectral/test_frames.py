"""Tests for eigenframes and separation radii."""

import numpy as np
import pytest


def _normal(eigenvalues, seed=0):
    from spectralloop.linalg import random_unitary

    u = random_unitary(len(eigenvalues), np.random.default_rng(seed))
    return u @ np.diag(eigenvalues) @ u.conj().T


class TestEigenFrame:
    """Test thresholded eigenframes."""

    def test_order_and_threshold(self):
        """Retained pairs come by descending modulus."""
        from spectralloop.spectral import eigen_frame

        frame = eigen_frame(_normal([0.5, -1.5, 1.0, 0.01, 2j]), threshold=0.1)

        assert frame.size == 4
        assert np.allclose(frame.eigenvalues, [2j, -1.5, 1.0, 0.5])
        assert len(frame.spectrum) == 5
        assert abs(frame.spectrum[-1] - 0.01) < 1e-12

    def test_eigenvectors(self):
        """Columns are orthonormal eigenvectors."""
        from spectralloop.spectral import eigen_frame

        matrix = _normal([3.0, 1 + 1j, -2.0, 0.5j], seed=1)
        frame = eigen_frame(matrix, threshold=0.0)

        assert np.allclose(frame.vectors.conj().T @ frame.vectors, np.eye(4), atol=1e-12)
        for lam, p, v in frame.pairs:
            assert np.allclose(matrix @ v, lam * v, atol=1e-12)
            assert np.allclose(p @ p, p, atol=1e-12)
        assert frame.projections.shape == (4, 4, 4)

    def test_phase_convention(self):
        """The largest component of each eigenvector is real and positive."""
        from spectralloop.spectral import eigen_frame

        frame = eigen_frame(_normal([1.0, 2.0, 3.0], seed=2), threshold=0.0)
        lead = frame.vectors[np.argmax(np.abs(frame.vectors), axis=0), np.arange(3)]

        assert np.allclose(lead.imag, 0.0)
        assert np.all(lead.real > 0)

    def test_multiplicity(self):
        """A repeated retained eigenvalue is refused."""
        from spectralloop.errors import MultiplicityViolation
        from spectralloop.spectral import eigen_frame

        with pytest.raises(MultiplicityViolation):
            eigen_frame(np.diag([1.0, 1.0, 2.0]), threshold=0.1)

    def test_repeated_tail_is_allowed(self):
        """Repeated eigenvalues inside the threshold disc are not tracked."""
        from spectralloop.spectral import eigen_frame

        frame = eigen_frame(np.diag([1.0, 0.0, 0.0]), threshold=0.1)

        assert frame.size == 1

    def test_tail_neighbour_is_not_a_repeat(self):
        """A tail eigenvalue just inside the circle does not clash with a retained one."""
        from spectralloop.spectral import eigen_frame

        frame = eigen_frame(np.diag([1.0, 0.5 + 5e-9, 0.5 - 2e-9]), threshold=0.5)

        assert frame.size == 2
        assert frame.spectrum.size == 3


class TestSeparationRadii:
    """Test separation and resolvent radii."""

    def test_deltas(self):
        """δ is a third of the smallest of the gaps and the distance to the disc."""
        from spectralloop.spectral import eigen_frame, separation_radii

        frame = eigen_frame(np.diag([1.0, 0.7, 0.3]), threshold=0.1)
        gaps = separation_radii(frame)

        assert np.allclose(gaps.delta, [0.1, 0.1, 0.2 / 3])
        assert gaps.balls_disjoint(frame.eigenvalues)

    def test_resolvent_bound(self):
        """For a normal matrix the bound is the distance of the annulus to the spectrum."""
        from spectralloop.spectral import eigen_frame, separation_radii

        frame = eigen_frame(_normal([2.0, -2.0, 2j]), threshold=0.0)
        gaps = separation_radii(frame)

        assert np.allclose(gaps.resolvent, gaps.delta / 4, rtol=1e-8)
        assert np.array_equal(gaps.alpha, gaps.resolvent)

    def test_balls_overlap(self):
        """Overlapping balls are detected."""
        from spectralloop.spectral.frames import GapData

        gaps = GapData(np.array([0.3, 0.3]), np.ones(2), np.ones(2), np.ones(2))

        assert not gaps.balls_disjoint(np.array([1.0, 1.5]))


class TestLocalMultiplicity:
    """Test the Riesz-trace multiplicity check."""

    def test_single_eigenvalue(self):
        """One eigenvalue in the disc along the path passes."""
        from spectralloop.operators import OperatorPath
        from spectralloop.spectral import local_multiplicity_check

        path = OperatorPath.from_matrices([np.diag([1.0, 2.0, 3.0])] * 5)

        assert local_multiplicity_check(path, 2, 1.0, 0.5)

    def test_two_eigenvalues(self):
        """Two eigenvalues in the disc fail."""
        from spectralloop.operators import OperatorPath
        from spectralloop.spectral import local_multiplicity_check

        path = OperatorPath.from_matrices([np.diag([1.0, 2.0, 3.0])] * 5)

        assert not local_multiplicity_check(path, 0, 1.5, 2.0)

    def test_arguments(self):
        """Off-grid indices and nonpositive radii are rejected."""
        from spectralloop.operators import OperatorPath
        from spectralloop.spectral import local_multiplicity_check

        path = OperatorPath.from_matrices([np.diag([1.0, 2.0])] * 3)

        with pytest.raises(ValueError):
            local_multiplicity_check(path, 3, 1.0, 0.5)
        with pytest.raises(ValueError):
            local_multiplicity_check(path, 0, 1.0, 0.0)

    def test_neighbour_on_the_circle(self):
        """A neighbour whose eigenvalue lies on the circle is not certified."""
        from spectralloop.operators import OperatorPath
        from spectralloop.spectral import local_multiplicity_check

        path = OperatorPath.from_matrices(
            [np.diag([1.0, 2.0]), np.diag([1.25, 2.0]), np.diag([1.5, 2.0])]
        )

        assert not local_multiplicity_check(path, 0, 1.0, 0.5)

    def test_circle_through_the_sample(self):
        """A circle through an eigenvalue of the sample itself is an error."""
        from spectralloop.errors import ContourHitsSpectrum
        from spectralloop.operators import OperatorPath
        from spectralloop.spectral import local_multiplicity_check

        path = OperatorPath.from_matrices([np.diag([1.0, 2.0])] * 3)

        with pytest.raises(ContourHitsSpectrum):
            local_multiplicity_check(path, 0, 1.25, 0.5)
