"""Tests for Φ, lifted loops and strong lifts."""

import numpy as np
import pytest


def _rotating_pair(seed, max_dim=5, grid=128, drifting=False):
    """A rotating-diagonal path and its conjugate by a seeded unitary."""
    from spectralloop.linalg import random_unitary
    from spectralloop.operators import conjugate_path, rotating_diagonal_path

    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, max_dim + 1))
    eigenvalues = 0.3 * np.arange(1, dim + 1) * (1 + 0.3j)
    drift = np.zeros(dim, dtype=complex)
    if drifting:
        eigenvalues[0] = -0.05
        drift[0] = -0.6
    m = rng.standard_normal((dim, dim))
    a = rotating_diagonal_path(eigenvalues, (m + m.T) / (4 * dim), grid, drift=drift)
    return a, conjugate_path(a, random_unitary(dim, rng))


def _spinning_loop():
    """A loop whose eigenvectors turn once around the line spanned by (1, 1, 1)."""
    from spectralloop.operators import OperatorPath, rotating_diagonal_path

    v = np.ones(3) / np.sqrt(3)
    path = rotating_diagonal_path(
        np.array([1.0, 0.6 + 0.3j, -0.5]), 2 * np.pi * np.outer(v, v), 256
    )
    return OperatorPath.from_matrices(path.matrices)


class TestBuildPhi:
    """Test the triple path of two approximants."""

    def test_triples(self):
        """One triple per grid point, consecutive ones within a chart."""
        from spectralloop.equivalence import build_phi

        a, b = _rotating_pair(0)
        phi = build_phi(a, b, 0.1)

        assert phi.grid_size == 128
        assert phi.size == a.dim
        assert phi.dim == a.dim
        assert not phi.is_loop
        assert np.all(phi.distances < 0.25)
        for g in range(0, 129, 32):
            triple = phi.triples[g]
            expected = np.sort_complex(np.linalg.eigvals(a.matrices[g]))
            assert np.allclose(np.sort_complex(triple.labels), expected)

    def test_pairs_equal_eigenvalues(self):
        """σ pairs each p-eigenvector with a q-eigenvector of the same eigenvalue."""
        from spectralloop.equivalence import build_phi

        a, b = _rotating_pair(1)
        phi = build_phi(a, b, 0.1)

        for g in (0, 64, 128):
            triple = phi.triples[g]
            for i in range(triple.size):
                p = triple.p_vectors[:, i]
                q = triple.partner(i)
                assert np.allclose(a.matrices[g] @ p, triple.labels[i] * p, atol=1e-9)
                assert np.allclose(b.matrices[g] @ q, triple.labels[i] * q, atol=1e-9)

    def test_loop_closes(self):
        """Loops carry a closing match."""
        from spectralloop.equivalence import build_phi

        a = _spinning_loop()
        phi = build_phi(a, a, 0.1)

        assert phi.is_loop
        assert phi.closing.value < 1e-9

    def test_grid_mismatch(self):
        """Grids must agree."""
        from spectralloop.equivalence import build_phi
        from spectralloop.errors import SizeMismatch

        a, _ = _rotating_pair(2)
        b, _ = _rotating_pair(2, grid=64)
        with pytest.raises(SizeMismatch):
            build_phi(a, b, 0.1)

    def test_spectra_mismatch(self):
        """Retained spectra must agree."""
        from spectralloop.equivalence import build_phi
        from spectralloop.errors import SpectraMismatch

        a, b = _rotating_pair(3)
        with pytest.raises(SpectraMismatch):
            build_phi(a, b.with_matrices(1.1 * b.matrices), 0.1)

    def test_chart_too_coarse(self):
        """A 45° jump of the eigenvectors leaves the chart."""
        from spectralloop.equivalence import build_phi
        from spectralloop.errors import ChartTooCoarse
        from spectralloop.operators import OperatorPath

        r = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2)
        d = np.diag([1.0, 2.0])
        path = OperatorPath.from_matrices([d, r @ d @ r.T, d])
        with pytest.raises(ChartTooCoarse):
            build_phi(path, path, 0.1)


class TestLifts:
    """Test intertwining partial isometries."""

    def test_lift_path_intertwines(self):
        """W maps each p-eigenline onto its partner."""
        from spectralloop.equivalence import build_phi, lift_path

        a, b = _rotating_pair(4)
        lifted = lift_path(build_phi(a, b, 0.1))

        assert lifted.grid_size == 128
        assert np.max(lifted.residuals) < 1e-8
        assert lifted.closure_phases is None
        for g in range(0, 129, 16):
            w = lifted.samples[g]
            assert np.allclose(w @ a.matrices[g] @ w.conj().T, b.matrices[g], atol=1e-8)

    def test_lift_loop_closes(self):
        """The lifted loop returns to its start."""
        from spectralloop.equivalence import build_phi, lift_loop
        from spectralloop.linalg import random_unitary
        from spectralloop.operators import conjugate_path

        a = _spinning_loop()
        b = conjugate_path(a, random_unitary(3, np.random.default_rng(5)))
        lifted = lift_loop(build_phi(a, b, 0.1))

        assert np.array_equal(lifted.samples[0], lifted.samples[-1])
        assert np.max(lifted.residuals) < 1e-8
        assert lifted.closure_phases is not None
        assert len(lifted.closure_phases.values) == 3
        for g in range(0, 257, 32):
            w = lifted.samples[g]
            assert np.allclose(w @ a.matrices[g] @ w.conj().T, b.matrices[g], atol=1e-8)

    def test_lift_loop_needs_loop(self):
        """Paths cannot be lifted as loops."""
        from spectralloop.equivalence import build_phi, lift_loop
        from spectralloop.errors import NotALoop

        a, b = _rotating_pair(6)
        with pytest.raises(NotALoop):
            lift_loop(build_phi(a, b, 0.1))


class TestStrongLift:
    """Test unitary paths conjugating one path into another."""

    def test_conjugate_pairs(self):
        """Seeded conjugate pairs lift with residual at most 1e-7."""
        from spectralloop.equivalence import strong_lift_path
        from spectralloop.linalg import unitarity_defect

        for seed in range(50):
            a, b = _rotating_pair(100 + seed, max_dim=8)
            lift = strong_lift_path(a, b)
            assert lift.max_residual <= 1e-7
            assert lift.max_residual <= lift.bound
            assert lift.samples.shape == (129, a.dim, a.dim)
            assert unitarity_defect(lift.samples[64]) < 1e-8

    def test_completes_tail(self):
        """Eigenvalues under the threshold are matched by completions."""
        from spectralloop.equivalence import strong_lift_path
        from spectralloop.linalg import unitarity_defect
        from spectralloop.operators import OperatorPath

        d = np.diag([1.0, 0.5, 0.01])
        v = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
        a = OperatorPath.from_matrices([d] * 3)
        b = OperatorPath.from_matrices([v @ d @ v.T] * 3)
        lift = strong_lift_path(a, b, threshold=0.1)

        assert lift.bound == pytest.approx(1e-8 + 0.2)
        assert lift.max_residual < 0.03
        assert unitarity_defect(lift.samples[0]) < 1e-12

    def test_needs_condition1(self):
        """A born track is rejected."""
        from spectralloop.equivalence import strong_lift_path
        from spectralloop.errors import Condition1Missing

        a, b = _rotating_pair(7, drifting=True)
        with pytest.raises(Condition1Missing):
            strong_lift_path(a, b, threshold=0.1)

    def test_loop_is_lifted_as_path(self):
        """A loop gives the same lift as its unrolled path."""
        from spectralloop.equivalence import strong_lift_path
        from spectralloop.linalg import random_unitary
        from spectralloop.operators import conjugate_path, unroll_loop

        a = _spinning_loop()
        b = conjugate_path(a, random_unitary(3, np.random.default_rng(5)))
        lift = strong_lift_path(a, b)
        unrolled = strong_lift_path(unroll_loop(a), unroll_loop(b))

        assert a.is_loop
        assert lift.max_residual <= 1e-7
        assert np.allclose(lift.samples, unrolled.samples)
