"""Tests for projection triples and the bottleneck metric."""

import itertools

import numpy as np
import pytest


def _random_triple(rng, n, dim):
    from spectralloop.geometry import ProjectionTriple
    from spectralloop.linalg import random_unitary

    p = random_unitary(dim, rng)[:, :n]
    q = random_unitary(dim, rng)[:, :n]
    return ProjectionTriple.from_vectors(p, q, rng.permutation(n))


def _perturbed(rng, triple, scale):
    from scipy.linalg import expm, logm

    from spectralloop.geometry import ProjectionTriple
    from spectralloop.linalg import random_unitary

    dim = triple.dim
    rot = random_unitary(dim, rng)
    small = expm(scale * logm(rot))
    return ProjectionTriple.from_vectors(
        small @ triple.p_vectors, small @ triple.q_vectors, triple.sigma
    )


def _brute_force(a, b):
    from spectralloop.geometry import cost_matrix

    cost = cost_matrix(a, b)
    best, best_tau = np.inf, None
    for perm in itertools.permutations(range(a.size)):
        value = max(cost[i, j] for i, j in enumerate(perm))
        if value < best:
            best, best_tau = value, perm
    return best, np.array(best_tau)


class TestRank1Distance:
    """Test the rank-one projection distance."""

    def test_identical(self):
        """Equal vectors have distance exactly 0."""
        from spectralloop.geometry import rank1_distance

        v = np.array([1.0, 2j, -0.5])

        assert rank1_distance(v, v) == 0.0
        assert rank1_distance(v, 3j * v) < 1e-15

    def test_orthogonal(self):
        """Orthogonal vectors have distance 1."""
        from spectralloop.geometry import rank1_distance

        assert rank1_distance(np.array([1.0, 0.0]), np.array([0.0, 1j])) == 1.0

    def test_matches_operator_norm(self):
        """The closed form equals ‖vv* − ww*‖."""
        from spectralloop.geometry import rank1_distance
        from spectralloop.linalg import operator_norm, projector, unit

        rng = np.random.default_rng(0)
        for _ in range(20):
            v = unit(rng.standard_normal(4) + 1j * rng.standard_normal(4))
            w = unit(rng.standard_normal(4) + 1j * rng.standard_normal(4))
            expected = operator_norm(projector(v) - projector(w))
            assert rank1_distance(v, w) == pytest.approx(expected, abs=1e-12)


class TestProjectionTriple:
    """Test triple construction."""

    def test_normalizes(self):
        """Representatives are normalized."""
        from spectralloop.geometry import ProjectionTriple

        triple = ProjectionTriple.from_vectors(2 * np.eye(3)[:, :2], np.eye(3)[:, 1:])

        assert np.allclose(np.linalg.norm(triple.p_vectors, axis=0), 1.0)
        assert np.array_equal(triple.sigma, [0, 1])
        assert np.allclose(triple.partner(1), np.eye(3)[:, 2])

    def test_supports(self):
        """p_support and q_support are the summed projections."""
        from spectralloop.geometry import ProjectionTriple

        triple = ProjectionTriple.from_vectors(np.eye(3)[:, :2], np.eye(3)[:, 1:], [1, 0])

        assert np.allclose(triple.p_support, np.diag([1, 1, 0]))
        assert np.allclose(triple.q_support, np.diag([0, 1, 1]))
        assert np.allclose(triple.p(0) + triple.p(1), triple.p_support)
        assert np.allclose(triple.q(0), np.diag([0, 1, 0]))

    def test_rejects_bad_sigma(self):
        """sigma must be a permutation."""
        from spectralloop.geometry import ProjectionTriple

        with pytest.raises(ValueError):
            ProjectionTriple.from_vectors(np.eye(3)[:, :2], np.eye(3)[:, :2], [0, 0])

    def test_rejects_non_orthogonal(self):
        """A family of overlapping lines is not a triple."""
        from spectralloop.geometry import ProjectionTriple

        p = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            ProjectionTriple.from_vectors(p, np.eye(2))

    def test_shape_mismatch(self):
        """Families of different size are refused."""
        from spectralloop.geometry import ProjectionTriple

        with pytest.raises(ValueError):
            ProjectionTriple.from_vectors(np.eye(3)[:, :2], np.eye(3))


class TestMetricAxioms:
    """Test that the bottleneck distance is a metric."""

    def test_axioms(self):
        """Symmetry and identity hold exactly, the triangle inequality to 1e-10."""
        from spectralloop.geometry import bottleneck_distance

        rng = np.random.default_rng(1)
        for _ in range(500):
            n = int(rng.integers(1, 7))
            dim = n + int(rng.integers(0, 3))
            a = _random_triple(rng, n, dim)
            b = _random_triple(rng, n, dim)
            c = _perturbed(rng, b, 0.05) if rng.random() < 0.5 else _random_triple(rng, n, dim)

            ab = bottleneck_distance(a, b).value
            assert ab == bottleneck_distance(b, a).value
            assert bottleneck_distance(a, a).value == 0.0
            ac = bottleneck_distance(a, c).value
            bc = bottleneck_distance(b, c).value
            assert ac <= ab + bc + 1e-10

    def test_size_mismatch(self):
        """Triples of different size are not compared."""
        from spectralloop.errors import SizeMismatch
        from spectralloop.geometry import bottleneck_distance

        rng = np.random.default_rng(2)
        with pytest.raises(SizeMismatch):
            bottleneck_distance(_random_triple(rng, 2, 4), _random_triple(rng, 3, 4))

    def test_empty(self):
        """Empty triples are at distance 0."""
        from spectralloop.geometry import ProjectionTriple, bottleneck_distance

        empty = ProjectionTriple.from_vectors(np.zeros((3, 0)), np.zeros((3, 0)))

        assert bottleneck_distance(empty, empty).value == 0.0


class TestBottleneckOracle:
    """Test the bottleneck search against factorial enumeration."""

    def test_brute_force(self):
        """The value equals the brute-force minimum; the pairing too below 1/2."""
        from spectralloop.geometry import ProjectionTriple, bottleneck_distance

        rng = np.random.default_rng(3)
        for k in range(200):
            n = int(rng.integers(1, 8))
            dim = n + int(rng.integers(0, 2))
            a = _random_triple(rng, n, dim)
            b = _perturbed(rng, a, 0.02) if k % 2 else _random_triple(rng, n, dim)
            perm = rng.permutation(n)
            b = ProjectionTriple.from_vectors(b.p_vectors[:, perm], b.q_vectors, b.sigma[perm])

            match = bottleneck_distance(a, b)
            value, tau = _brute_force(a, b)

            assert match.value == value
            if match.value < 0.5:
                assert match.certified_unique
                assert np.array_equal(match.tau, tau)

    def test_transposed_pairing(self):
        """Same families with σ differing by a transposition are at distance 1."""
        from spectralloop.geometry import ProjectionTriple, bottleneck_distance

        eye = np.eye(3)[:, :2]
        a = ProjectionTriple.from_vectors(eye, eye, [0, 1])
        b = ProjectionTriple.from_vectors(eye, eye, [1, 0])

        match = bottleneck_distance(a, b)

        assert match.value == 1.0
        assert not match.certified_unique


class TestMatchStability:
    """Test the pairing gap inside a chart."""

    def test_bounded_by_distance(self):
        """The pairing gap of two nearby triples is at most their distance."""
        from spectralloop.geometry import bottleneck_distance, match_stability

        rng = np.random.default_rng(4)
        for _ in range(30):
            ref = _random_triple(rng, 4, 5)
            a = _perturbed(rng, ref, 0.01)
            b = _perturbed(rng, ref, 0.01)
            gap = match_stability(ref, a, b)
            assert gap <= bottleneck_distance(a, b).value + 1e-12

    def test_outside_chart(self):
        """Triples far from the center are refused."""
        from spectralloop.errors import PreconditionViolated
        from spectralloop.geometry import match_stability

        rng = np.random.default_rng(5)
        ref = _random_triple(rng, 3, 3)
        far = _random_triple(rng, 3, 3)

        with pytest.raises(PreconditionViolated):
            match_stability(ref, far, ref)
