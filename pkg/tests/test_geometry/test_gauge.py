"""Tests for projection transport and gauge phases."""

import numpy as np
import pytest


def _chart(rng, n, dim, scale=0.01):
    from scipy.linalg import expm

    from spectralloop.geometry import ProjectionTriple
    from spectralloop.linalg import random_unitary

    base = random_unitary(dim, rng)
    ref = ProjectionTriple.from_vectors(base[:, :n], base[:, n : 2 * n], rng.permutation(n))
    h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    small = expm(1j * scale * (h + h.conj().T) / 2)
    near = ProjectionTriple.from_vectors(small @ ref.p_vectors, small @ ref.q_vectors, ref.sigma)
    return ref, near


def _intertwiner(triple):
    return sum(
        np.outer(triple.partner(i), triple.p_vectors[:, i].conj()) for i in range(triple.size)
    )


class TestTransport:
    """Test projection transport."""

    def test_lands_in_target(self):
        """The transported vector lies in the range of the new projection."""
        from spectralloop.geometry import transport_projection, transport_vector
        from spectralloop.linalg import projector, unit

        u = unit(np.array([1.0, 0.1, 0.0]))
        u_new = unit(np.array([1.0, 0.0, 0.2j]))
        v = 2.0 * u

        moved = transport_vector(u, u_new, v)

        assert np.allclose(projector(u_new) @ moved, moved)
        assert np.allclose(moved, transport_projection(projector(u), projector(u_new), v))

    def test_orthogonal_is_too_far(self):
        """Orthogonal projections cannot be transported."""
        from spectralloop.errors import TooFar
        from spectralloop.geometry import transport_projection, transport_vector
        from spectralloop.linalg import projector

        e0, e1 = np.eye(2)

        with pytest.raises(TooFar):
            transport_vector(e0, e1, e0)
        with pytest.raises(TooFar):
            transport_projection(projector(e0), projector(e1), e0)


class TestIntertwiningResidual:
    """Test the intertwining residual."""

    def test_exact_intertwiner(self):
        """Σ σ(p_i)-vector ⊗ p_i-vector intertwines its triple."""
        from spectralloop.geometry import intertwining_residual

        ref, _ = _chart(np.random.default_rng(0), 3, 7)

        assert intertwining_residual(_intertwiner(ref), ref) < 1e-12

    def test_identity_does_not_intertwine(self):
        """The identity does not send p_i to σ(p_i) in general."""
        from spectralloop.geometry import intertwining_residual

        ref, _ = _chart(np.random.default_rng(1), 2, 5)

        assert intertwining_residual(np.eye(5), ref) > 0.5


class TestGaugeRoundTrip:
    """extract_phases after apply_gauge multiplies the phases in."""

    def test_round_trip(self):
        """Phases are reproduced within 1e-10 on random charts."""
        from spectralloop.geometry import GaugePhases, apply_gauge, extract_phases

        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            dim = 2 * n + int(rng.integers(0, 3))
            ref, near = _chart(rng, n, dim)
            w = _intertwiner(near)
            z = GaugePhases.from_angles(rng.uniform(-np.pi, np.pi, n))

            before = extract_phases(ref, near, w)
            after = extract_phases(ref, near, apply_gauge(w, z, near))

            assert np.max(np.abs(after.values - before.values * z.values)) < 1e-10

    def test_center_phases(self):
        """At the chart center the canonical intertwiner has phases 1."""
        from spectralloop.geometry import extract_phases

        ref, _ = _chart(np.random.default_rng(3), 3, 6)
        phases = extract_phases(ref, ref, _intertwiner(ref))

        assert np.allclose(phases.values, 1.0)
        assert np.allclose(phases.angles, 0.0)

    def test_outside_chart(self):
        """A triple beyond the chart radius is refused."""
        from spectralloop.errors import PreconditionViolated
        from spectralloop.geometry import ProjectionTriple, extract_phases

        ref, _ = _chart(np.random.default_rng(4), 2, 4)
        far = ProjectionTriple.from_vectors(ref.q_vectors, ref.p_vectors, ref.sigma)

        with pytest.raises(PreconditionViolated):
            extract_phases(ref, far, _intertwiner(far))

    def test_not_intertwining(self):
        """A matrix that does not intertwine is refused."""
        from spectralloop.errors import NotIntertwining
        from spectralloop.geometry import extract_phases

        ref, near = _chart(np.random.default_rng(5), 2, 4)

        with pytest.raises(NotIntertwining):
            extract_phases(ref, near, np.eye(4))

    def test_phase_count(self):
        """apply_gauge needs one phase per eigenline."""
        from spectralloop.geometry import GaugePhases, apply_gauge

        ref, _ = _chart(np.random.default_rng(6), 2, 4)

        with pytest.raises(ValueError):
            apply_gauge(_intertwiner(ref), GaugePhases.from_angles([0.0]), ref)


class TestGaugePhases:
    """Test the phase container."""

    def test_unimodular(self):
        """Phases must have modulus 1."""
        from spectralloop.geometry import GaugePhases

        with pytest.raises(ValueError):
            GaugePhases(np.array([1.0, 0.5]))

    def test_conj(self):
        """conj inverts every phase."""
        from spectralloop.geometry import GaugePhases

        z = GaugePhases.from_angles([0.3, -1.2])

        assert np.allclose(z.values * z.conj().values, 1.0)
        assert len(z) == 2
