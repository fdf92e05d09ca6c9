"""Projection triples: two families of rank-one projections and a pairing."""

from dataclasses import dataclass

import numpy as np

from spectralloop.config import Settings, resolve


def rank1_distance(v: np.ndarray, w: np.ndarray) -> float:
    """‖vv* − ww*‖ for the rank-one projections spanned by v and w.

    Computed as sqrt(1 − |⟨v, w⟩|²/(‖v‖²‖w‖²)) with the ratio clamped to
    [0, 1], which is exactly 0 for identical vectors and exactly symmetric.
    """
    v = np.asarray(v)
    w = np.asarray(w)
    vw = np.sum(v.conj() * w)
    vv = np.sum(v.conj() * v).real
    ww = np.sum(w.conj() * w).real
    ratio = (vw.real * vw.real + vw.imag * vw.imag) / (vv * ww)
    return float(np.sqrt(1.0 - min(max(ratio, 0.0), 1.0)))


def _orthonormality_defect(vectors: np.ndarray) -> float:
    if vectors.shape[1] == 0:
        return 0.0
    gram = vectors.conj().T @ vectors
    return float(np.max(np.abs(gram - np.eye(vectors.shape[1]))))


@dataclass(frozen=True)
class ProjectionTriple:
    """A point (𝒫, 𝒬, σ) of the base space.

    The projections are stored through unit-vector representatives: p_i is
    the projection onto ``p_vectors[:, i]`` and σ pairs p_i with
    q_{sigma[i]}.

    Attributes:
        p_vectors: dim × n matrix of orthonormal columns
        q_vectors: dim × n matrix of orthonormal columns
        sigma: Permutation of 0..n−1
        labels: Optional eigenvalue tags of the p-family
    """

    p_vectors: np.ndarray
    q_vectors: np.ndarray
    sigma: np.ndarray
    labels: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.p_vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.p_vectors.shape[0]

    def p(self, i: int) -> np.ndarray:
        v = self.p_vectors[:, i]
        return np.outer(v, v.conj())

    def q(self, j: int) -> np.ndarray:
        w = self.q_vectors[:, j]
        return np.outer(w, w.conj())

    def partner(self, i: int) -> np.ndarray:
        """Representative of σ(p_i)."""
        return self.q_vectors[:, self.sigma[i]]

    @property
    def p_support(self) -> np.ndarray:
        """Σ p_i."""
        return self.p_vectors @ self.p_vectors.conj().T

    @property
    def q_support(self) -> np.ndarray:
        """Σ q_j."""
        return self.q_vectors @ self.q_vectors.conj().T

    @classmethod
    def from_vectors(
        cls,
        p_vectors,
        q_vectors,
        sigma=None,
        labels=None,
        settings: Settings | None = None,
    ) -> "ProjectionTriple":
        """Build a triple from (not necessarily normalized) representatives.

        Args:
            p_vectors: dim × n representatives of the p-family
            q_vectors: dim × n representatives of the q-family
            sigma: Pairing permutation; identity when omitted
            labels: Optional tags of the p-family
            settings: Numerical settings

        Raises:
            ValueError: If the families differ in shape, a family is not
                orthogonal, or sigma is not a permutation
        """
        settings = resolve(settings)
        p = np.array(p_vectors, dtype=complex, ndmin=2)
        q = np.array(q_vectors, dtype=complex, ndmin=2)
        if p.shape != q.shape:
            raise ValueError(f"Families differ in shape: {p.shape} vs {q.shape}")
        if p.shape[1]:
            p = p / np.linalg.norm(p, axis=0)
            q = q / np.linalg.norm(q, axis=0)
        n = p.shape[1]
        sigma = np.arange(n) if sigma is None else np.asarray(sigma, dtype=int)
        if sorted(sigma.tolist()) != list(range(n)):
            raise ValueError(f"sigma is not a permutation of 0..{n - 1}: {sigma.tolist()}")
        for name, family in (("p", p), ("q", q)):
            defect = _orthonormality_defect(family)
            if defect > settings.lift_tol:
                raise ValueError(f"The {name}-family is not orthogonal: defect {defect:.3e}")
        if labels is not None:
            labels = np.asarray(labels)
        return cls(p, q, sigma, labels)


@dataclass(frozen=True)
class GaugePhases:
    """Unit scalars z_i, one per eigenline of a triple."""

    values: np.ndarray

    def __post_init__(self) -> None:
        defect = np.max(np.abs(np.abs(self.values) - 1.0), initial=0.0)
        if defect > 1e-8:
            raise ValueError(f"Gauge phases must have modulus 1, defect {defect:.3e}")

    @classmethod
    def from_angles(cls, angles) -> "GaugePhases":
        return cls(np.exp(1j * np.asarray(angles, dtype=float)))

    @property
    def angles(self) -> np.ndarray:
        return np.angle(self.values)

    def conj(self) -> "GaugePhases":
        return GaugePhases(self.values.conj())

    def __len__(self) -> int:
        return len(self.values)
