"""spectralloop - eigenvalue braids and unitary equivalence of normal operator loops.

spectralloop works with discretized paths and loops of normal compact
operators, featuring:
- Certified eigenvalue continuation and loop monodromy
- Riesz projections by contour quadrature
- Projection triples with the bottleneck metric and gauge phases
- Finite-rank approximants and the 37/n intertwiner certificate
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
