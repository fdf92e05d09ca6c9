"""Projection-triple geometry.

This module provides:
- triples: ProjectionTriple, GaugePhases and rank-one projection distances
- bottleneck: The bottleneck metric and matching stability
- gauge: Projection transport and the gauge phases of intertwiners
"""

from spectralloop.geometry.bottleneck import (
    BottleneckMatch,
    bottleneck_distance,
    cost_matrix,
    match_stability,
)
from spectralloop.geometry.gauge import (
    apply_gauge,
    extract_phases,
    intertwining_residual,
    transport_projection,
    transport_vector,
)
from spectralloop.geometry.triples import GaugePhases, ProjectionTriple, rank1_distance

__all__ = [
    "BottleneckMatch",
    "GaugePhases",
    "ProjectionTriple",
    "apply_gauge",
    "bottleneck_distance",
    "cost_matrix",
    "extract_phases",
    "intertwining_residual",
    "match_stability",
    "rank1_distance",
    "transport_projection",
    "transport_vector",
]
