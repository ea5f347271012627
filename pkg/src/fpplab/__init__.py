"""First-passage percolation laboratory."""

from ._accel import USE_NUMBA
from .lattice import Edge, LocalBox, MacroBox, Window, local_box, macro_box, neighbors
from .passage import (
    Ball,
    CertificationError,
    GeodesicDag,
    PassageField,
    SawBudgetError,
    ball,
    box_diameter_time,
    box_to_box_time,
    dijkstra,
    exact_passage_time,
    geodesic_dag,
    geodesics_to,
    min_saw_time,
    pivotal_edges,
    resample_region,
    restricted_time,
)
from .weights import Distribution, OverlayField, WeightField, pc_value, validate_assumptions

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA",
    "Ball",
    "CertificationError",
    "Distribution",
    "Edge",
    "GeodesicDag",
    "LocalBox",
    "MacroBox",
    "OverlayField",
    "PassageField",
    "SawBudgetError",
    "WeightField",
    "Window",
    "ball",
    "box_diameter_time",
    "box_to_box_time",
    "dijkstra",
    "exact_passage_time",
    "geodesic_dag",
    "geodesics_to",
    "local_box",
    "macro_box",
    "min_saw_time",
    "neighbors",
    "pc_value",
    "pivotal_edges",
    "resample_region",
    "restricted_time",
    "validate_assumptions",
]
