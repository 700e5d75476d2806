"""Spatial highlighting from implicit mouse feedback.

Dense mouse-move regions recurring across time segments reveal what an
analyst is interested in; points inside them feed a facet-level feedback
vector, and the engine answers with k similar-but-geographically-diverse
highlight points under a wall-clock budget.
"""

from .clustering import Cluster, DbscanParams, MoveLog, dbscan_cluster, segment_moves
from .errors import (
    DegenerateGeometryError,
    EmptyDatasetError,
    EmptyEligibleSetError,
    GeoHighlightError,
    OutOfRangeError,
    PoleSingularityError,
    TooFewPointsError,
    UnknownFacetError,
    UnknownSessionError,
)
from .estimator import PipelineResult, SpatialHighlighter
from .feedback import FeedbackVector, facet_weight, update_feedback
from .geometry import (
    ConvexPolygon,
    GeoPoint,
    MovePoint,
    ViewportRef,
    contains,
    convex_intersect,
    geo_to_pixel,
    haversine_distance,
    pixel_to_geo,
    quickhull,
)
from .highlight import (
    HighlightResult,
    InvertedIndex,
    build_inverted_indexes,
    diversity,
    get_highlights,
    pairwise_similarity,
    similarity_to_feedback,
)
from .idr import IDR, IdrSet, find_idrs
from .ingestion import Attribute, AttributeSchema, Dataset, PointRecord, bin_numeric, load_dataset
from .quadtree import MatchResult, Quadtree, build_quadtree, match_points
from .session import Session, SessionConfig, SessionManager

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "AttributeSchema",
    "Cluster",
    "ConvexPolygon",
    "Dataset",
    "DbscanParams",
    "DegenerateGeometryError",
    "EmptyDatasetError",
    "EmptyEligibleSetError",
    "FeedbackVector",
    "GeoHighlightError",
    "GeoPoint",
    "HighlightResult",
    "IDR",
    "IdrSet",
    "InvertedIndex",
    "MatchResult",
    "MoveLog",
    "MovePoint",
    "OutOfRangeError",
    "PipelineResult",
    "PointRecord",
    "PoleSingularityError",
    "Quadtree",
    "Session",
    "SessionConfig",
    "SessionManager",
    "SpatialHighlighter",
    "TooFewPointsError",
    "UnknownFacetError",
    "UnknownSessionError",
    "ViewportRef",
    "bin_numeric",
    "build_inverted_indexes",
    "build_quadtree",
    "contains",
    "convex_intersect",
    "dbscan_cluster",
    "diversity",
    "facet_weight",
    "find_idrs",
    "geo_to_pixel",
    "get_highlights",
    "haversine_distance",
    "load_dataset",
    "match_points",
    "pairwise_similarity",
    "pixel_to_geo",
    "quickhull",
    "segment_moves",
    "similarity_to_feedback",
    "update_feedback",
]
