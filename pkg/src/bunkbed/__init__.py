"""Exact verification tools for two-level percolation near p = 1.

The package computes connection probabilities on the doubled graph
G x K2 as exact polynomials in the retention probability, expands the
conditioned difference of same-level and cross-level connection events
over edge tripartitions, and checks the resulting positivity bounds,
path-graph closed forms, and Monte Carlo agreement.
"""

from .enumeration import Caps, CapExceededError, DEFAULT_CAPS, connection_counts
from .exact import (
    bunkbed,
    bunkbed_vertex,
    connected_avoiding,
    connection_polynomial,
    connection_query_polynomials,
    counts_to_polynomial,
    difference_polynomial,
    endpoint_polynomials,
    GeodesicCheck,
    geodesic_check,
    horizontal_edge_id,
    threshold_point,
    vertical_edge_id,
)
from .graphs import (
    GraphParseError,
    INFINITY,
    Multigraph,
    connected_components,
    minor,
    parse_edge_list,
    vertical_free_distance,
)
from .line import (
    GaussianLimitResult,
    LineQuantities,
    gap_check,
    gap_polynomial,
    gaussian_limit,
    iter_line_quantities,
    line_quantities,
    path_graph,
    series_check,
)
from .montecarlo import (
    DifferenceEstimates,
    Estimate,
    agreement_check,
    estimate_difference,
    estimate_to_json_obj,
    sample_bunkbed,
)
from .polynomials import (
    RationalPoly,
    VAR_P,
    VAR_Q,
    VariableMismatchError,
    format_fraction,
    parse_fraction,
    poly_sum,
)
from .reports import (
    DISCREPANCY,
    FAIL,
    PARTIAL,
    PASS,
    VerificationReport,
    aggregate_verdict,
    canonical_json,
    encode_value,
)
from .tripartitions import (
    DistanceClass,
    ReducedModel,
    Tripartition,
    TripartitionAnalysis,
    TripartitionTable,
    analyze_tripartitions,
    bound_report,
    classify,
    enumerate_tripartitions,
    expansion_identity_check,
    mirroring_involution_check,
    reduced_model,
    theorem_sign_check,
    tripartition_weight,
    updown_difference,
    updown_f_values,
    validate_tripartition,
    verify_conditioning,
    verify_theorem,
)

__version__ = "0.1.0"

__all__ = [
    "Caps",
    "CapExceededError",
    "DEFAULT_CAPS",
    "DifferenceEstimates",
    "DistanceClass",
    "DISCREPANCY",
    "Estimate",
    "FAIL",
    "GaussianLimitResult",
    "GeodesicCheck",
    "GraphParseError",
    "INFINITY",
    "LineQuantities",
    "Multigraph",
    "PARTIAL",
    "PASS",
    "RationalPoly",
    "ReducedModel",
    "Tripartition",
    "TripartitionAnalysis",
    "TripartitionTable",
    "VAR_P",
    "VAR_Q",
    "VariableMismatchError",
    "VerificationReport",
    "agreement_check",
    "aggregate_verdict",
    "analyze_tripartitions",
    "bound_report",
    "bunkbed",
    "bunkbed_vertex",
    "canonical_json",
    "classify",
    "connected_avoiding",
    "connected_components",
    "connection_counts",
    "connection_polynomial",
    "connection_query_polynomials",
    "counts_to_polynomial",
    "difference_polynomial",
    "encode_value",
    "endpoint_polynomials",
    "enumerate_tripartitions",
    "estimate_difference",
    "estimate_to_json_obj",
    "expansion_identity_check",
    "format_fraction",
    "gap_check",
    "gap_polynomial",
    "gaussian_limit",
    "geodesic_check",
    "horizontal_edge_id",
    "iter_line_quantities",
    "line_quantities",
    "minor",
    "mirroring_involution_check",
    "parse_edge_list",
    "parse_fraction",
    "path_graph",
    "poly_sum",
    "reduced_model",
    "sample_bunkbed",
    "series_check",
    "theorem_sign_check",
    "threshold_point",
    "tripartition_weight",
    "updown_difference",
    "updown_f_values",
    "validate_tripartition",
    "verify_conditioning",
    "verify_theorem",
    "vertical_edge_id",
    "vertical_free_distance",
]
