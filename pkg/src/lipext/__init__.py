"""Extreme points and short convex decompositions in the Lipschitz unit ball
of a finite metric space with values in an lp space."""

from .metric import (
    DEFAULT_TOL,
    DimensionMismatch,
    FiniteMetricSpace,
    LipextError,
    LipschitzPoint,
    MetricError,
    NegativeOrZeroOffDiagonal,
    NonzeroDiagonal,
    NormSpec,
    NotSymmetric,
    ToleranceConfig,
    TriangleViolation,
    is_member,
    lipschitz_constant,
    metric_closure,
    norm_eval,
    rescale_into_ball,
    validate_metric,
)
from .extremality import (
    BasepointInCut,
    EmptyCut,
    Extreme,
    InvalidCut,
    NotAMember,
    NotExtreme,
    SlackCut,
    TightGraph,
    TooLarge,
    build_tight_graph,
    certify_extremality,
    cut_oracle_bruteforce,
    min_cut_slack,
    split_nonextreme,
)
from .representer import (
    Atom,
    Decomposition,
    Direction,
    IterationOverflow,
    NotASlackCut,
    ReductionFailure,
    VerificationReport,
    caratheodory_reduce,
    decompose,
    displace,
    feasible_interval,
    push_to_extreme,
    verify_decomposition,
)
from .generators import GenConfig, gen_euclidean_space, gen_extreme, gen_member, gen_random_metric

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BasepointInCut",
    "DEFAULT_TOL",
    "Decomposition",
    "DimensionMismatch",
    "Direction",
    "EmptyCut",
    "Extreme",
    "FiniteMetricSpace",
    "GenConfig",
    "InvalidCut",
    "IterationOverflow",
    "LipextError",
    "LipschitzPoint",
    "MetricError",
    "NegativeOrZeroOffDiagonal",
    "NonzeroDiagonal",
    "NormSpec",
    "NotAMember",
    "NotASlackCut",
    "NotExtreme",
    "NotSymmetric",
    "ReductionFailure",
    "SlackCut",
    "TightGraph",
    "ToleranceConfig",
    "TooLarge",
    "TriangleViolation",
    "VerificationReport",
    "build_tight_graph",
    "caratheodory_reduce",
    "certify_extremality",
    "cut_oracle_bruteforce",
    "decompose",
    "displace",
    "feasible_interval",
    "gen_euclidean_space",
    "gen_extreme",
    "gen_member",
    "gen_random_metric",
    "is_member",
    "lipschitz_constant",
    "metric_closure",
    "min_cut_slack",
    "norm_eval",
    "push_to_extreme",
    "rescale_into_ball",
    "split_nonextreme",
    "validate_metric",
    "verify_decomposition",
]
