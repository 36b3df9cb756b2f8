"""Semantic information toolkit.

Discrete semantic/Shannon information measures, the rate-fidelity R(G)
solver, channels-matching learners (multi-label, MaxMI classification,
EnM/GCMM mixtures), purposive-information rewards and log-optimal
portfolio values.
"""

from .errors import SemgError
from .prob import (
    Distribution,
    JointTable,
    MinMIMatch,
    RelatednessMatrix,
    SemanticChannel,
    TruthParam,
    eval_truth_param,
    logical_probability,
    minmi_match_from_semantic,
    relatedness,
    semantic_bayes,
    truth_from_joint,
    truth_from_likelihood,
    uniform,
    validate_distribution,
)
from .measures import (
    SemanticInfoReport,
    cross_entropy,
    dv_lower_bound,
    emi_similarity,
    entropy,
    kl_divergence,
    semantic_info_point,
    semantic_kl,
    semantic_mi,
    shannon_mi,
)
from .rg import (
    RGCurve,
    RGPoint,
    min_rate_zero_distortion,
    rd_shannon,
    rg_curve,
    rg_point,
)
from .learn import (
    GaussianRowFit,
    SimilarityMatrix,
    TruthFit,
    fit_truth_semantic_kl,
    gaussian_truth_from_transition,
    word_similarity,
)
from .classify import (
    MaxMITrace,
    Partition,
    exhaustive_threshold_mi,
    maxmi_classify,
    multilabel_classify,
    threshold_partition,
)
from .mixture import (
    EnMTrace,
    MixtureParams,
    convergence_identity,
    enm_fit,
    gaussian_components,
    gcmm_fit,
    mixture_distribution,
    pointwise_match_defect,
)
from .decision import (
    ControlProblem,
    OptimalRatios,
    PortfolioSpec,
    TradeoffRow,
    boosted_target,
    control_tradeoff,
    information_value,
    kelly_two_outcome,
    optimize_ratios,
    purposive_info,
    value_added_entropy,
)
from .csvio import parse_grid

__version__ = "0.1.0"
