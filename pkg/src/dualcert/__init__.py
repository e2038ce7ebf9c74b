"""Privacy-profile based robustness certification.

Randomized mechanisms are described by privacy profiles or tradeoff curves,
composed through discretized privacy loss distributions, and turned into
robustness certificates for smoothed classifiers under poisoning, evasion
and joint threat models.
"""

__version__ = "0.1.0"

from .certification import (
    CertificateResult,
    ProbabilityBounds,
    RadiusSweep,
    certify,
    certify_direct,
    certify_multiclass,
    clopper_pearson,
    gaussian_radius,
    joint_certify,
    max_certified_radius,
    radius_sweep,
)
from .distributions import (
    Discrete,
    DiscretizationSpec,
    Gaussian,
    GaussianMixture,
    hs_divergence,
    pld_from_pair,
    tradeoff_value,
)
from .duality import (
    PrivacyProfile,
    TradeoffCurve,
    curve_pointwise_min,
    dual_to_primal,
    opposite_profile,
    pointwise_min,
    primal_to_dual,
    symmetric_dual_to_primal,
)
from .estimator import ClopperPearsonBounds, RobustnessCertifier
from .exceptions import (
    DomainError,
    DualCertError,
    ExtrapolationError,
    IncompatibleGridError,
    MonotonicityError,
    NoDominatingPairError,
    NumericFailure,
    RangeTooSmallError,
    UnsupportedPairError,
)
from .mechanisms import (
    DPA,
    AddRemove,
    Composition,
    DatasetChanges,
    DPACompose,
    GaussianMechanism,
    Joint,
    L2Ball,
    PerturbKRecords,
    PreprocessAmplified,
    RandomizedResponse,
    SubsampledGaussian,
    decompose_relation,
    dominating_pair,
    dpa_profile,
    dpa_tradeoff,
    max_profile,
    mechanism_pld,
    mechanism_profile,
    parse_mechanism,
    parse_relation,
)
from .pld import DiscretePLD, compose, profile_from_pld, rebucket, self_compose
from .rdp import (
    RdpCurve,
    rdp_compose,
    rdp_curve,
    rdp_group_corrected,
    rdp_privacy_profile,
    rdp_subsampled_gaussian,
    rdp_to_profile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
