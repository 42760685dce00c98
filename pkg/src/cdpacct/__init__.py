"""Concentrated differential privacy accounting.

Exact Renyi divergences for finite distributions and Gaussian mechanisms,
budget tracking under composition and group privacy, conversions between
privacy notions, information-theoretic bounds, and brute-force oracles
that double-check every closed form.
"""

from .accountant import (
    DpPoint,
    LedgerEntry,
    McdpParams,
    ZcdpParams,
    advanced_composition_baseline,
    approx_zcdp_to_dp,
    compose,
    dp_composition_bound,
    dp_composition_refined,
    dp_family_to_zcdp,
    dp_to_approx_zcdp,
    dp_to_approx_zcdp_maxdiv,
    entry_to_zcdp,
    eps_for_delta,
    group_privacy,
    mcdp_to_zcdp,
    pure_dp_to_zcdp,
    zcdp_to_dp_refined,
    zcdp_to_dp_simple,
    zcdp_to_mcdp,
)
from .bounds import (
    FiniteChannel,
    MetricPointSet,
    PackingRecord,
    PurifiedMechanism,
    certify_zcdp,
    channel_pushforward,
    greedy_packing_net,
    mi_bound,
    mutual_information,
    packing_lower_bound,
    product_channel,
    purify,
)
from .divergence import (
    ALPHA_GRID,
    OutcomeDist,
    PrivacyLossDist,
    aligned_probs,
    divergence_from_loss,
    loss_tail_bound,
    mixture,
    privacy_loss_dist,
    product,
    pushforward,
    renyi_divergence,
)
from .mechanisms import (
    ExpMechSpec,
    GaussianMech,
    MultiGaussianMech,
    approx_randomized_response,
    calibrate_sigma_for_dp,
    calibrate_sigma_for_rho,
    exponential_mechanism,
    gaussian_renyi,
    gaussian_rho,
    normal_upper_tail,
    randomized_response,
    thresholded_gaussian,
)
from .oracle import (
    McEstimate,
    PinskerRecord,
    QuadratureSpec,
    ViolationRecord,
    delta_exact_gaussian,
    delta_from_pld,
    delta_gaussian_mc,
    gaussian_pld_discretized,
    gaussian_renyi_quadrature,
    hyperbolic_inequality_check,
    mc_divergence_estimate,
    mcdp_gaussian_check,
    mcdp_postprocess_violation,
    pinsker_check,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_GRID",
    "DpPoint",
    "ExpMechSpec",
    "FiniteChannel",
    "GaussianMech",
    "LedgerEntry",
    "McEstimate",
    "McdpParams",
    "MetricPointSet",
    "MultiGaussianMech",
    "OutcomeDist",
    "PackingRecord",
    "PinskerRecord",
    "PrivacyLossDist",
    "PurifiedMechanism",
    "QuadratureSpec",
    "ViolationRecord",
    "ZcdpParams",
    "advanced_composition_baseline",
    "aligned_probs",
    "approx_randomized_response",
    "approx_zcdp_to_dp",
    "calibrate_sigma_for_dp",
    "calibrate_sigma_for_rho",
    "certify_zcdp",
    "channel_pushforward",
    "compose",
    "delta_exact_gaussian",
    "delta_from_pld",
    "delta_gaussian_mc",
    "divergence_from_loss",
    "dp_composition_bound",
    "dp_composition_refined",
    "dp_family_to_zcdp",
    "dp_to_approx_zcdp",
    "dp_to_approx_zcdp_maxdiv",
    "entry_to_zcdp",
    "eps_for_delta",
    "exponential_mechanism",
    "gaussian_pld_discretized",
    "gaussian_renyi",
    "gaussian_renyi_quadrature",
    "gaussian_rho",
    "greedy_packing_net",
    "group_privacy",
    "hyperbolic_inequality_check",
    "loss_tail_bound",
    "mc_divergence_estimate",
    "mcdp_gaussian_check",
    "mcdp_postprocess_violation",
    "mcdp_to_zcdp",
    "mi_bound",
    "mixture",
    "mutual_information",
    "normal_upper_tail",
    "packing_lower_bound",
    "pinsker_check",
    "privacy_loss_dist",
    "product",
    "product_channel",
    "pure_dp_to_zcdp",
    "purify",
    "pushforward",
    "randomized_response",
    "renyi_divergence",
    "thresholded_gaussian",
    "zcdp_to_dp_refined",
    "zcdp_to_dp_simple",
    "zcdp_to_mcdp",
]
