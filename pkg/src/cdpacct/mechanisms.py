"""Canonical mechanisms as explicit distribution pairs or closed-form curves.

Nothing here samples; mechanisms over finite ranges are returned as exact
OutcomeDist pairs (one per input), and the Gaussian mechanism is represented
by its closed-form divergence curve.  Sampling lives in the oracle module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import logsumexp

from .accountant import ZcdpParams, zcdp_to_dp_refined
from .divergence import OutcomeDist


@dataclass(frozen=True)
class GaussianMech:
    """Additive Gaussian noise on a scalar query."""

    sensitivity: float  # worst-case query change between neighbors
    sigma: float  # noise standard deviation, same units

    def __post_init__(self) -> None:
        if self.sensitivity < 0.0:
            raise ValueError("sensitivity must be nonnegative")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class MultiGaussianMech:
    """Spherical Gaussian noise on a vector query.

    The divergence between two shifted copies depends only on the Euclidean
    length of the mean shift, so everything reduces to the scalar case via
    as_scalar().
    """

    l2_sensitivity: float
    sigma: float
    dim: int

    def __post_init__(self) -> None:
        if self.l2_sensitivity < 0.0:
            raise ValueError("l2_sensitivity must be nonnegative")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def as_scalar(self) -> GaussianMech:
        return GaussianMech(self.l2_sensitivity, self.sigma)


@dataclass(frozen=True)
class ExpMechSpec:
    """Loss profile of one exponential-mechanism invocation.

    candidate_losses holds the loss of each candidate for the fixed input;
    delta_sensitivity is the per-neighbor sensitivity of the loss function.
    """

    candidate_losses: tuple[float, ...]
    delta_sensitivity: float
    epsilon: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidate_losses", tuple(float(l) for l in self.candidate_losses))
        if not self.candidate_losses:
            raise ValueError("candidate set must be nonempty")
        if any(math.isnan(l) or math.isinf(l) for l in self.candidate_losses):
            raise ValueError("candidate losses must be finite")
        if not self.delta_sensitivity > 0.0:
            raise ValueError("delta_sensitivity must be positive")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


def gaussian_rho(mech: GaussianMech) -> float:
    """Concentration parameter of the Gaussian mechanism: sensitivity^2 / (2 sigma^2)."""
    return mech.sensitivity**2 / (2.0 * mech.sigma**2)


def gaussian_renyi(shift: float, sigma: float, alpha: float) -> float:
    """Order-alpha divergence between equal-variance Gaussians shifted by `shift`.

    Multivariate callers pass shift = l2 norm of the mean difference; the
    divergence depends on nothing else.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if alpha < 1.0:
        raise ValueError("order must be >= 1")
    if math.isinf(alpha):
        return 0.0 if shift == 0.0 else math.inf
    return alpha * shift**2 / (2.0 * sigma**2)


def calibrate_sigma_for_rho(sensitivity: float, rho: float) -> float:
    """Noise scale achieving a target concentration parameter exactly."""
    if not sensitivity > 0.0 or not rho > 0.0:
        raise ValueError("sensitivity and rho must be positive")
    return sensitivity / math.sqrt(2.0 * rho)


def calibrate_sigma_for_dp(sensitivity: float, eps: float, delta: float) -> float:
    """Smallest noise scale whose refined (eps, delta) conversion meets the target.

    Bisects on the concentration parameter rho = sensitivity^2/(2 sigma^2):
    at fixed eps the refined delta is increasing in rho, so the largest
    admissible rho gives the smallest sigma.  Working on rho makes the
    result exactly scale-invariant in the sensitivity.  The conversion needs
    rho <= eps, which caps the search interval.
    """
    if not sensitivity > 0.0 or not eps > 0.0:
        raise ValueError("sensitivity and eps must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")

    def delta_at(rho: float) -> float:
        return zcdp_to_dp_refined(ZcdpParams(0.0, rho), eps)

    hi = eps
    if delta_at(hi) <= delta:
        rho_star = hi
    else:
        lo = hi
        while delta_at(lo) > delta:
            lo *= 0.5
            if lo < 1e-300:
                raise ValueError("target (eps, delta) is unsatisfiable in float range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if delta_at(mid) <= delta:
                lo = mid
            else:
                hi = mid
        rho_star = lo  # admissible by construction
    return sensitivity / math.sqrt(2.0 * rho_star)


def randomized_response(eps: float) -> tuple[OutcomeDist, OutcomeDist]:
    """Per-bit randomized response channel: output dists for inputs +1 and -1."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    keep = math.exp(eps) / (1.0 + math.exp(eps))
    plus = OutcomeDist((1, -1), (keep, 1.0 - keep))
    minus = OutcomeDist((1, -1), (1.0 - keep, keep))
    return plus, minus


# Outcome labels for the approximate-DP extreme mechanism: (bit, flag) with
# flag "top" marking the catastrophic branch and "bot" the private branch.
TOP = "top"
BOT = "bot"


def approx_randomized_response(eps: float, delta: float) -> tuple[OutcomeDist, OutcomeDist]:
    """The extreme mechanism realizing an (eps, delta) guarantee exactly.

    For input bit b the output is (b, top) with probability delta,
    (b, bot) with probability (1-delta) e^eps/(1+e^eps), and (1-b, bot)
    with the remaining (1-delta)/(1+e^eps); the opposite top outcome never
    occurs.  Returns the pair of distributions for b = 0 and b = 1 over the
    shared four-outcome set.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must be in [0, 1]")
    keep = math.exp(eps) / (1.0 + math.exp(eps))
    outcomes = ((0, TOP), (1, TOP), (0, BOT), (1, BOT))
    b0 = OutcomeDist(outcomes, (delta, 0.0, (1.0 - delta) * keep, (1.0 - delta) * (1.0 - keep)))
    b1 = OutcomeDist(outcomes, (0.0, delta, (1.0 - delta) * (1.0 - keep), (1.0 - delta) * keep))
    return b0, b1


def exponential_mechanism(spec: ExpMechSpec) -> OutcomeDist:
    """Output distribution over candidate indices, weight e^(-loss eps / 2 delta_sens).

    Normalization happens in the log domain; candidates with equal losses
    stay distinct.
    """
    scale = -spec.epsilon / (2.0 * spec.delta_sensitivity)
    logits = [scale * l for l in spec.candidate_losses]
    log_norm = float(logsumexp(logits))
    probs = tuple(math.exp(l - log_norm) for l in logits)
    return OutcomeDist(tuple(range(len(probs))), probs)


def normal_upper_tail(u: float, sigma: float = 1.0) -> float:
    """P[N(0, sigma^2) > u], computed via erfc so deep tails keep relative accuracy."""
    return 0.5 * math.erfc(u / (sigma * math.sqrt(2.0)))


def thresholded_gaussian(sigma: float, t: float) -> tuple[OutcomeDist, OutcomeDist]:
    """Sign-with-threshold postprocessing of the Gaussian mechanism on inputs +-1.

    Output -1, 0, or +1 according to whether the noisy value is below -t,
    between, or above +t.  With p = P[N(0, sigma^2) > t-1] and
    q = P[N(0, sigma^2) > t+1], input +1 yields (+1 w.p. p, -1 w.p. q),
    input -1 the reversal.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if not t > 1.0:
        raise ValueError("threshold must exceed 1")
    p = normal_upper_tail(t - 1.0, sigma)
    q = normal_upper_tail(t + 1.0, sigma)
    mid = 1.0 - p - q
    outcomes = (-1, 0, 1)
    plus = OutcomeDist(outcomes, (q, mid, p))
    minus = OutcomeDist(outcomes, (p, mid, q))
    return plus, minus
