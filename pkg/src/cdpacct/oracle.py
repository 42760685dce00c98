"""Independent numeric oracles for every closed form the package claims.

The integrators here never call the closed forms they check: Gaussian
divergences are integrated from the raw density ratio, delta curves are
evaluated from the tail functional, and the counterexample quantities are
assembled from first principles with high-precision normal tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr

from .divergence import OutcomeDist, PrivacyLossDist, renyi_divergence


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration window (in standard deviations) and target accuracy."""

    half_width_sigmas: float = 12.0
    abs_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.half_width_sigmas < 8.0:
            raise ValueError("half_width_sigmas must be at least 8")
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")


def _log_simpson(log_f, lo: float, hi: float, panels: int) -> float:
    """log of the composite-Simpson integral of exp(log_f) on [lo, hi].

    panels must be even.  Weights are folded into the log-sum-exp so the
    integrand may span hundreds of orders of magnitude.
    """
    x = np.linspace(lo, hi, panels + 1)
    logs = np.array([log_f(v) for v in x])
    weights = np.full(panels + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    h = (hi - lo) / panels
    return float(logsumexp(logs, b=weights)) + math.log(h / 3.0)


def gaussian_renyi_quadrature(
    shift: float, sigma: float, alpha: float, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Order-alpha divergence between N(0, sigma^2) and N(shift, sigma^2) by quadrature.

    Integrates the raw density product p^alpha q^(1-alpha) with composite
    Simpson, doubling the panel count until two successive divergence
    values agree within abs_tol.  The integrand is a scaled Gaussian
    centered at (1-alpha)*shift, so the window covers that center as well
    as both means.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if not alpha > 1.0:
        raise ValueError("quadrature oracle requires alpha > 1")
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    log_norm = -0.5 * math.log(2.0 * math.pi * sigma * sigma)

    def log_f(x: float) -> float:
        lp = log_norm - x * x * inv2s2
        lq = log_norm - (x - shift) * (x - shift) * inv2s2
        return alpha * lp + (1.0 - alpha) * lq

    center = (1.0 - alpha) * shift
    w = spec.half_width_sigmas * sigma
    lo = min(0.0, shift, center) - w
    hi = max(0.0, shift, center) + w

    panels = 64
    prev = _log_simpson(log_f, lo, hi, panels) / (alpha - 1.0)
    while panels <= 2**20:
        panels *= 2
        cur = _log_simpson(log_f, lo, hi, panels) / (alpha - 1.0)
        if abs(cur - prev) <= spec.abs_tol:
            return cur
        prev = cur
    raise ArithmeticError("quadrature did not converge to abs_tol")


def delta_from_pld(z: PrivacyLossDist, eps: float) -> float:
    """Exact delta(eps) of a discrete privacy loss: E[max(0, 1 - e^(eps - Z))].

    An infinite loss contributes its full mass.  Nonincreasing in eps; at
    eps = 0 this is the total variation distance of the generating pair.
    """
    total = 0.0
    acc = []
    for loss, prob in zip(z.losses, z.probs):
        if prob == 0.0:
            continue
        if math.isinf(loss):
            acc.append(prob)
        elif loss > eps:
            acc.append(prob * -math.expm1(eps - loss))
    total = math.fsum(acc) if acc else 0.0
    return min(1.0, max(0.0, total))


def delta_exact_gaussian(eta: float, eps: float) -> float:
    """Exact delta(eps) when the privacy loss is Normal(eta, 2 eta).

    Closed form of the tail functional: with s = sqrt(2 eta),

        delta(eps) = P[N > (eps - eta)/s] - e^eps * P[N > (eps + eta)/s]

    where the second term uses E[e^(-Z); Z > eps] = P[N > (eps + eta)/s]
    (complete the square; the factor e^(-eta + s^2/2) is exactly 1 here).
    The second term is evaluated as exp(eps + log of the normal tail) to
    avoid overflow at large eps.
    """
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    s = math.sqrt(2.0 * eta)
    first = float(ndtr(-(eps - eta) / s))
    second = math.exp(eps + float(log_ndtr(-(eps + eta) / s)))
    return min(1.0, max(0.0, first - second))


def delta_gaussian_mc(eta: float, eps: float, n_samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo evaluation of the same tail functional: (estimate, std_error).

    Used to validate the closed form before it is trusted as an oracle.
    """
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    if n_samples < 10**4:
        raise ValueError("need at least 1e4 samples")
    rng = np.random.default_rng(seed)
    z = rng.normal(eta, math.sqrt(2.0 * eta), size=n_samples)
    vals = np.maximum(0.0, -np.expm1(eps - z))
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(n_samples))
    return est, se


def gaussian_pld_discretized(
    eta: float, points: int = 4000, half_width_sigmas: float = 12.0
) -> PrivacyLossDist:
    """Discretized Normal(eta, 2 eta) privacy loss on a uniform grid.

    Each bin's mass sits at its upper edge, so tail masses and the delta
    functional are (slightly) overestimated; fine for checking upper
    bounds.  Mass beyond the window is folded into the end bins.
    """
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    if points < 2:
        raise ValueError("need at least 2 grid points")
    s = math.sqrt(2.0 * eta)
    edges = np.linspace(eta - half_width_sigmas * s, eta + half_width_sigmas * s, points + 1)
    cdf = ndtr((edges - eta) / s)
    mass = np.diff(cdf)
    mass[0] += cdf[0]
    mass[-1] += 1.0 - cdf[-1]
    return PrivacyLossDist(tuple(edges[1:]), tuple(mass))


@dataclass(frozen=True)
class ViolationRecord:
    """One subgaussian-bound check: lhs = centered loss MGF, rhs = claimed bound."""

    lhs: float
    rhs: float
    violated: bool


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def mcdp_postprocess_violation(sigma: float, t: float, lam: float) -> ViolationRecord:
    """Centered loss MGF of the sign-thresholded Gaussian channel vs its claimed bound.

    With p = P[N(0, sigma^2) > t-1] and q = P[N(0, sigma^2) > t+1] the
    channel's privacy loss takes value ln(p/q) w.p. p, -ln(p/q) w.p. q and
    0 otherwise, so E[Z] = (p - q) ln(p/q) and

        lhs = (p (p/q)^lam + q (q/p)^lam + 1 - p - q) * (p/q)^(-lam (p - q)).

    rhs = e^(2 lam^2 / sigma^2) is the subgaussian bound the unthresholded
    channel satisfies with equality; violated means the thresholding broke
    it.  Assembled in the log domain because p/q is astronomically large
    for big t.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if not t > 1.0:
        raise ValueError("threshold must exceed 1")
    # P[N(0, sigma^2) > u] = ndtr(-u / sigma); keep everything in logs.
    lp = float(log_ndtr(-(t - 1.0) / sigma))
    lq = float(log_ndtr(-(t + 1.0) / sigma))
    p = math.exp(lp)
    q = math.exp(lq)
    ratio_log = lp - lq  # ln(p/q) > 0
    center = -lam * (p - q) * ratio_log
    lhs = math.fsum(
        (
            _exp(lp + lam * ratio_log + center),
            _exp(lq - lam * ratio_log + center),
            (1.0 - p - q) * _exp(center),
        )
    )
    rhs = _exp(2.0 * lam * lam / (sigma * sigma))
    return ViolationRecord(lhs, rhs, lhs > rhs)


def mcdp_gaussian_check(
    sigma: float, lam: float, spec: QuadratureSpec = QuadratureSpec()
) -> ViolationRecord:
    """Same check for the raw (unthresholded) Gaussian channel, by quadrature.

    The privacy loss of N(1, sigma^2) against N(-1, sigma^2) is
    Z(y) = 2 y / sigma^2 with y ~ N(1, sigma^2) and mean 2 / sigma^2; the
    centered MGF is integrated numerically and should match the bound
    e^(2 lam^2 / sigma^2) exactly, so no violation is ever reported.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    log_norm = -0.5 * math.log(2.0 * math.pi * sigma * sigma)
    scale = 2.0 * lam / (sigma * sigma)

    def log_f(y: float) -> float:
        return log_norm - (y - 1.0) * (y - 1.0) * inv2s2 + scale * (y - 1.0)

    center = 1.0 + 2.0 * lam
    w = spec.half_width_sigmas * sigma
    lo = min(1.0, center) - w
    hi = max(1.0, center) + w
    panels = 64
    prev = _log_simpson(log_f, lo, hi, panels)
    while panels <= 2**20:
        panels *= 2
        cur = _log_simpson(log_f, lo, hi, panels)
        if abs(cur - prev) <= spec.abs_tol:
            lhs = math.exp(cur)
            rhs = _exp(2.0 * lam * lam / (sigma * sigma))
            return ViolationRecord(lhs, rhs, lhs > rhs * (1.0 + 1e-9))
        prev = cur
    raise ArithmeticError("quadrature did not converge to abs_tol")


def hyperbolic_inequality_check(x: float, y: float) -> bool:
    """Check (sinh x - sinh y) / sinh(x - y) <= e^(x y / 2) on 0 <= y < x <= 2."""
    if not (0.0 <= y < x <= 2.0):
        raise ValueError("requires 0 <= y < x <= 2")
    lhs = (math.sinh(x) - math.sinh(y)) / math.sinh(x - y)
    rhs = math.exp(0.5 * x * y)
    return lhs <= rhs * (1.0 + 1e-10)


@dataclass(frozen=True)
class PinskerRecord:
    plain_ok: bool
    generalized_ok: bool


def pinsker_check(p: OutcomeDist, q: OutcomeDist, f) -> PinskerRecord:
    """Check both mean-difference bounds for a statistic f on the outcome set.

    Plain: |E_p f - E_q f| <= sqrt(2 KL(p||q)), requiring |f| <= 1.
    Generalized: |E_p f - E_q f| <= sqrt(E_q f^2) sqrt(e^(D_2(p||q)) - 1),
    valid for any square-integrable f.  Both get a 1e-10 slack.
    """
    lookup = f.__getitem__ if hasattr(f, "__getitem__") and not callable(f) else f
    vals = [float(lookup(y)) for y in p.outcomes]
    if any(abs(v) > 1.0 for v in vals):
        raise ValueError("plain check requires |f| <= 1 on all outcomes")
    from .divergence import aligned_probs

    qp = aligned_probs(p, q)
    gap = abs(
        math.fsum(pi * v for pi, v in zip(p.probs, vals))
        - math.fsum(qi * v for qi, v in zip(qp, vals))
    )
    kl = renyi_divergence(p, q, 1.0)
    d2 = renyi_divergence(p, q, 2.0)
    plain_rhs = math.inf if math.isinf(kl) else math.sqrt(2.0 * kl)
    if math.isinf(d2):
        gen_rhs = math.inf
    else:
        second_moment = math.fsum(qi * v * v for qi, v in zip(qp, vals))
        gen_rhs = math.sqrt(second_moment) * math.sqrt(math.expm1(d2))
    return PinskerRecord(gap <= plain_rhs + 1e-10, gap <= gen_rhs + 1e-10)


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    support_violation: bool


def mc_divergence_estimate(
    p: OutcomeDist, q: OutcomeDist, alpha: float, n_samples: int, seed: int
) -> McEstimate:
    """Plug-in Monte Carlo estimate of D_alpha from empirical frequencies.

    Draws n_samples from each distribution with a seeded PCG64 generator
    (bit-reproducible), forms empirical frequency vectors, and evaluates
    the divergence on them.  The standard error comes from the delta
    method applied to the moment sum S = sum p_hat^alpha q_hat^(1-alpha)
    under independent multinomial sampling.  If the empirical p puts mass
    where the empirical q has none, the estimate is +inf and flagged.
    """
    if not alpha > 1.0 or math.isinf(alpha):
        raise ValueError("estimator requires finite alpha > 1")
    if n_samples < 10**4:
        raise ValueError("need at least 1e4 samples")
    from .divergence import aligned_probs

    q_aligned = aligned_probs(p, q)
    rng = np.random.default_rng(seed)
    p_counts = rng.multinomial(n_samples, np.asarray(p.probs) / math.fsum(p.probs))
    q_counts = rng.multinomial(n_samples, np.asarray(q_aligned) / math.fsum(q_aligned))
    p_hat = p_counts / n_samples
    q_hat = q_counts / n_samples
    if np.any((p_hat > 0.0) & (q_hat == 0.0)):
        return McEstimate(math.inf, math.nan, True)
    live = p_hat > 0.0
    ratio = np.where(live, p_hat / np.where(q_hat > 0.0, q_hat, 1.0), 0.0)
    s_terms = np.where(live, p_hat * ratio ** (alpha - 1.0), 0.0)
    s = float(np.sum(s_terms))
    estimate = math.log(s) / (alpha - 1.0)
    # Delta method: gradients of S w.r.t. the two frequency vectors under
    # multinomial covariance (diag(v) - v v^T) / n.
    g_p = np.where(live, alpha * ratio ** (alpha - 1.0), 0.0)
    g_q = np.where(live, (1.0 - alpha) * ratio**alpha, 0.0)
    var_p = float(np.sum(p_hat * g_p**2) - np.sum(p_hat * g_p) ** 2) / n_samples
    var_q = float(np.sum(q_hat * g_q**2) - np.sum(q_hat * g_q) ** 2) / n_samples
    var_s = max(0.0, var_p + var_q)
    std_error = math.sqrt(var_s) / ((alpha - 1.0) * s)
    return McEstimate(estimate, std_error, False)
