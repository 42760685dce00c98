"""Budget ledger and the conversion calculus between privacy notions.

All operations are pure parameter arithmetic: composition and group scaling
of concentrated-DP budgets, and conversions between pure DP, approximate
DP, (approximate) zCDP, and the mean-concentrated variant.  Delta values
are probabilities and get clamped to [0, 1] after every closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence


@dataclass(frozen=True)
class ZcdpParams:
    """A (xi, rho) concentrated-DP budget, optionally delta-approximate.

    delta_approx = 0 is the plain guarantee.  xi bounds the divergence
    offset, rho the linear-in-order growth.
    """

    xi: float
    rho: float
    delta_approx: float = 0.0

    def __post_init__(self) -> None:
        if math.isnan(self.xi) or self.xi < 0.0:
            raise ValueError("xi must be nonnegative")
        if math.isnan(self.rho) or self.rho < 0.0:
            raise ValueError("rho must be nonnegative")
        if not 0.0 <= self.delta_approx <= 1.0:
            raise ValueError("delta_approx must be in [0, 1]")


@dataclass(frozen=True)
class DpPoint:
    """One (eps, delta) point on an approximate-DP tradeoff curve."""

    eps: float
    delta: float

    def __post_init__(self) -> None:
        if math.isnan(self.eps) or self.eps < 0.0:
            raise ValueError("eps must be nonnegative")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must be in [0, 1]")


@dataclass(frozen=True)
class McdpParams:
    """Mean-concentrated parameters: loss mean bound mu, subgaussian scale tau.

    tau = 0 is admitted as the degenerate limit of a constant privacy loss
    (it arises from converting the zero budget).
    """

    mu: float
    tau: float

    def __post_init__(self) -> None:
        if math.isnan(self.mu):
            raise ValueError("mu must be a real number")
        if math.isnan(self.tau) or self.tau < 0.0:
            raise ValueError("tau must be nonnegative")


# Ledger file schema: required numeric fields per entry kind.
LEDGER_FIELDS: dict[str, tuple[str, ...]] = {
    "gaussian": ("sensitivity", "sigma"),
    "pure_dp": ("eps",),
    "approx_dp": ("eps", "delta"),
    "zcdp": ("xi", "rho", "delta"),
    "mcdp": ("mu", "tau"),
}


@dataclass(frozen=True)
class LedgerEntry:
    """One mechanism invocation awaiting composition."""

    kind: str
    params: Mapping[str, float]
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in LEDGER_FIELDS:
            raise ValueError(
                f"unknown entry kind {self.kind!r}; expected one of {sorted(LEDGER_FIELDS)}"
            )
        required = LEDGER_FIELDS[self.kind]
        params = dict(self.params)
        for name in required:
            if name not in params:
                raise ValueError(f"entry kind {self.kind!r} requires field {name!r}")
            value = params[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"field {name!r} must be a number, got {value!r}")
            if math.isnan(float(value)):
                raise ValueError(f"field {name!r} must not be NaN")
        extras = set(params) - set(required)
        if extras:
            raise ValueError(f"entry kind {self.kind!r} has unknown fields {sorted(extras)}")
        object.__setattr__(self, "params", {k: float(v) for k, v in params.items()})


def entry_to_zcdp(entry: LedgerEntry) -> ZcdpParams:
    """Budget contributed by one ledger entry, in the form compose() consumes.

    DP-style entries go through the quadratic route (0, eps^2/2, delta),
    which is what makes many-fold composition pay off; the lossless
    single-entry alternative (eps, 0, delta) remains available through
    pure_dp_to_zcdp / dp_to_approx_zcdp_maxdiv for callers that want it.
    """
    p = entry.params
    if entry.kind == "gaussian":
        if not p["sigma"] > 0.0:
            raise ValueError("gaussian entry needs sigma > 0")
        if p["sensitivity"] < 0.0:
            raise ValueError("gaussian entry needs sensitivity >= 0")
        return ZcdpParams(0.0, p["sensitivity"] ** 2 / (2.0 * p["sigma"] ** 2))
    if entry.kind == "pure_dp":
        return dp_to_approx_zcdp(DpPoint(p["eps"], 0.0))
    if entry.kind == "approx_dp":
        return dp_to_approx_zcdp(DpPoint(p["eps"], p["delta"]))
    if entry.kind == "zcdp":
        return ZcdpParams(p["xi"], p["rho"], p["delta"])
    if entry.kind == "mcdp":
        return mcdp_to_zcdp(McdpParams(p["mu"], p["tau"]))
    raise AssertionError(f"unreachable kind {entry.kind!r}")


def compose(entries: Sequence[ZcdpParams]) -> ZcdpParams:
    """Sequential composition: budgets add, failure probabilities union-bound.

    Returns (sum xi, sum rho, 1 - prod(1 - delta)).  Sums use exact float
    summation, so the result is permutation-invariant.
    """
    if not entries:
        raise ValueError("compose needs at least one entry")
    xi = math.fsum(e.xi for e in entries)
    rho = math.fsum(e.rho for e in entries)
    keep = 1.0
    for e in sorted(entries, key=lambda e: e.delta_approx):
        keep *= 1.0 - e.delta_approx
    return ZcdpParams(xi, rho, min(1.0, max(0.0, 1.0 - keep)))


def _harmonic(k: int) -> float:
    return math.fsum(1.0 / i for i in range(1, k + 1))


def group_privacy(params: ZcdpParams, k: int) -> ZcdpParams:
    """Budget against groups of k individuals: (xi k H_k, rho k^2).

    Only the plain guarantee scales this way; approximate budgets are
    rejected.
    """
    if k < 1:
        raise ValueError("group size must be a positive integer")
    if params.delta_approx != 0.0:
        raise ValueError("group privacy is supported only for delta_approx = 0")
    return ZcdpParams(params.xi * k * _harmonic(k), params.rho * k * k)


def zcdp_to_dp_simple(params: ZcdpParams, delta: float) -> DpPoint:
    """Closed-form (eps, delta) point: eps = xi + rho + sqrt(4 rho ln(1/delta))."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if params.delta_approx != 0.0:
        raise ValueError("simple conversion applies to plain budgets only")
    eps = params.xi + params.rho + math.sqrt(4.0 * params.rho * math.log(1.0 / delta))
    return DpPoint(eps, delta)


def zcdp_to_dp_refined(params: ZcdpParams, eps: float) -> float:
    """Best-branch delta at a requested eps >= xi + rho.

    Evaluates e^{-(eps-xi-rho)^2 / 4 rho} times the minimum of the four
    sharpening factors and clamps to [0, 1].  The plain budget's
    delta_approx must be 0; approximate budgets go through
    approx_zcdp_to_dp.
    """
    if params.delta_approx != 0.0:
        raise ValueError("refined conversion applies to plain budgets only")
    if not params.rho > 0.0:
        raise ValueError("refined conversion needs rho > 0")
    xi, rho = params.xi, params.rho
    if eps < xi + rho:
        raise ValueError("refined conversion needs eps >= xi + rho")
    a = (eps - xi - rho) / (2.0 * rho)
    lead = math.exp(-((eps - xi - rho) ** 2) / (4.0 * rho))
    branches = (
        1.0,
        math.sqrt(math.pi * rho),
        1.0 / (1.0 + a),
        2.0 / (1.0 + a + math.sqrt((1.0 + a) ** 2 + 4.0 / (math.pi * rho))),
    )
    return min(1.0, max(0.0, lead * min(branches)))


def pure_dp_to_zcdp(eps: float) -> tuple[ZcdpParams, ZcdpParams]:
    """Both concentrated forms of an eps-DP guarantee: (eps, 0) and (0, eps^2/2)."""
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    return ZcdpParams(eps, 0.0), ZcdpParams(0.0, 0.5 * eps * eps)


def dp_family_to_zcdp(xi_hat: float, rho_hat: float) -> ZcdpParams:
    """Concentrated budget implied by a (xi_hat, rho_hat) DP-style family.

    Valid only on the hypothesis square [0,1] x [0,1]; outside it the
    statement gives no guarantee, so inputs are rejected rather than
    extrapolated.
    """
    if not 0.0 <= xi_hat <= 1.0 or not 0.0 <= rho_hat <= 1.0:
        raise ValueError("xi_hat and rho_hat must lie in [0, 1]")
    return ZcdpParams(xi_hat - rho_hat / 4.0 + 5.0 * rho_hat**0.25, rho_hat / 4.0)


def mcdp_to_zcdp(params: McdpParams) -> ZcdpParams:
    """Concentrated budget from mean-concentrated parameters: (mu - tau^2/2, tau^2/2).

    mu < tau^2/2 would need a negative offset, which the concentrated
    definition does not admit; such inputs are rejected.
    """
    half_tau_sq = 0.5 * params.tau**2
    if params.mu < half_tau_sq:
        raise ValueError(
            f"mu = {params.mu!r} is below tau^2/2 = {half_tau_sq!r}; "
            "no nonnegative-offset concentrated budget exists"
        )
    return ZcdpParams(params.mu - half_tau_sq, half_tau_sq)


def zcdp_to_mcdp(params: ZcdpParams) -> McdpParams:
    """Mean-concentrated parameters implied by a plain (xi, rho) budget.

    mu = xi + rho is the exact loss-mean bound; the subgaussian scale uses
    the explicit constant tau = sqrt(8 (e^(xi + 2 rho) - 1)), the tightest
    one supported by the centered-MGF analysis (the small-lambda regime
    needs tau^2/2 >= 4 (e^(xi+2rho) - 1), which dominates the large-lambda
    requirement 4 (xi + 2 rho)).
    """
    if params.delta_approx != 0.0:
        raise ValueError("mean-concentrated conversion applies to plain budgets only")
    mu = params.xi + params.rho
    tau = math.sqrt(8.0 * math.expm1(params.xi + 2.0 * params.rho))
    return McdpParams(mu, tau)


def dp_to_approx_zcdp(pt: DpPoint) -> ZcdpParams:
    """delta-approximate (0, eps^2/2) budget implied by an (eps, delta)-DP point."""
    return ZcdpParams(0.0, 0.5 * pt.eps * pt.eps, pt.delta)


def dp_to_approx_zcdp_maxdiv(pt: DpPoint) -> ZcdpParams:
    """The intermediate delta-approximate (eps, 0) form of the same implication."""
    return ZcdpParams(pt.eps, 0.0, pt.delta)


def approx_zcdp_to_dp(params: ZcdpParams, eps: float) -> DpPoint:
    """(eps, delta) point implied by a delta_approx-approximate budget.

    With rho = 0 the guarantee is already (xi, delta_approx)-DP and the
    requested eps is ignored.  Otherwise the refined conversion handles the
    non-catastrophic branch and the failure masses combine as
    delta_approx + (1 - delta_approx) * delta'.
    """
    if params.rho == 0.0:
        return DpPoint(params.xi, params.delta_approx)
    plain = ZcdpParams(params.xi, params.rho)
    d = zcdp_to_dp_refined(plain, eps)
    da = params.delta_approx
    return DpPoint(eps, min(1.0, da + (1.0 - da) * d))


def eps_for_delta(params: ZcdpParams, delta: float) -> float:
    """Smallest eps (to 1e-10) whose converted delta meets the target.

    Uses the refined conversion, which is strictly decreasing in eps on its
    domain, so plain bisection applies.  Returns +inf when the approximate
    mass alone already exceeds the target.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    da = params.delta_approx
    if da >= delta:
        return math.inf
    target = (delta - da) / (1.0 - da)
    if params.rho == 0.0:
        return params.xi
    plain = ZcdpParams(params.xi, params.rho)
    lo = params.xi + params.rho
    if zcdp_to_dp_refined(plain, lo) <= target:
        return lo
    step = max(1.0, math.sqrt(params.rho))
    hi = lo + step
    while zcdp_to_dp_refined(plain, hi) > target:
        step *= 2.0
        hi = lo + step
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if zcdp_to_dp_refined(plain, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def dp_composition_bound(points: Sequence[DpPoint], delta_prime: float) -> DpPoint:
    """Closed-form budget for composing many (eps_i, delta_i) mechanisms.

    eps = ||eps||_2^2 / 2 + sqrt(2 ln(sqrt(pi/2) ||eps||_2 / delta_prime)) * ||eps||_2
    when the log is positive, else the lambda = 0 endpoint eps = ||eps||_2^2 / 2;
    delta = delta_prime + sum(delta_i) in both cases.
    """
    if not points:
        raise ValueError("need at least one point")
    if not delta_prime > 0.0:
        raise ValueError("delta_prime must be positive")
    l2 = math.sqrt(math.fsum(p.eps**2 for p in points))
    delta = min(1.0, delta_prime + math.fsum(p.delta for p in points))
    if l2 == 0.0:
        return DpPoint(0.0, delta)
    log_arg = math.sqrt(math.pi / 2.0) * l2 / delta_prime
    eps = 0.5 * l2 * l2
    if log_arg > 1.0:
        eps += math.sqrt(2.0 * math.log(log_arg)) * l2
    return DpPoint(eps, delta)


def dp_composition_refined(points: Sequence[DpPoint], eps: float) -> DpPoint:
    """Four-branch form of the same composition at a requested total eps.

    Treats the composition as the budget (0, sum eps_i^2 / 2), converts with
    the refined minimum, and combines failure masses multiplicatively:
    delta = 1 - (1 - delta') prod(1 - delta_i).
    """
    if not points:
        raise ValueError("need at least one point")
    rho = 0.5 * math.fsum(p.eps**2 for p in points)
    d_prime = 0.0 if rho == 0.0 else zcdp_to_dp_refined(ZcdpParams(0.0, rho), eps)
    keep = 1.0 - d_prime
    for p in sorted(points, key=lambda p: p.delta):
        keep *= 1.0 - p.delta
    return DpPoint(eps, min(1.0, max(0.0, 1.0 - keep)))


def advanced_composition_baseline(eps: float, k: int, delta_prime: float) -> float:
    """Classical homogeneous advanced-composition eps, as a comparison target.

    eps * sqrt(2 k ln(1/delta_prime)) + k eps (e^eps - 1).  Included purely
    as external plumbing to benchmark the quadratic-route bound against.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not 0.0 < delta_prime < 1.0:
        raise ValueError("delta_prime must be in (0, 1)")
    return eps * math.sqrt(2.0 * k * math.log(1.0 / delta_prime)) + k * eps * (math.expm1(eps))
