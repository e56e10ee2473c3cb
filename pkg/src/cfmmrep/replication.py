"""Replication cost, portfolio value, and the generalized inverse.

For a monotone payoff f on [alpha, beta], the risky-asset requirement at
price p is

    g(p) = integral of f'(q)/q from p to beta, plus sum of jump/q over
           jump locations q in [p, beta)

and the portfolio (f(p), g(p)) is worth V(p) = f(p) + p*g(p).  g is
nonincreasing and nonnegative, V is nondecreasing and concave.  The
generalized inverse g_inverse(x) is the rightmost price where g is still
at least x (alpha when there is none, beta when every price qualifies).

Catalog payoffs evaluate these through their closed forms; everything can
also be evaluated by adaptive quadrature, which the tests hold against the
closed forms.  Unbounded price intervals are folded to (0, 1/p] with the
substitution u = 1/q before integrating.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import (
    DomainError,
    InfiniteReplicationCostError,
    InvalidParameterError,
)
from .payoffs import (
    ConstantForm,
    LogForm,
    PayoffSpec,
    PriceInterval,
    catalog_closed_forms,
    payoff_price_anchors,
    piecewise_exact_g,
)
from .quadrature import (
    DEFAULT_OPTIONS,
    QuadratureOptions,
    adaptive_simpson,
    integrate_from_zero,
)

_INVERSION_REL_TOL = 1e-12
_GROWTH_CUTOFFS = (1e2, 1e3, 1e4, 1e5)


def _segment_integrand(spec: PayoffSpec, lo: float, hi: float):
    """f'(q)/q on a cell known to sit inside one segment.

    The q = 0 endpoint only arises for integrable starts; the adaptive rule
    absorbs the placeholder value there.
    """
    mid = lo + 0.5 * (hi - lo)
    form = spec._segment_at(mid).form

    def fn(q: float) -> float:
        if q <= 0.0:
            return 0.0
        return form.slope(q) / q

    return fn


def _tail_integrand(spec: PayoffSpec):
    """The u = 1/q image of f'(q)/q on the last segment: h(u) = f'(1/u)/u."""
    form = spec.segments[-1].form
    # q * f'(q) at q -> inf: 1 for logarithmic tails, 0 for every other
    # integrable tail (power tails are softened before reaching u = 0).
    limit = 1.0 if isinstance(form, LogForm) else 0.0

    def h(u: float) -> float:
        if u <= 0.0:
            return limit
        q = 1.0 / u
        return form.slope(q) * q

    return h


def quadrature_replication_cost(
    spec: PayoffSpec,
    interval: PriceInterval,
    p: float,
    opts: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """g(p) by adaptive quadrature, split at breakpoints, jumps added exactly.

    Cells are also split at the forms' characteristic prices so that a
    narrow feature never hides inside a cell much wider than itself.
    """
    beta = interval.beta
    if math.isinf(p):
        return 0.0

    total = sum(size / q for q, size in spec.jumps if p <= q < beta)

    tail_exp = spec.tail_growth_exponent()
    if not interval.bounded and tail_exp >= 1.0:
        raise InfiniteReplicationCostError(
            "payoff tail grows at least linearly; replication cost diverges")

    anchors = sorted(set(spec.breakpoints) | set(payoff_price_anchors(spec)))

    if p == 0.0:
        form = spec.segments[0].form
        cuts = [a for a in anchors if 0.0 < a < beta]
        first = cuts[0] if cuts else (beta if interval.bounded else 1.0)
        origin = form.growth_exponent()
        if origin > 0.0:
            # f ~ p**origin near zero: the integrand behaves like
            # q**(origin - 2), integrable only above exponent 1.
            if origin <= 1.0:
                return math.inf
            fn = _segment_integrand(spec, 0.0, first)
            total += integrate_from_zero(
                fn, first, singular_exponent=2.0 - origin, opts=opts).value
        elif not isinstance(form, ConstantForm):
            # Smooth start with a vanishing integrand limit (e.g. the
            # lognormal-model payoff): integrate plainly from zero.
            fn = _segment_integrand(spec, 0.0, first)
            total += integrate_from_zero(fn, first, singular_exponent=0.0,
                                         opts=opts).value
        p = first

    finite_top = beta if interval.bounded else max(p, max(anchors, default=p))
    cells = [p] + [a for a in anchors if p < a < finite_top] + [finite_top]
    for lo, hi in zip(cells, cells[1:]):
        if hi > lo:
            r = adaptive_simpson(_segment_integrand(spec, lo, hi), lo, hi, opts)
            total += r.value

    if not interval.bounded:
        r = integrate_from_zero(_tail_integrand(spec), 1.0 / finite_top,
                                singular_exponent=tail_exp, opts=opts)
        total += r.value
    return total


# ---------------------------------------------------------------------------
# Replication profile
# ---------------------------------------------------------------------------

class ReplicationProfile:
    """A payoff bound to an interval, with g / V / g_inverse evaluators.

    Closed forms are attached for catalog payoffs whenever the interval
    still reaches the price range where the payoff moves; piecewise-linear
    payoffs get their exact per-segment sum.  Construction also builds the
    monotone tabulation used to bracket numeric inversion, after which the
    profile is immutable and safe to share across threads.
    """

    def __init__(
        self,
        payoff: PayoffSpec,
        interval: Optional[PriceInterval] = None,
        opts: QuadratureOptions = DEFAULT_OPTIONS,
        *,
        use_closed_forms: bool = True,
        cache_size: int = 256,
    ):
        self.payoff = payoff
        self.interval = interval if interval is not None else payoff.interval
        self.opts = opts

        if not self.interval.bounded and payoff.tail_growth_exponent() >= 1.0:
            raise InfiniteReplicationCostError(
                "payoff grows at least linearly on an unbounded interval; "
                "sublinear growth is required for a finite replication cost")

        self.g_closed_form = None
        self.g_inverse_closed_form = None
        self.psi_closed_form = None
        if use_closed_forms and payoff.catalog is not None:
            forms = catalog_closed_forms(payoff.catalog)
            if forms is not None and self.interval.beta >= forms.support_cap:
                self.g_closed_form = forms.g
                self.g_inverse_closed_form = forms.g_inverse
                self.psi_closed_form = forms.psi
        if self.g_closed_form is None and payoff.catalog is None:
            # Piecewise-linear payoffs integrate exactly, for any interval.
            self.g_closed_form = piecewise_exact_g(
                PayoffSpec(payoff.segments, payoff.jumps, self.interval))

        self.g_alpha = self.g(self.interval.alpha)
        self.g_beta = 0.0
        self.v_alpha = self.portfolio_value(self.interval.alpha)

        self._table = None
        if self.g_inverse_closed_form is None:
            self._table = self._build_table(max(cache_size, 8))

    # -- evaluators ---------------------------------------------------------

    def g(self, p: float, opts: Optional[QuadratureOptions] = None,
          method: str = "auto") -> float:
        if method not in ("auto", "closed", "quadrature"):
            raise InvalidParameterError(f"unknown method {method!r}")
        if method == "closed" and self.g_closed_form is None:
            raise InvalidParameterError("no closed form attached to this profile")
        if method != "quadrature" and self.g_closed_form is not None:
            return self.g_closed_form(p)
        return quadrature_replication_cost(
            self.payoff, self.interval, p, opts or self.opts)

    def portfolio_value(self, p: float) -> float:
        if math.isinf(p):
            return self.payoff.limit_at_infinity()
        g = self.g(p)
        risky_value = 0.0 if p == 0.0 else p * g  # 0 * inf -> 0 at the left edge
        return self.payoff.value(p) + risky_value

    def g_inverse_value(self, r2: float) -> float:
        if r2 < 0.0 or math.isnan(r2):
            raise InvalidParameterError(f"risky reserve must be >= 0, got {r2}")
        if r2 == 0.0:
            return self.interval.beta
        if r2 > self.g_alpha:
            return self.interval.alpha
        if self.g_inverse_closed_form is not None:
            p = self.g_inverse_closed_form(r2)
            if math.isinf(p):
                return self.interval.beta
            return min(max(p, self.interval.alpha), self.interval.beta)
        return self._invert_numeric(r2)

    # -- numeric inversion --------------------------------------------------

    def _build_table(self, n: int):
        alpha, beta = self.interval.alpha, self.interval.beta
        bps = sorted(set(b for b in self.payoff.breakpoints if b > 0.0)
                     | set(payoff_price_anchors(self.payoff)))
        lo = alpha if alpha > 0.0 else (min(bps) if bps else 1.0) / 1e3
        if self.interval.bounded:
            hi = beta
        else:
            hi = max((max(bps) if bps else 1.0) * 1e3, lo * 1e6)
        if hi <= lo:
            hi = lo * 2.0
        step = (math.log(hi) - math.log(lo)) / (n - 1)
        prices = [math.exp(math.log(lo) + i * step) for i in range(n)]
        values = [self.g(p) for p in prices]
        # Quadrature noise must not break monotonicity of the bracket table.
        for i in range(1, n):
            if values[i] > values[i - 1]:
                values[i] = values[i - 1]
        return prices, values

    def _invert_numeric(self, r2: float) -> float:
        alpha, beta = self.interval.alpha, self.interval.beta
        prices, values = self._table

        # Rightmost table index still >= r2 brackets the crossing.
        idx = None
        for i in range(len(values) - 1, -1, -1):
            if values[i] >= r2:
                idx = i
                break

        if idx is None:
            # Crossing sits left of the table; descend toward alpha.
            hi = prices[0]
            lo = alpha if alpha > 0.0 else hi * 0.5
            if alpha == 0.0:
                while self.g(lo) < r2:
                    lo *= 0.5
                    if lo < 1e-300:
                        return 0.0
            elif self.g(lo) < r2:
                return alpha
        elif idx == len(values) - 1:
            # Crossing sits right of the table; expand toward beta.
            lo = prices[-1]
            hi = beta if self.interval.bounded else lo * 2.0
            if not self.interval.bounded:
                while self.g(hi) >= r2:
                    lo = hi
                    hi *= 2.0
                    if hi > 1e300:
                        return math.inf
            elif self.g(hi) >= r2:
                return beta
        else:
            lo, hi = prices[idx], prices[idx + 1]

        # g(lo) >= r2 > g(hi): bisect with geometric midpoints and return the
        # last point that actually evaluated on the >= side, so the supremum
        # convention survives a jump of g exactly at the boundary.
        while hi - lo > _INVERSION_REL_TOL * lo:
            mid = math.sqrt(lo * hi)
            if mid <= lo or mid >= hi:
                break
            if self.g(mid) >= r2:
                lo = mid
            else:
                hi = mid
        return lo


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def _check_price(profile: ReplicationProfile, p: float):
    if math.isnan(p) or not profile.interval.contains(p):
        raise DomainError(
            f"price {p} outside replication interval "
            f"[{profile.interval.alpha}, {profile.interval.beta}]")


def replication_cost(
    profile: ReplicationProfile,
    p: float,
    opts: Optional[QuadratureOptions] = None,
    method: str = "auto",
) -> float:
    """Risky asset required at price p."""
    _check_price(profile, p)
    return profile.g(p, opts=opts, method=method)


def portfolio_at(profile: ReplicationProfile, p: float):
    """(numeraire, risky) holdings at price p."""
    _check_price(profile, p)
    return profile.payoff.value(p), profile.g(p)


def portfolio_value(profile: ReplicationProfile, p: float) -> float:
    """V(p) = f(p) + p * g(p)."""
    _check_price(profile, p)
    return profile.portfolio_value(p)


def portfolio_value_integral(
    profile: ReplicationProfile,
    p: float,
    opts: Optional[QuadratureOptions] = None,
) -> float:
    """V(p) through the integral identity V(alpha) + integral of g.

    Cross-check path for portfolio_value; the two must agree to quadrature
    tolerance.
    """
    _check_price(profile, p)
    if math.isinf(p):
        raise DomainError("integral form needs a finite price")
    opts = opts or profile.opts
    alpha = profile.interval.alpha
    total = profile.v_alpha
    if p == alpha:
        return total

    lo = alpha
    if alpha == 0.0:
        origin = profile.payoff.origin_growth_exponent()
        if origin is not None:
            cuts = [b for b in profile.payoff.breakpoints if b > 0.0]
            first = min(cuts[0] if cuts else p, p)
            s = 1.0 - origin if origin < 1.0 else 0.0
            r = integrate_from_zero(profile.g, first, singular_exponent=s, opts=opts)
            total += r.value
            lo = first

    cells = [lo] + [b for b in profile.payoff.breakpoints if lo < b < p] + [p]
    for a, b in zip(cells, cells[1:]):
        if b > a:
            total += adaptive_simpson(profile.g, a, b, opts).value
    return total


def g_inverse(profile: ReplicationProfile, r2: float) -> float:
    """Rightmost price whose risky requirement is still at least r2.

    Returns alpha when no price qualifies and beta (possibly math.inf) when
    every price does, matching the supremum convention.
    """
    return profile.g_inverse_value(r2)


# ---------------------------------------------------------------------------
# Growth classification
# ---------------------------------------------------------------------------

class GrowthClass(enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GrowthAnalysis:
    classification: GrowthClass
    evidence: tuple
    asymptotic_exponent: Optional[float]


def _probe_cost(spec: PayoffSpec, lo: float, hi: float,
                opts: QuadratureOptions) -> float:
    """Replication cost truncated at a finite cutoff."""
    truncated = PriceInterval(0.0, hi)
    return quadrature_replication_cost(spec, truncated, lo, opts)


def growth_classification(
    spec: PayoffSpec,
    interval: Optional[PriceInterval] = None,
    opts: QuadratureOptions = DEFAULT_OPTIONS,
) -> GrowthAnalysis:
    """Decide whether the replication cost is finite on the interval.

    Bounded intervals are always finite.  On unbounded intervals, catalog
    payoffs classify by their tail growth exponent (below 1 is finite);
    other payoffs are probed at increasing cutoffs and classified by
    whether the probes converge.
    """
    interval = interval if interval is not None else spec.interval
    if interval.bounded:
        return GrowthAnalysis(GrowthClass.FINITE, (), None)

    base = max(interval.alpha, max((b for b in spec.breakpoints), default=0.0), 1.0)
    cutoffs = [c for c in _GROWTH_CUTOFFS if c > base * 4.0]
    while len(cutoffs) < len(_GROWTH_CUTOFFS):
        cutoffs.append((cutoffs[-1] if cutoffs else base * 4.0) * 10.0)
    evidence = tuple((c, _probe_cost(spec, base, c, opts)) for c in cutoffs)

    if spec.catalog is not None:
        exponent = spec.tail_growth_exponent()
        cls = GrowthClass.FINITE if exponent < 1.0 else GrowthClass.INFINITE
        return GrowthAnalysis(cls, evidence, exponent)

    probes = [g for _, g in evidence]
    deltas = [b - a for a, b in zip(probes, probes[1:])]
    if deltas[-1] <= opts.abs_tol:
        return GrowthAnalysis(GrowthClass.FINITE, evidence, None)
    if all(d > opts.abs_tol for d in deltas) and deltas[-1] >= 0.5 * deltas[0]:
        return GrowthAnalysis(GrowthClass.INFINITE, evidence, None)
    return GrowthAnalysis(GrowthClass.UNKNOWN, evidence, None)
