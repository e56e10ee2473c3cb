"""Monotone payoff functions and the built-in payoff catalog.

A payoff maps the risky asset's price p (in units of the numeraire) to a
nonnegative, nondecreasing amount of numeraire f(p).  Payoffs are stored
as contiguous segments covering [0, inf), each with a typed form that can
report its value and slope, plus an explicit list of upward jumps.  At a
jump the payoff takes its lower value (lower semicontinuous), so the jump
mass is carried separately and stays visible to the integration code.

Six catalog families ship with closed forms for the replication quantities;
everything else is expressed as a monotone piecewise-linear table.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .errors import (
    DomainError,
    BreakpointDerivativeError,
    InfiniteReplicationCostError,
    InvalidParameterError,
    MonotonicityError,
    PayoffParseError,
)
from .normal import norm_cdf, norm_inv, norm_pdf


# ---------------------------------------------------------------------------
# Price interval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriceInterval:
    """Replication interval [alpha, beta]; beta = math.inf means unbounded.

    The infinite beta is a marker only: integration code substitutes it away
    and never feeds it into arithmetic.
    """

    alpha: float = 0.0
    beta: float = math.inf

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise InvalidParameterError(f"alpha must be finite and >= 0, got {self.alpha}")
        if math.isnan(self.beta) or self.beta < self.alpha:
            raise InvalidParameterError(
                f"interval needs 0 <= alpha <= beta, got [{self.alpha}, {self.beta}]")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.beta)

    def contains(self, p: float) -> bool:
        return self.alpha <= p <= self.beta

    def clamp(self, p: float) -> float:
        if p < self.alpha:
            return self.alpha
        if self.bounded and p > self.beta:
            return self.beta
        return p


# ---------------------------------------------------------------------------
# Segment forms
# ---------------------------------------------------------------------------

class ConstantForm:
    __slots__ = ("c",)

    def __init__(self, c: float):
        self.c = c

    def value(self, p: float) -> float:
        return self.c

    def slope(self, p: float) -> float:
        return 0.0

    def growth_exponent(self) -> float:
        return 0.0

    def price_anchors(self) -> tuple:
        return ()

    def __eq__(self, other):
        return isinstance(other, ConstantForm) and self.c == other.c


class LinearForm:
    """f(p) = y0 + slope * (p - x0) on its segment."""

    __slots__ = ("x0", "y0", "m")

    def __init__(self, x0: float, y0: float, m: float):
        self.x0 = x0
        self.y0 = y0
        self.m = m

    def value(self, p: float) -> float:
        return self.y0 + self.m * (p - self.x0)

    def slope(self, p: float) -> float:
        return self.m

    def growth_exponent(self) -> float:
        return 1.0 if self.m > 0.0 else 0.0

    def price_anchors(self) -> tuple:
        return ()

    def __eq__(self, other):
        return (isinstance(other, LinearForm)
                and (self.x0, self.y0, self.m) == (other.x0, other.y0, other.m))


class PowerForm:
    """f(p) = scale * p**exponent + offset."""

    __slots__ = ("scale", "exponent", "offset")

    def __init__(self, scale: float, exponent: float, offset: float = 0.0):
        self.scale = scale
        self.exponent = exponent
        self.offset = offset

    def value(self, p: float) -> float:
        return self.scale * p**self.exponent + self.offset

    def slope(self, p: float) -> float:
        if p == 0.0:
            return 0.0 if self.exponent >= 1.0 else math.inf
        return self.scale * self.exponent * p ** (self.exponent - 1.0)

    def growth_exponent(self) -> float:
        return self.exponent if self.scale > 0.0 else 0.0

    def price_anchors(self) -> tuple:
        return ()

    def __eq__(self, other):
        return (isinstance(other, PowerForm)
                and (self.scale, self.exponent, self.offset)
                == (other.scale, other.exponent, other.offset))


class LogForm:
    """f(p) = log(p / p0)."""

    __slots__ = ("p0",)

    def __init__(self, p0: float):
        self.p0 = p0

    def value(self, p: float) -> float:
        return math.log(p / self.p0)

    def slope(self, p: float) -> float:
        return 1.0 / p

    def growth_exponent(self) -> float:
        # Slower than any positive power, fast enough for finite replication.
        return 0.0

    def price_anchors(self) -> tuple:
        return (self.p0,)

    def __eq__(self, other):
        return isinstance(other, LogForm) and self.p0 == other.p0


class NormalCdfForm:
    """f(p) = N(d(p)) with d(p) = (log(p/strike) - tau*sigma^2/2) / (sigma*sqrt(tau))."""

    __slots__ = ("strike", "sigma", "tau", "_vol")

    def __init__(self, strike: float, sigma: float, tau: float):
        self.strike = strike
        self.sigma = sigma
        self.tau = tau
        self._vol = sigma * math.sqrt(tau)

    def d(self, p: float) -> float:
        if p <= 0.0:
            return -math.inf
        return (math.log(p / self.strike) - 0.5 * self._vol * self._vol) / self._vol

    def value(self, p: float) -> float:
        return norm_cdf(self.d(p))

    def slope(self, p: float) -> float:
        if p <= 0.0:
            return 0.0
        return norm_pdf(self.d(p)) / (p * self._vol)

    def growth_exponent(self) -> float:
        return 0.0

    def price_anchors(self) -> tuple:
        # Characteristic prices bracketing where f'(q)/q and its 1/q image
        # concentrate; integration pre-splits here so narrow bumps cannot
        # hide inside a wide cell.
        v2 = self._vol * self._vol
        return (self.strike * math.exp(-1.5 * v2),
                self.strike,
                self.strike * math.exp(0.5 * v2))

    def __eq__(self, other):
        return (isinstance(other, NormalCdfForm)
                and (self.strike, self.sigma, self.tau)
                == (other.strike, other.sigma, other.tau))


SegmentForm = Union[ConstantForm, LinearForm, PowerForm, LogForm, NormalCdfForm]


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float  # math.inf for the last segment
    form: SegmentForm


# ---------------------------------------------------------------------------
# Catalog parameter variants
# ---------------------------------------------------------------------------

def _require(cond: bool, message: str):
    if not cond:
        raise InvalidParameterError(message)


@dataclass(frozen=True)
class CashOrNothing:
    """Pays 1 above the threshold p0, 0 at or below it."""

    p0: float

    def __post_init__(self):
        _require(self.p0 > 0.0 and math.isfinite(self.p0),
                 f"cash_or_nothing requires p0 > 0, got p0={self.p0}")


@dataclass(frozen=True)
class CappedCall:
    """Pays p - p0 between p0 and p1, capped at p1 - p0."""

    p0: float
    p1: float

    def __post_init__(self):
        _require(0.0 < self.p0 <= self.p1,
                 f"capped_call requires 0 < p0 <= p1, got p0={self.p0}, p1={self.p1}")


@dataclass(frozen=True)
class BlackScholesBinary:
    """Binary call priced under a lognormal model with maturity tau."""

    strike: float
    sigma: float
    tau: float

    def __post_init__(self):
        _require(self.strike >= 0.0 and math.isfinite(self.strike),
                 f"black_scholes_binary requires strike >= 0, got {self.strike}")
        _require(self.sigma >= 0.0, f"black_scholes_binary requires sigma >= 0, got {self.sigma}")
        _require(self.tau > 0.0, f"black_scholes_binary requires tau > 0, got {self.tau}")


@dataclass(frozen=True)
class Logarithmic:
    """Pays log(p / p0) above p0."""

    p0: float

    def __post_init__(self):
        _require(self.p0 > 0.0 and math.isfinite(self.p0),
                 f"logarithmic requires p0 > 0, got p0={self.p0}")


@dataclass(frozen=True)
class CappedPower:
    """Pays p**a - p0**a between p0 and p1, capped above p1.

    The exponent is named `a`; a=1 recovers the capped call.
    """

    p0: float
    p1: float
    a: float

    def __post_init__(self):
        _require(self.a > 0.0, f"capped_power requires exponent a > 0, got a={self.a}")
        _require(0.0 <= self.p0 <= self.p1,
                 f"capped_power requires 0 <= p0 <= p1, got p0={self.p0}, p1={self.p1}")


@dataclass(frozen=True)
class ConstantProportion:
    """Holds a fixed share of portfolio value in each asset: f(p) = c * p**w."""

    w: float
    c: float

    def __post_init__(self):
        _require(0.0 < self.w < 1.0, f"constant_proportion requires 0 < w < 1, got w={self.w}")
        _require(self.c >= 0.0 and math.isfinite(self.c),
                 f"constant_proportion requires c >= 0, got c={self.c}")


CatalogParams = Union[CashOrNothing, CappedCall, BlackScholesBinary,
                      Logarithmic, CappedPower, ConstantProportion]

CATALOG_NAMES = {
    CashOrNothing: "cash_or_nothing",
    CappedCall: "capped_call",
    BlackScholesBinary: "black_scholes_binary",
    Logarithmic: "logarithmic",
    CappedPower: "capped_power",
    ConstantProportion: "constant_proportion",
}


def catalog_name(params: CatalogParams) -> str:
    return CATALOG_NAMES[type(params)]


# ---------------------------------------------------------------------------
# Payoff specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PayoffSpec:
    """A monotone payoff plus its replication interval.

    segments cover [0, inf) contiguously; jumps list (location, size) pairs
    with positive sizes at segment boundaries.  Immutable after construction,
    safe to evaluate concurrently.
    """

    segments: tuple
    jumps: tuple
    interval: PriceInterval
    catalog: Optional[CatalogParams] = None

    def __post_init__(self):
        if not self.segments:
            raise InvalidParameterError("payoff needs at least one segment")
        if self.segments[0].lo != 0.0 or not math.isinf(self.segments[-1].hi):
            raise InvalidParameterError("segments must cover [0, inf)")
        bounds = self.breakpoints
        for a, b in zip(bounds, bounds[1:]):
            if not a < b:
                raise InvalidParameterError("breakpoints must be strictly increasing")
        locs = set(bounds)
        for q, size in self.jumps:
            if size < 0.0:
                raise InvalidParameterError(f"jump size at {q} must be >= 0")
            if q not in locs:
                raise InvalidParameterError(f"jump location {q} is not a breakpoint")

    @property
    def breakpoints(self) -> tuple:
        """Interior segment boundaries (kinks and jump locations), ascending."""
        return tuple(s.hi for s in self.segments[:-1])

    def _segment_at(self, p: float) -> Segment:
        # bisect_left sends a boundary point to the lower segment, which is
        # exactly the lower-semicontinuous convention at jumps.
        return self.segments[bisect_left(self.breakpoints, p)]

    def value(self, p: float) -> float:
        """Payoff at price p, ignoring the replication interval."""
        if p < 0.0 or math.isnan(p):
            raise DomainError(f"price must be >= 0, got {p}")
        return self._segment_at(p).form.value(p)

    def slope(self, p: float) -> float:
        return self._segment_at(p).form.slope(p)

    def jump_at(self, q: float) -> float:
        for loc, size in self.jumps:
            if loc == q:
                return size
        return 0.0

    def limit_at_infinity(self) -> float:
        """lim f(p) as p grows; math.inf when the payoff is unbounded."""
        last = self.segments[-1].form
        if isinstance(last, ConstantForm):
            return last.c
        if isinstance(last, NormalCdfForm):
            return 1.0
        if isinstance(last, LinearForm):
            return math.inf if last.m > 0.0 else last.value(self.segments[-1].lo)
        if isinstance(last, PowerForm):
            return math.inf if last.scale > 0.0 else last.offset
        return math.inf  # LogForm

    def tail_growth_exponent(self) -> float:
        """Power growth of f at large prices (0 covers bounded and log tails)."""
        return self.segments[-1].form.growth_exponent()

    def origin_growth_exponent(self) -> Optional[float]:
        """Exponent e with f ~ p**e near 0, or None when f is flat there."""
        first = self.segments[0].form
        e = first.growth_exponent()
        return e if e > 0.0 else None


def eval_payoff(spec: PayoffSpec, p: float) -> float:
    """f(p).  At a jump the lower value is returned."""
    if not spec.interval.contains(p):
        raise DomainError(
            f"price {p} outside replication interval "
            f"[{spec.interval.alpha}, {spec.interval.beta}]")
    return spec.value(p)


def eval_payoff_derivative(spec: PayoffSpec, p: float) -> float:
    """f'(p) away from breakpoints."""
    if not (spec.interval.alpha < p < spec.interval.beta) or p <= 0.0:
        raise DomainError(f"price {p} is not interior to the replication interval")
    if p in spec.breakpoints:
        raise BreakpointDerivativeError(
            f"derivative undefined at breakpoint {p}; split integrals there")
    return spec.slope(p)


def payoff_breakpoints(spec: PayoffSpec) -> list:
    """Sorted interior kink/jump locations (every jump location included)."""
    return [b for b in spec.breakpoints if b > 0.0]


def payoff_price_anchors(spec: PayoffSpec) -> list:
    """Positive characteristic prices of the payoff's smooth forms."""
    out = set()
    for seg in spec.segments:
        for a in seg.form.price_anchors():
            if a > 0.0 and math.isfinite(a):
                out.add(a)
    return sorted(out)


# ---------------------------------------------------------------------------
# Catalog construction
# ---------------------------------------------------------------------------

def natural_interval(params: CatalogParams) -> PriceInterval:
    """The interval each family is quoted on: [0, p1] for capped payoffs,
    [0, inf) otherwise."""
    if isinstance(params, (CappedCall, CappedPower)) and math.isfinite(params.p1):
        return PriceInterval(0.0, params.p1)
    return PriceInterval(0.0, math.inf)


def _step_segments(threshold: float, low: float, high: float):
    segs = (Segment(0.0, threshold, ConstantForm(low)),
            Segment(threshold, math.inf, ConstantForm(high)))
    return segs, ((threshold, high - low),)


def _catalog_segments(params: CatalogParams):
    if isinstance(params, CashOrNothing):
        return _step_segments(params.p0, 0.0, 1.0)

    if isinstance(params, CappedCall):
        if params.p0 == params.p1:
            return (Segment(0.0, math.inf, ConstantForm(0.0)),), ()
        segs = [Segment(0.0, params.p0, ConstantForm(0.0)),
                Segment(params.p0, params.p1, LinearForm(params.p0, 0.0, 1.0))]
        if math.isfinite(params.p1):
            segs.append(Segment(params.p1, math.inf, ConstantForm(params.p1 - params.p0)))
        else:
            segs[-1] = Segment(params.p0, math.inf, LinearForm(params.p0, 0.0, 1.0))
        return tuple(segs), ()

    if isinstance(params, BlackScholesBinary):
        if params.strike == 0.0:
            return (Segment(0.0, math.inf, ConstantForm(1.0)),), ()
        if params.sigma == 0.0:
            return _step_segments(params.strike, 0.0, 1.0)
        return (Segment(0.0, math.inf,
                        NormalCdfForm(params.strike, params.sigma, params.tau)),), ()

    if isinstance(params, Logarithmic):
        return (Segment(0.0, params.p0, ConstantForm(0.0)),
                Segment(params.p0, math.inf, LogForm(params.p0))), ()

    if isinstance(params, CappedPower):
        if params.p0 == params.p1:
            return (Segment(0.0, math.inf, ConstantForm(0.0)),), ()
        power = PowerForm(1.0, params.a, -params.p0**params.a)
        segs = []
        if params.p0 > 0.0:
            segs.append(Segment(0.0, params.p0, ConstantForm(0.0)))
        if math.isfinite(params.p1):
            segs.append(Segment(params.p0, params.p1, power))
            segs.append(Segment(params.p1, math.inf,
                                ConstantForm(params.p1**params.a - params.p0**params.a)))
        else:
            segs.append(Segment(params.p0, math.inf, power))
        return tuple(segs), ()

    if isinstance(params, ConstantProportion):
        if params.c == 0.0:
            return (Segment(0.0, math.inf, ConstantForm(0.0)),), ()
        return (Segment(0.0, math.inf, PowerForm(params.c, params.w, 0.0)),), ()

    raise InvalidParameterError(f"unknown catalog params {params!r}")


def make_catalog_payoff(
    params: CatalogParams,
    interval: Optional[PriceInterval] = None,
    *,
    allow_infinite_cost: bool = False,
) -> PayoffSpec:
    """Build a catalog payoff on the given (or natural) interval.

    Raises InfiniteReplicationCostError for configurations whose risky-asset
    requirement diverges (a linear or superlinear tail on an unbounded
    interval), unless allow_infinite_cost is set, which is useful only for
    growth classification.
    """
    if interval is None:
        interval = natural_interval(params)
    linear_tail = (
        (isinstance(params, CappedPower) and params.a >= 1.0 and not math.isfinite(params.p1))
        or (isinstance(params, CappedCall) and not math.isfinite(params.p1)))
    if linear_tail and not interval.bounded and not allow_infinite_cost:
        raise InfiniteReplicationCostError(
            "payoff grows at least linearly up to an unbounded price: the required "
            "risky reserve diverges; cap the payoff (finite p1) or bound the interval")
    segments, jumps = _catalog_segments(params)
    return PayoffSpec(segments=segments, jumps=jumps, interval=interval, catalog=params)


# ---------------------------------------------------------------------------
# Closed forms for the catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogClosedForms:
    """Family formulas for the replication quantities.

    g maps price to required risky amount, g_inverse maps a risky reserve in
    (0, g(alpha)] back to the rightmost matching price, psi is the trading
    function over (numeraire, risky) reserves.  support_cap is the price at
    and beyond which the payoff stops moving (math.inf when it never does);
    the formulas stay valid only while the interval reaches it.
    """

    g: Callable[[float], float]
    g_inverse: Callable[[float], float]
    psi: Callable[[float, float], float]
    support_cap: float


def _cash_or_nothing_forms(p0: float) -> CatalogClosedForms:
    def g(p):
        return 1.0 / p0 if p <= p0 else 0.0

    def g_inv(x):
        return p0 if x > 0.0 else math.inf

    def psi(r1, r2):
        return r1 + p0 * r2 - 1.0

    return CatalogClosedForms(g, g_inv, psi, support_cap=p0)


def _capped_call_forms(p0: float, p1: float) -> CatalogClosedForms:
    g_max = math.log(p1 / p0)

    def g(p):
        if p <= p0:
            return g_max
        if p <= p1:
            return math.log(p1 / p)
        return 0.0

    def g_inv(x):
        return p1 * math.exp(-x)

    def psi(r1, r2):
        return r1 + p0 - p1 * math.exp(-r2)

    return CatalogClosedForms(g, g_inv, psi, support_cap=p1)


def _bs_binary_forms(strike: float, sigma: float, tau: float) -> CatalogClosedForms:
    vol = sigma * math.sqrt(tau)

    def d(p):
        if p <= 0.0:
            return -math.inf
        if vol == 0.0:
            return math.inf if p > strike else -math.inf
        return (math.log(p / strike) - 0.5 * vol * vol) / vol

    def g(p):
        # Survival form Phi(-x) rather than 1 - Phi(x): no cancellation in
        # the deep tail.
        return norm_cdf(-(d(p) + vol)) / strike

    def g_inv(x):
        return strike * math.exp(vol * norm_inv(1.0 - strike * x) - 0.5 * vol * vol)

    def psi(r1, r2):
        return r1 - norm_cdf(norm_inv(1.0 - strike * r2) - vol)

    return CatalogClosedForms(g, g_inv, psi, support_cap=math.inf)


def _logarithmic_forms(p0: float) -> CatalogClosedForms:
    def g(p):
        return 1.0 / p0 if p < p0 else 1.0 / p

    def g_inv(x):
        return 1.0 / x if x > 0.0 else math.inf

    def psi(r1, r2):
        return r1 + math.log(p0 * r2)

    return CatalogClosedForms(g, g_inv, psi, support_cap=math.inf)


def _capped_power_forms(p0: float, p1: float, a: float) -> CatalogClosedForms:
    if a == 1.0:
        return _capped_call_forms(p0, p1)
    coef = a / (a - 1.0)
    p1_pow = p1 ** (a - 1.0) if math.isfinite(p1) else (0.0 if a < 1.0 else math.inf)

    def g(p):
        if p < p0:
            p = p0
        if p >= p1:
            return 0.0
        if p == 0.0 and a < 1.0:
            return math.inf  # p0 = 0 with a sublinear start: divergent at 0
        return coef * (p1_pow - p ** (a - 1.0))

    def g_inv(x):
        base = p1_pow + (1.0 - a) / a * x
        if a < 1.0:
            if base <= 0.0:
                return math.inf  # x = 0 on an uncapped sublinear tail
            return base ** (1.0 / (a - 1.0))
        # a > 1: the exponent is positive, so the base hitting 0 means the
        # price hit 0; clamp float noise below it.
        return max(base, 0.0) ** (1.0 / (a - 1.0))

    def psi(r1, r2):
        base = p1_pow + (1.0 - a) / a * r2
        if a > 1.0:
            base = max(base, 0.0)
        return r1 + p0**a - base ** (a / (a - 1.0))

    return CatalogClosedForms(g, g_inv, psi, support_cap=p1)


def _constant_proportion_forms(w: float, c: float) -> CatalogClosedForms:
    coef = c * w / (1.0 - w)

    def g(p):
        if p == 0.0:
            return math.inf
        return coef * p ** (w - 1.0)

    def g_inv(x):
        if x <= 0.0:
            return math.inf
        return ((1.0 - w) * x / (w * c)) ** (-1.0 / (1.0 - w))

    def psi(r1, r2):
        return r1 - c * ((1.0 - w) * r2 / (w * c)) ** (-w / (1.0 - w))

    return CatalogClosedForms(g, g_inv, psi, support_cap=math.inf)


def catalog_closed_forms(params: CatalogParams) -> Optional[CatalogClosedForms]:
    """Closed forms for a catalog family, or None for degenerate parameters."""
    if isinstance(params, CashOrNothing):
        return _cash_or_nothing_forms(params.p0)
    if isinstance(params, CappedCall):
        if params.p0 == params.p1 or not math.isfinite(params.p1):
            return None
        return _capped_call_forms(params.p0, params.p1)
    if isinstance(params, BlackScholesBinary):
        if params.strike == 0.0:
            return None
        if params.sigma == 0.0:
            return _cash_or_nothing_forms(params.strike)
        return _bs_binary_forms(params.strike, params.sigma, params.tau)
    if isinstance(params, Logarithmic):
        return _logarithmic_forms(params.p0)
    if isinstance(params, CappedPower):
        if params.p0 == params.p1:
            return None
        if params.a >= 1.0 and not math.isfinite(params.p1):
            return None
        return _capped_power_forms(params.p0, params.p1, params.a)
    if isinstance(params, ConstantProportion):
        if params.c == 0.0:
            return None
        return _constant_proportion_forms(params.w, params.c)
    return None


def constant_product_level(params: ConstantProportion) -> float:
    """Level k with r1**(1-w) * r2**w == k on the constant-proportion curve."""
    return params.c * (params.w / (1.0 - params.w)) ** params.w


# ---------------------------------------------------------------------------
# Piecewise-linear payoffs
# ---------------------------------------------------------------------------

def make_piecewise_payoff(points, jumps=(), interval=None) -> PayoffSpec:
    """Monotone piecewise-linear payoff from (price, value) points.

    Between consecutive points the payoff interpolates linearly; it is
    constant below the first and above the last.  A jump at a point price
    lifts the function immediately above that price by the jump size.  The
    default interval is the table's price range.
    """
    pts = [(float(p), float(v)) for p, v in points]
    if not pts:
        raise InvalidParameterError("piecewise payoff needs at least one point")
    for (pa, _), (pb, _) in zip(pts, pts[1:]):
        if not pa < pb:
            raise InvalidParameterError("piecewise point prices must be strictly increasing")
    if pts[0][0] < 0.0:
        raise InvalidParameterError("piecewise point prices must be >= 0")
    if pts[0][1] < 0.0:
        raise MonotonicityError(f"payoff value {pts[0][1]} at {pts[0][0]} is negative")

    jump_map = {}
    for q, size in jumps:
        q, size = float(q), float(size)
        if size < 0.0:
            raise InvalidParameterError(f"jump size at {q} must be >= 0")
        if all(q != p for p, _ in pts):
            raise InvalidParameterError(f"jump location {q} must be one of the table prices")
        if size > 0.0:
            jump_map[q] = jump_map.get(q, 0.0) + size

    segs = []
    if pts[0][0] > 0.0:
        segs.append(Segment(0.0, pts[0][0], ConstantForm(pts[0][1])))
    for (pa, va), (pb, vb) in zip(pts, pts[1:]):
        start = va + jump_map.get(pa, 0.0)
        if vb < start:
            raise MonotonicityError(
                f"payoff decreases from {start} at {pa} to {vb} at {pb}")
        segs.append(Segment(pa, pb, LinearForm(pa, start, (vb - start) / (pb - pa))))
    top = pts[-1][1] + jump_map.get(pts[-1][0], 0.0)
    segs.append(Segment(pts[-1][0], math.inf, ConstantForm(top)))

    if interval is None:
        lo, hi = pts[0][0], pts[-1][0]
        interval = PriceInterval(lo, hi if hi > lo else math.inf)
    for q in jump_map:
        if not (interval.alpha <= q < interval.beta):
            raise InvalidParameterError(
                f"jump at {q} lies outside [alpha, beta) = [{interval.alpha}, {interval.beta})")
    jump_list = tuple(sorted(jump_map.items()))
    return PayoffSpec(segments=tuple(segs), jumps=jump_list, interval=interval)


def piecewise_exact_g(spec: PayoffSpec) -> Callable[[float], float]:
    """Exact replication cost for piecewise-linear payoffs.

    Each linear segment of slope s on [lo, hi] contributes
    s * log(min(hi, beta) / max(p, lo)), and each jump at q in [p, beta)
    contributes size / q.
    """
    beta = spec.interval.beta
    pieces = [(s.lo, s.hi, s.form.m) for s in spec.segments
              if isinstance(s.form, LinearForm) and s.form.m > 0.0]

    def g(p: float) -> float:
        total = 0.0
        for lo, hi, slope in pieces:
            top = min(hi, beta)
            bottom = max(p, lo)
            if top > bottom:
                total += slope * math.log(top / bottom)
        for q, size in spec.jumps:
            if p <= q < beta:
                total += size / q
        return total

    return g


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

_PARAM_FIELDS = {
    "cash_or_nothing": (CashOrNothing, {"p0": "p0"}),
    "capped_call": (CappedCall, {"p0": "p0", "p1": "p1"}),
    "black_scholes_binary": (BlackScholesBinary,
                             {"K": "strike", "strike": "strike",
                              "sigma": "sigma", "tau": "tau"}),
    "logarithmic": (Logarithmic, {"p0": "p0"}),
    "capped_power": (CappedPower, {"p0": "p0", "p1": "p1", "a": "a"}),
    "constant_proportion": (ConstantProportion, {"w": "w", "C": "c", "c": "c"}),
}

_CANONICAL_KEYS = {
    "cash_or_nothing": {"p0": "p0"},
    "capped_call": {"p0": "p0", "p1": "p1"},
    "black_scholes_binary": {"strike": "K", "sigma": "sigma", "tau": "tau"},
    "logarithmic": {"p0": "p0"},
    "capped_power": {"p0": "p0", "p1": "p1", "a": "a"},
    "constant_proportion": {"w": "w", "c": "C"},
}


def _parse_number(value, what: str) -> float:
    if value == "inf":
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PayoffParseError(f"{what} must be a number or \"inf\", got {value!r}")
    return float(value)


def _pairs(rows, what: str):
    if not isinstance(rows, list):
        raise PayoffParseError(f'"{what}" must be a list of [price, value] pairs')
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise PayoffParseError(f'every "{what}" entry must be a pair, got {row!r}')
    return rows


def catalog_params_from_mapping(name: str, raw: dict) -> CatalogParams:
    """Build catalog params from string-keyed values (JSON or CLI)."""
    if name not in _PARAM_FIELDS:
        known = ", ".join(sorted(_PARAM_FIELDS))
        raise PayoffParseError(f"unknown catalog payoff {name!r}; known: {known}")
    cls, aliases = _PARAM_FIELDS[name]
    kwargs = {}
    for key, value in raw.items():
        if key not in aliases:
            raise PayoffParseError(f"unknown parameter {key!r} for catalog payoff {name!r}")
        field = aliases[key]
        if field in kwargs:
            raise PayoffParseError(f"parameter {field!r} given twice for {name!r}")
        kwargs[field] = _parse_number(value, f"parameter {key!r}")
    try:
        return cls(**kwargs)
    except TypeError:
        needed = ", ".join(sorted(set(aliases.values())))
        raise PayoffParseError(f"catalog payoff {name!r} needs parameters: {needed}") from None


def parse_payoff_document(doc: dict) -> PayoffSpec:
    """Build a payoff from an already-decoded JSON document."""
    if not isinstance(doc, dict):
        raise PayoffParseError("payoff document must be a JSON object")
    has_alpha = "alpha" in doc
    has_beta = "beta" in doc
    alpha = _parse_number(doc["alpha"], "alpha") if has_alpha else None
    beta = _parse_number(doc["beta"], "beta") if has_beta else None

    if "catalog" in doc:
        name = doc["catalog"]
        raw = {k: v for k, v in doc.items() if k not in ("catalog", "alpha", "beta")}
        params = catalog_params_from_mapping(name, raw)
        base = natural_interval(params)
        interval = PriceInterval(alpha if has_alpha else base.alpha,
                                 beta if has_beta else base.beta)
        return make_catalog_payoff(params, interval)

    if "piecewise" in doc:
        body = doc["piecewise"]
        if not isinstance(body, dict) or "points" not in body:
            raise PayoffParseError('"piecewise" must be an object with a "points" list')
        extra = set(doc) - {"piecewise", "alpha", "beta"}
        if extra:
            raise PayoffParseError(f"unexpected top-level keys: {sorted(extra)}")
        points = [(_parse_number(p, "point price"), _parse_number(v, "point value"))
                  for p, v in _pairs(body.get("points", []), "points")]
        jumps = [(_parse_number(q, "jump location"), _parse_number(s, "jump size"))
                 for q, s in _pairs(body.get("jumps", []), "jumps")]
        interval = None
        if has_alpha or has_beta:
            if not points:
                raise PayoffParseError("piecewise payoff needs at least one point")
            interval = PriceInterval(alpha if has_alpha else points[0][0],
                                     beta if has_beta else points[-1][0])
        return make_piecewise_payoff(points, jumps, interval)

    raise PayoffParseError('payoff document needs a "catalog" or "piecewise" key')


def parse_payoff_file(text: str) -> PayoffSpec:
    """Parse a payoff JSON document; see the README for the format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PayoffParseError(exc.msg, line=exc.lineno) from None
    return parse_payoff_document(doc)


def serialize_payoff(spec: PayoffSpec) -> str:
    """Render a payoff back to its JSON document (round-trips with parse)."""
    def num(x):
        return "inf" if math.isinf(x) else x

    if spec.catalog is not None:
        name = catalog_name(spec.catalog)
        doc = {"catalog": name}
        for field, key in _CANONICAL_KEYS[name].items():
            doc[key] = num(getattr(spec.catalog, field))
        doc["alpha"] = num(spec.interval.alpha)
        doc["beta"] = num(spec.interval.beta)
        return json.dumps(doc)

    prices = [s.lo for s in spec.segments[1:]]
    if not isinstance(spec.segments[0].form, ConstantForm):
        prices = [spec.segments[0].lo] + prices
    if not prices:
        prices = [0.0]
    points = [[p, spec.value(p)] for p in prices]
    doc = {"piecewise": {"points": points, "jumps": [[q, s] for q, s in spec.jumps]},
           "alpha": num(spec.interval.alpha), "beta": num(spec.interval.beta)}
    return json.dumps(doc)
