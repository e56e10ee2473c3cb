"""Trading functions and a fee-free pool over a replication profile.

The trading function over reserves (r1 numeraire, r2 risky) is

    psi(r1, r2) = r1 + p* r2 - V(p*),   p* = g_inverse(r2),

the closed form of  inf over p in [alpha, beta] of (r1 + p r2 - V(p)).
Its zero level set is exactly the liquidity-provider curve
{(f(p), g(p))}, psi is nondecreasing in both reserves, and concave.  The
infimum itself is also evaluated directly (grid plus golden-section) as a
numerical cross-check oracle for the closed path.

Pools are immutable values: operations return new states.  Trades are
accepted exactly when they do not decrease the invariant level (fee-free
semantics), and arbitrage jumps straight to the optimal allocation
(f(p_ext), g(p_ext)), which maximizes the arbitrageur's one-shot profit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import (
    DomainError,
    InfiniteReplicationCostError,
    InvalidParameterError,
    InvalidReservesError,
    UnboundedTradingFunctionError,
)
from .replication import ReplicationProfile

_TRADE_TOL = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TradingFunction:
    """The pool invariant induced by a replication profile."""

    profile: ReplicationProfile

    def valid_reserve_range(self):
        """Admissible risky reserve [g(beta), g(alpha)]; the top may be inf."""
        return self.profile.g_beta, self.profile.g_alpha


def _check_reserves(tf: TradingFunction, r1: float, r2: float):
    if r1 < 0.0 or r2 < 0.0 or math.isnan(r1) or math.isnan(r2):
        raise InvalidReservesError(f"reserves must be nonnegative, got ({r1}, {r2})")
    lo, hi = tf.valid_reserve_range()
    if not lo <= r2 <= hi:
        raise InvalidReservesError(
            f"risky reserve {r2} outside the valid range [{lo}, {hi}]")


def _unbounded_at_zero(tf: TradingFunction) -> bool:
    # With no risky reserve the minimizing price runs to beta; the level is
    # -inf exactly when the portfolio value is unbounded there.
    return (not tf.profile.interval.bounded
            and math.isinf(tf.profile.payoff.limit_at_infinity()))


def trading_function_eval(tf: TradingFunction, r1: float, r2: float) -> float:
    """psi(r1, r2) through g_inverse and the portfolio value."""
    _check_reserves(tf, r1, r2)
    if r2 == 0.0 and _unbounded_at_zero(tf):
        raise UnboundedTradingFunctionError(
            "trading function is -inf at zero risky reserve: "
            "the portfolio value is unbounded on this interval")
    if tf.profile.psi_closed_form is not None:
        return tf.profile.psi_closed_form(r1, r2)
    p_star = tf.profile.g_inverse_value(r2)
    if math.isinf(p_star):
        # r2 = 0 here, so p* r2 = 0 by the 0 * inf convention and V takes
        # its limiting value.
        return r1 - tf.profile.payoff.limit_at_infinity()
    value = 0.0 if p_star == 0.0 else p_star * r2
    return r1 + value - tf.profile.portfolio_value(p_star)


def trading_function_infimum(
    tf: TradingFunction,
    r1: float,
    r2: float,
    grid_points: int = 512,
) -> float:
    """inf over prices of r1 + p*r2 - V(p), evaluated directly.

    Log-spaced grid over the interval (truncated where r2 - g(p) turns
    positive when beta is unbounded), then golden-section refinement on the
    bracketing cell.  Used as the independent oracle for
    trading_function_eval.
    """
    if grid_points < 16:
        raise InvalidParameterError(f"grid_points must be >= 16, got {grid_points}")
    if r1 < 0.0 or r2 < 0.0:
        raise InvalidReservesError(f"reserves must be nonnegative, got ({r1}, {r2})")
    profile = tf.profile
    alpha, beta = profile.interval.alpha, profile.interval.beta
    if r2 == 0.0 and _unbounded_at_zero(tf):
        raise UnboundedTradingFunctionError(
            "infimum is -inf: zero risky reserve with unbounded portfolio value")

    def objective(p: float) -> float:
        value = 0.0 if p == 0.0 else p * r2
        return r1 + value - profile.portfolio_value(p)

    if profile.interval.bounded:
        top = beta
    else:
        # Past g_inverse(r2) the integrand r2 - g(p) is positive and the
        # objective only climbs; stop a little beyond the sign change.
        bps = [b for b in profile.payoff.breakpoints if b > 0.0]
        top = max(alpha, max(bps, default=0.0), 1.0)
        if r2 > 0.0:
            while profile.g(top) >= r2 and top < 1e300:
                top *= 2.0
            top *= 2.0
        else:
            top *= 4.0

    lo = alpha if alpha > 0.0 else min(top * 1e-9, min(
        (b for b in profile.payoff.breakpoints if b > 0.0), default=top) * 1e-3)
    candidates = [alpha] if alpha < lo else []
    span = math.log(top) - math.log(lo)
    candidates += [math.exp(math.log(lo) + span * i / (grid_points - 1))
                   for i in range(grid_points)]

    values = [objective(p) for p in candidates]
    limit_value = None
    if not profile.interval.bounded and r2 == 0.0:
        # The objective decreases toward r1 - lim V; no finite grid attains it.
        limit_value = r1 - profile.payoff.limit_at_infinity()
    best = min(range(len(candidates)), key=values.__getitem__)

    # Golden-section on the bracketing cell, in log-price (the objective is
    # unimodal: its slope r2 - g(p) changes sign at most once).
    left = candidates[max(best - 1, 0)]
    right = candidates[min(best + 1, len(candidates) - 1)]
    if left <= 0.0:
        left = min(right * 1e-6, candidates[1] if len(candidates) > 1 else right)
    a, b = math.log(left), math.log(right)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(math.exp(x1)), objective(math.exp(x2))
    while b - a > 1e-12:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(math.exp(x2))

    refined = min(values[best], f1, f2)
    if candidates[0] == 0.0:
        refined = min(refined, values[0])
    if limit_value is not None:
        refined = min(refined, limit_value)
    return refined


# ---------------------------------------------------------------------------
# Pool state machine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoolState:
    """Fee-free pool reserves bound to a trading function.

    price records where the reserves were last minted; spot_price recomputes
    it from the risky reserve through g_inverse.
    """

    tf: TradingFunction
    r1: float
    r2: float
    invariant_level: float
    price: float


@dataclass(frozen=True)
class ArbStepProfit:
    """One arbitrage realignment: profit in numeraire, and the price move."""

    profit: float
    from_price: float
    to_price: float


def pool_init(profile: ReplicationProfile, p: float) -> PoolState:
    """Mint a pool at external price p with the replicating allocation."""
    if not profile.interval.contains(p) or math.isnan(p):
        raise DomainError(
            f"price {p} outside replication interval "
            f"[{profile.interval.alpha}, {profile.interval.beta}]")
    r2 = profile.g(p)
    if math.isinf(r2):
        raise InfiniteReplicationCostError(
            f"replication cost is infinite at price {p}")
    tf = TradingFunction(profile)
    r1 = profile.payoff.value(p)
    return PoolState(tf, r1, r2, trading_function_eval(tf, r1, r2), p)


def validate_trade(pool: PoolState, d1: float, d2: float) -> bool:
    """Accept a reserve change iff it does not lower the invariant level."""
    new_r1 = pool.r1 + d1
    new_r2 = pool.r2 + d2
    _check_reserves(pool.tf, new_r1, new_r2)
    level = trading_function_eval(pool.tf, new_r1, new_r2)
    return level >= pool.invariant_level - _TRADE_TOL * max(1.0, abs(pool.invariant_level))


def arbitrage_to_price(pool: PoolState, p_ext: float):
    """Realign the pool to the external price; returns (new pool, profit).

    The arbitrageur swaps the pool to (f(p_ext), g(p_ext)) and pockets

        profit = p_ext * (r2 - g(p_ext)) + r1 - f(p_ext),

    which is nonnegative because the current allocation was optimal for the
    old price and feasible for the new one.
    """
    profile = pool.tf.profile
    if not profile.interval.contains(p_ext) or math.isnan(p_ext):
        raise DomainError(
            f"external price {p_ext} outside [{profile.interval.alpha}, "
            f"{profile.interval.beta}]; clamp before arbitraging")
    new_r1 = profile.payoff.value(p_ext)
    new_r2 = profile.g(p_ext)
    if math.isinf(new_r2):
        raise InfiniteReplicationCostError(
            f"replication cost is infinite at price {p_ext}")
    profit = p_ext * (pool.r2 - new_r2) + pool.r1 - new_r1
    level = trading_function_eval(pool.tf, new_r1, new_r2)
    new_pool = PoolState(pool.tf, new_r1, new_r2, level, p_ext)
    return new_pool, ArbStepProfit(profit, pool.price, p_ext)


def spot_price(pool: PoolState) -> float:
    """Price implied by the risky reserve: g_inverse(r2).

    On flat stretches of g this is the rightmost consistent price; for a
    fully-drained risky side on an unbounded interval it is math.inf.
    """
    return pool.tf.profile.g_inverse_value(pool.r2)
