"""Replicating market makers for monotone payoffs.

Given a nonnegative, nondecreasing payoff f(p) on a price interval, this
package computes the risky-asset requirement g, the portfolio value V,
the trading function whose zero level set is the liquidity-provider curve
(f(p), g(p)), and simulates arbitrageur earnings against the resulting
fee-free pool.
"""

from .errors import (
    BreakpointDerivativeError,
    CfmmRepError,
    DomainError,
    InfiniteReplicationCostError,
    InvalidParameterError,
    InvalidReservesError,
    MonotonicityError,
    PayoffParseError,
    UnboundedTradingFunctionError,
)
from .payoffs import (
    BlackScholesBinary,
    CappedCall,
    CappedPower,
    CashOrNothing,
    ConstantProportion,
    Logarithmic,
    PayoffSpec,
    PriceInterval,
    constant_product_level,
    eval_payoff,
    eval_payoff_derivative,
    make_catalog_payoff,
    make_piecewise_payoff,
    parse_payoff_file,
    payoff_breakpoints,
    serialize_payoff,
)
from .quadrature import QuadratureOptions
from .replication import (
    GrowthAnalysis,
    GrowthClass,
    ReplicationProfile,
    g_inverse,
    growth_classification,
    portfolio_at,
    portfolio_value,
    portfolio_value_integral,
    replication_cost,
)
from .cfmm import (
    ArbStepProfit,
    PoolState,
    TradingFunction,
    arbitrage_to_price,
    pool_init,
    spot_price,
    trading_function_eval,
    trading_function_infimum,
    validate_trade,
)
from .simulate import (
    EarningsReport,
    GbmParams,
    PricePath,
    gbm_path,
    monte_carlo_earnings,
    monte_carlo_reports,
    run_arbitrage,
)

__version__ = "0.1.0"

__all__ = [
    "ArbStepProfit",
    "BlackScholesBinary",
    "BreakpointDerivativeError",
    "CappedCall",
    "CappedPower",
    "CashOrNothing",
    "CfmmRepError",
    "ConstantProportion",
    "DomainError",
    "EarningsReport",
    "GbmParams",
    "GrowthAnalysis",
    "GrowthClass",
    "InfiniteReplicationCostError",
    "InvalidParameterError",
    "InvalidReservesError",
    "Logarithmic",
    "MonotonicityError",
    "PayoffParseError",
    "PayoffSpec",
    "PoolState",
    "PriceInterval",
    "PricePath",
    "QuadratureOptions",
    "ReplicationProfile",
    "TradingFunction",
    "UnboundedTradingFunctionError",
    "arbitrage_to_price",
    "constant_product_level",
    "eval_payoff",
    "eval_payoff_derivative",
    "g_inverse",
    "gbm_path",
    "growth_classification",
    "make_catalog_payoff",
    "make_piecewise_payoff",
    "monte_carlo_earnings",
    "monte_carlo_reports",
    "parse_payoff_file",
    "payoff_breakpoints",
    "pool_init",
    "portfolio_at",
    "portfolio_value",
    "portfolio_value_integral",
    "replication_cost",
    "run_arbitrage",
    "serialize_payoff",
    "spot_price",
    "trading_function_eval",
    "trading_function_infimum",
    "validate_trade",
]
