"""Command-line front end.

Subcommands: replicate (tabulate p, f, g, V), trading-function (tabulate
the invariant over risky reserves), simulate (Monte Carlo arbitrage
earnings), verify (invariant checks), catalog (list payoff families).
Tables are CSV with 17-significant-digit numbers, so values round-trip.

Exit codes: 0 success, 1 validation or verification failure, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from typing import Optional

from .cfmm import TradingFunction, trading_function_eval, trading_function_infimum
from .checks import run_verification, sample_price_range
from .errors import (
    CfmmRepError,
    PayoffParseError,
    UnboundedTradingFunctionError,
)
from .payoffs import (
    Logarithmic,
    PayoffSpec,
    PriceInterval,
    catalog_params_from_mapping,
    make_catalog_payoff,
    natural_interval,
    parse_payoff_file,
)
from .replication import ReplicationProfile, g_inverse
from .simulate import GbmParams, monte_carlo_reports

_CATALOG_HELP = (
    ("cash_or_nothing", "p0",
     "pays 1 above p0, 0 at or below; needs p0 > 0",
     "g, g_inverse, trading function (linear market maker)"),
    ("capped_call", "p0, p1",
     "pays p - p0 between p0 and p1, capped; needs 0 < p0 <= p1 < inf",
     "g, g_inverse, trading function"),
    ("black_scholes_binary", "K, sigma, tau",
     "binary call under a lognormal model; needs K >= 0, sigma >= 0, tau > 0",
     "g, g_inverse, trading function (via the normal CDF)"),
    ("logarithmic", "p0",
     "pays log(p/p0) above p0; needs p0 > 0",
     "g, g_inverse, trading function"),
    ("capped_power", "p0, p1, a",
     "pays p**a - p0**a between p0 and p1, capped; needs 0 <= p0 <= p1, a > 0; "
     "p1 must be finite when a >= 1 or the replication cost diverges",
     "g, g_inverse, trading function"),
    ("constant_proportion", "w, C",
     "holds fixed value shares: f(p) = C * p**w; needs 0 < w < 1, C >= 0",
     "g, g_inverse, trading function (constant product/mean form)"),
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    payoff_source: Optional[str] = None
    params: tuple = ()
    alpha: Optional[float] = None
    beta: Optional[float] = None
    grid: int = 50
    out: Optional[str] = None
    sigma: float = 0.5
    horizon: float = 1.0
    steps: int = 1000
    paths: int = 1000
    seed: int = 7
    p_start: float = 1.0
    check_infimum: bool = False
    catalog_entry: Optional[str] = None


def _parse_bound(text: str) -> float:
    if text == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise PayoffParseError(f"expected a number or 'inf', got {text!r}") from None


def load_payoff(cfg: RunConfig) -> PayoffSpec:
    """Resolve --payoff (file path or catalog:NAME plus --param) to a spec."""
    if cfg.payoff_source is None:
        raise PayoffParseError("--payoff is required")
    if cfg.payoff_source.startswith("catalog:"):
        name = cfg.payoff_source[len("catalog:"):]
        raw = {}
        for item in cfg.params:
            if "=" not in item:
                raise PayoffParseError(f"--param expects key=value, got {item!r}")
            key, value = item.split("=", 1)
            raw[key] = _parse_bound(value)
        params = catalog_params_from_mapping(name, raw)
        base = natural_interval(params)
        interval = PriceInterval(cfg.alpha if cfg.alpha is not None else base.alpha,
                                 cfg.beta if cfg.beta is not None else base.beta)
        return make_catalog_payoff(params, interval)

    if cfg.params:
        raise PayoffParseError("--param only applies to catalog payoffs")
    with open(cfg.payoff_source, "r", encoding="utf-8") as handle:
        spec = parse_payoff_file(handle.read())
    if cfg.alpha is not None or cfg.beta is not None:
        interval = PriceInterval(
            cfg.alpha if cfg.alpha is not None else spec.interval.alpha,
            cfg.beta if cfg.beta is not None else spec.interval.beta)
        if spec.catalog is not None:
            spec = make_catalog_payoff(spec.catalog, interval)
        else:
            spec = PayoffSpec(spec.segments, spec.jumps, interval)
    return spec


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write(cfg: RunConfig, lines) -> None:
    text = "".join(line + "\n" for line in lines)
    if cfg.out is None or cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _price_grid(profile: ReplicationProfile, n: int):
    """Log-spaced prices: from alpha when positive, else from the first
    breakpoint; capped at beta or a 100x span."""
    alpha, beta = profile.interval.alpha, profile.interval.beta
    bps = [b for b in profile.payoff.breakpoints if b > 0.0]
    if profile.interval.bounded:
        hi = beta
    else:
        hi = max(max(bps, default=1.0), alpha, 1.0) * 100.0
    lo = alpha if alpha > 0.0 else (min(bps) if bps else hi / 100.0)
    if not lo < hi:
        lo = hi / 100.0
    step = (math.log(hi) - math.log(lo)) / (n - 1)
    return [math.exp(math.log(lo) + i * step) for i in range(n)]


def cmd_replicate(cfg: RunConfig) -> int:
    profile = ReplicationProfile(load_payoff(cfg))
    lines = ["p,f,g,V"]
    for p in _price_grid(profile, cfg.grid):
        f = profile.payoff.value(p)
        g = profile.g(p)
        lines.append(f"{_fmt(p)},{_fmt(f)},{_fmt(g)},{_fmt(f + p * g)}")
    _write(cfg, lines)
    return 0


def cmd_trading_function(cfg: RunConfig) -> int:
    profile = ReplicationProfile(load_payoff(cfg))
    tf = TradingFunction(profile)
    r2_hi = profile.g_alpha
    if math.isinf(r2_hi):
        lo, _ = sample_price_range(profile)
        r2_hi = profile.g(lo)
        print(f"warning: risky reserve range is unbounded; tabulating up to "
              f"g({_fmt(lo)}) = {_fmt(r2_hi)}", file=sys.stderr)
    header = "r2,g_inv,psi_at_zero_r1" + (",psi_inf" if cfg.check_infimum else "")
    lines = [header]
    mismatch = False
    for i in range(cfg.grid):
        r2 = r2_hi * i / (cfg.grid - 1)
        try:
            psi = trading_function_eval(tf, 0.0, r2)
        except (UnboundedTradingFunctionError, CfmmRepError) as exc:
            print(f"warning: skipping r2={_fmt(r2)}: {exc}", file=sys.stderr)
            continue
        row = f"{_fmt(r2)},{_fmt(g_inverse(profile, r2))},{_fmt(psi)}"
        if cfg.check_infimum:
            psi_inf = trading_function_infimum(tf, 0.0, r2, 512)
            row += f",{_fmt(psi_inf)}"
            if abs(psi - psi_inf) > 1e-6 * max(1.0, abs(psi), abs(psi_inf)):
                mismatch = True
                print(f"mismatch at r2={_fmt(r2)}: psi={psi!r} inf={psi_inf!r}",
                      file=sys.stderr)
        lines.append(row)
    _write(cfg, lines)
    return 1 if mismatch else 0


def cmd_simulate(cfg: RunConfig) -> int:
    payoff = load_payoff(cfg)
    profile = ReplicationProfile(payoff)
    params = GbmParams(p_start=cfg.p_start, sigma=cfg.sigma, horizon=cfg.horizon,
                       steps=cfg.steps, seed=cfg.seed)
    reports = monte_carlo_reports(profile, params, cfg.paths)
    lines = ["path_id,w,payoff_term,path_term"]
    for i, rep in enumerate(reports):
        lines.append(f"{i},{_fmt(rep.total_w)},{_fmt(rep.payoff_term)},"
                     f"{_fmt(rep.path_term)}")
    _write(cfg, lines)

    totals = [r.total_w for r in reports]
    mean = math.fsum(totals) / len(totals)
    if len(totals) > 1:
        var = math.fsum((w - mean) ** 2 for w in totals) / (len(totals) - 1)
        stderr = math.sqrt(var / len(totals))
    else:
        stderr = 0.0
    theory = ""
    if isinstance(payoff.catalog, Logarithmic):
        theory = _fmt(0.5 * cfg.sigma * cfg.sigma * cfg.horizon)
    print(f"{_fmt(mean)},{_fmt(stderr)},{theory}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    profile = ReplicationProfile(load_payoff(cfg))
    results = run_verification(profile, seed=cfg.seed)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_catalog(cfg: RunConfig) -> int:
    entries = _CATALOG_HELP
    if cfg.catalog_entry is not None:
        name = cfg.catalog_entry.removeprefix("catalog:")
        entries = [e for e in _CATALOG_HELP if e[0] == name]
        if not entries:
            print(f"unknown catalog payoff {name!r}", file=sys.stderr)
            return 2
    for name, params, constraint, closed in entries:
        print(f"{name}")
        print(f"  parameters: {params}")
        print(f"  validity:   {constraint}")
        print(f"  closed forms: {closed}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfmmrep",
        description="Build and probe replicating market makers for monotone payoffs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_payoff_flags(p):
        p.add_argument("--payoff", required=True,
                       help="payoff JSON file, or catalog:NAME with --param")
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="catalog parameter (repeatable)")
        p.add_argument("--alpha", type=_parse_bound, default=None,
                       help="lower price bound override")
        p.add_argument("--beta", type=_parse_bound, default=None,
                       help="upper price bound override (number or 'inf')")

    p = sub.add_parser("replicate", help="tabulate p, f, g, V as CSV")
    add_payoff_flags(p)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--out", default=None)

    p = sub.add_parser("trading-function", help="tabulate the invariant over r2")
    add_payoff_flags(p)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--out", default=None)
    p.add_argument("--check-infimum", action="store_true",
                   help="cross-check against the infimum oracle; exit 1 on mismatch")

    p = sub.add_parser("simulate", help="Monte Carlo arbitrage earnings")
    add_payoff_flags(p)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--p-start", type=float, default=1.0, dest="p_start",
                   help="initial price of the simulated paths")
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run invariant checks against a payoff")
    add_payoff_flags(p)
    p.add_argument("--seed", type=int, default=7)

    p = sub.add_parser("catalog", help="list built-in payoff families")
    p.add_argument("name", nargs="?", default=None,
                   help="show one family in detail")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {}
    for name in ("payoff", "param", "alpha", "beta", "grid", "out", "sigma",
                 "horizon", "steps", "paths", "seed", "p_start",
                 "check_infimum", "name"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    return RunConfig(
        command=args.command,
        payoff_source=fields.get("payoff"),
        params=tuple(fields.get("param", ())),
        alpha=fields.get("alpha"),
        beta=fields.get("beta"),
        grid=fields.get("grid", 50),
        out=fields.get("out"),
        sigma=fields.get("sigma", 0.5),
        horizon=fields.get("horizon", 1.0),
        steps=fields.get("steps", 1000),
        paths=fields.get("paths", 1000),
        seed=fields.get("seed", 7),
        p_start=fields.get("p_start", 1.0),
        check_infimum=fields.get("check_infimum", False),
        catalog_entry=fields.get("name"),
    )


_COMMANDS = {
    "replicate": cmd_replicate,
    "trading-function": cmd_trading_function,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "catalog": cmd_catalog,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    if cfg.command == "replicate" or cfg.command == "trading-function":
        if cfg.grid < 2:
            parser.error("--grid must be at least 2")
    try:
        return _COMMANDS[cfg.command](cfg)
    except PayoffParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CfmmRepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
