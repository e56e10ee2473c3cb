"""Adaptive Simpson quadrature with breakpoint splitting.

Integrands here are nonnegative and smooth between breakpoints, so a
recursive Simpson rule with the classic (S_halves - S_whole)/15 error
estimate is enough.  Non-finite evaluations are treated as 0, which lets
the rule walk into integrable endpoint singularities; power-law endpoint
singularities of known exponent are removed exactly by a u = v**m change
of variable instead (see softened_power_order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import InvalidParameterError


@dataclass(frozen=True)
class QuadratureOptions:
    """Error control for adaptive integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 60

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidParameterError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise InvalidParameterError("max_depth must be at least 1")


DEFAULT_OPTIONS = QuadratureOptions()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    converged: bool


def _safe_eval(f: Callable[[float], float], x: float) -> float:
    v = f(x)
    return v if math.isfinite(v) else 0.0


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    opts: QuadratureOptions = DEFAULT_OPTIONS,
) -> QuadratureResult:
    """Integrate f over [a, b] to the requested tolerance."""
    if a == b:
        return QuadratureResult(0.0, 0.0, True)
    if a > b:
        r = adaptive_simpson(f, b, a, opts)
        return QuadratureResult(-r.value, r.error, r.converged)

    fa = _safe_eval(f, a)
    fb = _safe_eval(f, b)
    m = 0.5 * (a + b)
    fm = _safe_eval(f, m)
    whole = _simpson(fa, fm, fb, b - a)
    tol = max(opts.abs_tol, opts.rel_tol * abs(whole))

    def recurse(lo, hi, flo, fmid, fhi, s, tol, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = _safe_eval(f, lm)
        frm = _safe_eval(f, rm)
        s_left = _simpson(flo, flm, fmid, mid - lo)
        s_right = _simpson(fmid, frm, fhi, hi - mid)
        s2 = s_left + s_right
        delta = (s2 - s) / 15.0
        # Accept on the inherited absolute budget or on accuracy relative to
        # the cell's own mass; the latter keeps the relative error controlled
        # even where the integral is many orders below the absolute floor.
        cell_tol = max(tol, opts.rel_tol * abs(s2))
        if abs(delta) <= cell_tol or depth >= opts.max_depth:
            return s2 + delta, abs(delta), abs(delta) <= cell_tol
        lv, le, lc = recurse(lo, mid, flo, flm, fmid, s_left, 0.5 * tol, depth + 1)
        rv, re, rc = recurse(mid, hi, fmid, frm, fhi, s_right, 0.5 * tol, depth + 1)
        return lv + rv, le + re, lc and rc

    value, error, converged = recurse(a, b, fa, fm, fb, whole, tol, 0)
    return QuadratureResult(value, error, converged)


def integrate_piecewise(
    f: Callable[[float], float],
    a: float,
    b: float,
    cuts,
    opts: QuadratureOptions = DEFAULT_OPTIONS,
) -> QuadratureResult:
    """Integrate over [a, b], pre-splitting at every interior cut point."""
    if a > b:
        r = integrate_piecewise(f, b, a, cuts, opts)
        return QuadratureResult(-r.value, r.error, r.converged)
    points = [a] + sorted(c for c in cuts if a < c < b) + [b]
    total = 0.0
    err = 0.0
    ok = True
    for lo, hi in zip(points, points[1:]):
        r = adaptive_simpson(f, lo, hi, opts)
        total += r.value
        err += r.error
        ok = ok and r.converged
    return QuadratureResult(total, err, ok)


def softened_power_order(exponent: float) -> int:
    """Substitution order m removing a u**(-exponent) singularity at u = 0.

    With u = v**m the transformed integrand scales like v**(m*(1-exponent)-1);
    m is chosen so that power is at least 1 (bounded, with a vanishing
    endpoint value).
    """
    if exponent <= 0.0:
        return 1
    if exponent >= 1.0:
        raise InvalidParameterError(
            f"endpoint exponent {exponent} is not integrable")
    return max(1, math.ceil(2.0 / (1.0 - exponent)))


def integrate_from_zero(
    f: Callable[[float], float],
    upper: float,
    singular_exponent: float = 0.0,
    opts: QuadratureOptions = DEFAULT_OPTIONS,
) -> QuadratureResult:
    """Integrate f over [0, upper] with a possible power singularity at 0.

    singular_exponent s means f(u) ~ u**(-s) near zero, 0 <= s < 1.
    """
    if upper <= 0.0:
        return QuadratureResult(0.0, 0.0, True)
    m = softened_power_order(singular_exponent)
    if m == 1:
        return adaptive_simpson(f, 0.0, upper, opts)

    def transformed(v: float) -> float:
        u = v**m
        if u <= 0.0:
            return 0.0
        return f(u) * m * v ** (m - 1)

    return adaptive_simpson(transformed, 0.0, upper ** (1.0 / m), opts)
