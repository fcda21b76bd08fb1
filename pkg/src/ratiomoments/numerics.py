"""Shared numerical kernels: gamma-family special functions, adaptive
semi-infinite quadrature, and monotone root bracketing.

Everything here is pure and reentrant; no module-level mutable state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy import optimize, special

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "BracketError",
    "SlowVaryModel",
    "log_gamma",
    "beta_fn",
    "upper_incomplete_gamma",
    "integrate_semi_infinite",
    "find_root_monotone",
]


class QuadratureError(RuntimeError):
    """Subdivision budget exhausted; carries the partial result."""

    def __init__(self, message, value, err_est):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class BracketError(RuntimeError):
    """Geometric bracket expansion failed to enclose the target."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for the adaptive integrator.

    ``tail_cutoff_factor`` scales the relative threshold below which a
    whole geometric tail panel is considered negligible.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    tail_cutoff_factor: float = 1.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if not self.tail_cutoff_factor > 0:
            raise ValueError("tail_cutoff_factor must be positive")


_SV_KINDS = ("constant", "log_power", "piecewise_from_tail")
_SV_LIMITS = ("vanishes", "converges", "diverges")


@dataclass(frozen=True)
class SlowVaryModel:
    """A slowly varying factor from a small closed catalog.

    ``constant``   : C for all x.
    ``log_power``  : C * (log x)^exponent for x >= e, continued by C below.
    ``piecewise_from_tail`` : defined by the owning distribution as
    x^alpha * (1 - F(x)); carries only its limit class here.
    """

    kind: str
    c: float = 1.0
    exponent: float = 0.0
    limit_class: str = field(default="")

    def __post_init__(self):
        if self.kind not in _SV_KINDS:
            raise ValueError(f"unknown slowly varying kind {self.kind!r}")
        if not self.c > 0:
            raise ValueError("scale c must be positive")
        if not self.limit_class:
            object.__setattr__(self, "limit_class", self._derived_limit())
        if self.limit_class not in _SV_LIMITS:
            raise ValueError(f"unknown limit class {self.limit_class!r}")
        if self.kind != "piecewise_from_tail" and self.limit_class != self._derived_limit():
            raise ValueError(
                f"limit class {self.limit_class!r} inconsistent with kind {self.kind!r}"
            )

    def _derived_limit(self):
        if self.kind == "constant":
            return "converges"
        if self.kind == "log_power":
            if self.exponent > 0:
                return "diverges"
            if self.exponent < 0:
                return "vanishes"
            return "converges"
        raise ValueError("piecewise_from_tail requires an explicit limit_class")

    @property
    def limit_constant(self) -> float:
        """The limit C when the factor converges."""
        if self.limit_class != "converges":
            raise ValueError("limit constant only defined for a converging factor")
        return self.c

    def __call__(self, x: float) -> float:
        if self.kind == "constant":
            return self.c
        if self.kind == "log_power":
            return self.c * max(math.log(x), 1.0) ** self.exponent
        raise ValueError("piecewise_from_tail has no standalone evaluation")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(special.gammaln(x))


def beta_fn(a: float, b: float) -> float:
    """Beta function B(a, b) for positive arguments."""
    if not (a > 0 and b > 0):
        raise ValueError(f"beta_fn requires positive arguments, got ({a}, {b})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma integral of u^(s-1) e^(-u) over (x, inf).

    Supports any real shape s.  Nonpositive shapes are reduced to a
    positive-shape (or exponential-integral) anchor via the downward
    recurrence ``G(s, x) = (G(s+1, x) - x^s e^(-x)) / s``.  Saturates to
    +/-inf with a warning when intermediates overflow.
    """
    if x < 0:
        raise ValueError(f"upper_incomplete_gamma requires x >= 0, got {x}")
    if x == 0:
        if s > 0:
            return math.exp(log_gamma(s))
        raise ValueError("x = 0 only admissible for positive shape")
    if s > 0:
        try:
            value = math.exp(log_gamma(s)) * float(special.gammaincc(s, x))
        except OverflowError:
            value = math.inf
        if math.isinf(value):
            warnings.warn(
                f"upper_incomplete_gamma overflow at (s={s}, x={x}); saturating",
                RuntimeWarning,
            )
        return value

    emx = math.exp(-x)
    if s == math.floor(s):
        # Integer chain anchored at the exponential integral G(0, x).
        g = float(special.exp1(x))
        sj = 0.0
        steps = int(-s)
    else:
        frac = s - math.floor(s)  # in (0, 1)
        g = math.exp(log_gamma(frac)) * float(special.gammaincc(frac, x))
        sj = frac
        steps = int(round(frac - s))
    for _ in range(steps):
        sj -= 1.0
        try:
            power = x**sj
        except OverflowError:
            power = math.inf
        g = (g - power * emx) / sj
        if math.isinf(g) or math.isnan(g):
            warnings.warn(
                f"upper_incomplete_gamma overflow at (s={s}, x={x}); saturating",
                RuntimeWarning,
            )
            return math.inf if g != g or g > 0 else -math.inf
    return g


# 15-point Kronrod nodes (positive half, descending) with embedded 7-point
# Gauss rule on the odd-indexed nodes.  Standard published abscissae.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gauss_kronrod(f, lo, hi):
    """One G7/K15 evaluation on [lo, hi]; returns (kronrod, |kronrod-gauss|)."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(center)
    kron = _WGK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        fa = f(center - half * _XGK[i])
        fb = f(center + half * _XGK[i])
        kron += _WGK[i] * (fa + fb)
        if i % 2 == 1:
            gauss += _WG[i // 2] * (fa + fb)
    kron *= half
    gauss *= half
    return kron, abs(kron - gauss)


def _adaptive_interval(f, lo, hi, tol, budget):
    """Adaptive bisection with an embedded-rule error estimate.

    ``budget`` is a single-element list holding the remaining subdivision
    count, shared across panels of one integral.
    """
    value = 0.0
    err = 0.0
    stack = [(lo, hi, tol)]
    while stack:
        a, b, t = stack.pop()
        kron, e = _gauss_kronrod(f, a, b)
        if e <= max(t, 1e-16 * abs(kron)) or (b - a) <= 1e-15 * max(abs(a), abs(b), 1.0):
            value += kron
            err += e
            continue
        if budget[0] <= 0:
            raise QuadratureError(
                "max_subdivisions exceeded", value + kron, err + e
            )
        budget[0] -= 1
        mid = 0.5 * (a + b)
        stack.append((a, mid, 0.5 * t))
        stack.append((mid, b, 0.5 * t))
    return value, err


def integrate_semi_infinite(f, a, cfg=None, *, scale=1.0):
    """Integrate f over (a, inf) for a finite, eventually decaying integrand.

    The half line is covered by geometrically growing panels of base width
    ``scale`` (uniform in log(1 + (x - a)/scale)), each refined by adaptive
    Gauss-Kronrod bisection.  The tail is truncated once two consecutive
    panels contribute less than ``tail_cutoff_factor * rel_tol`` of the
    accumulated value.  Returns ``(value, err_est)`` with ``err_est`` the
    panel error sum plus the truncation allowance.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    if a < 0:
        raise ValueError(f"lower bound must be nonnegative, got {a}")
    if not scale > 0:
        raise ValueError("scale must be positive")

    budget = [cfg.max_subdivisions]
    total = 0.0
    err = 0.0
    small_run = 0
    lo = a
    width = scale
    last = 0.0
    for _ in range(cfg.max_subdivisions):
        hi = lo + width
        tol = max(cfg.abs_tol, 0.1 * cfg.rel_tol * max(abs(total), 1e-300))
        try:
            val, e = _adaptive_interval(f, lo, hi, tol, budget)
        except QuadratureError as exc:
            raise QuadratureError(str(exc), total + exc.value, err + exc.err_est)
        total += val
        err += e
        last = abs(val)
        threshold = max(
            cfg.abs_tol, cfg.tail_cutoff_factor * cfg.rel_tol * abs(total)
        )
        if last < threshold:
            small_run += 1
            if small_run >= 2:
                return total, err + last
        else:
            small_run = 0
        lo = hi
        width *= 2.0
        if lo > 1e300:
            return total, err + last
    raise QuadratureError("max_subdivisions exceeded", total, err + last)


def find_root_monotone(g, target, bracket_seed):
    """Solve g(x) = target for strictly monotone g on (0, inf).

    The bracket is grown geometrically from ``bracket_seed`` (at most 200
    doublings each way) before handing off to Brent's method.  The result
    satisfies |g(x) - target| <= 1e-10 * max(1, |target|).
    """
    if not bracket_seed > 0:
        raise ValueError("bracket_seed must be positive")

    lo = hi = float(bracket_seed)
    glo = ghi = g(lo)
    increasing = None
    for _ in range(200):
        if glo <= target <= ghi or ghi <= target <= glo:
            break
        if increasing is None:
            probe = g(2.0 * hi)
            increasing = probe >= ghi
        if (target > ghi) == increasing:
            hi *= 2.0
            ghi = g(hi)
        else:
            lo *= 0.5
            glo = g(lo)
    else:
        raise BracketError(
            f"no bracket for target {target} after 200 doublings from {bracket_seed}"
        )

    if lo == hi:
        root = lo
    else:
        root = optimize.brentq(
            lambda x: g(x) - target, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200
        )
    residual = abs(g(root) - target)
    if residual > 1e-10 * max(1.0, abs(target)):
        raise BracketError(
            f"root residual {residual} exceeds tolerance at x={root}"
        )
    return root
