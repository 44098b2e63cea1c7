"""Deterministic numerical kernels: quadrature, Gaussian tail, root finding."""

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._validation import check_finite, check_probability
from .exceptions import BracketError, ConvergenceError, DomainError, NumericalError

_GAUSS_ORDER = 10
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_GAUSS_ORDER)


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-10
    absolute_tolerance: float = 1e-14
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def _gauss_panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    values = np.fromiter((f(mid + half * t) for t in _NODES), dtype=float, count=_GAUSS_ORDER)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"integrand is not finite on [{a}, {b}]")
    return half * float(np.dot(_WEIGHTS, values))


def _panel(f, a, b):
    whole = _gauss_panel(f, a, b)
    m = 0.5 * (a + b)
    left, right = _gauss_panel(f, a, m), _gauss_panel(f, m, b)
    return left + right, abs(left + right - whole)


def integrate(f, lo, hi, spec=None):
    """Adaptive Gauss-Legendre quadrature of a scalar function on ``[lo, hi]``.

    Each panel is estimated with a 10-point rule and with the same rule on its
    two halves; the discrepancy is the panel's error estimate. The panel with
    the largest error is bisected until the summed error estimate is at most
    ``max(absolute_tolerance, relative_tolerance * |I|)``.

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``spec.max_subdivisions`` bisections.
    """
    spec = spec or QuadratureSpec()
    lo, hi = check_finite(lo, "lo"), check_finite(hi, "hi")
    if lo > hi:
        raise DomainError(f"integration requires lo <= hi, got [{lo}, {hi}]")
    if lo == hi:
        return 0.0

    value, err = _panel(f, lo, hi)
    # max-heap on error via negated keys
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.absolute_tolerance, spec.relative_tolerance * abs(total)):
            return total
        neg_err, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            break
        v1, e1 = _panel(f, a, m)
        v2, e2 = _panel(f, m, b)
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
    # recompute sums from scratch to drop accumulated rounding before the final check
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    if total_err <= max(spec.absolute_tolerance, spec.relative_tolerance * abs(total)):
        return total
    raise ConvergenceError(
        f"quadrature did not converge in {spec.max_subdivisions} subdivisions "
        f"(estimate {total!r}, error {total_err!r})",
        best=total,
    )


def q_function(x):
    """Standard normal upper tail probability ``Q(x) = P(Z > x)``."""
    return 0.5 * math.erfc(check_finite(x, "x") / math.sqrt(2.0))


def q_inverse(eps):
    """Invert :func:`q_function` by bisection.

    Bisection runs until the bracket can no longer be split in floating point,
    so the result is the float closest to the true inverse up to one ulp.
    """
    eps = check_probability(eps, "eps", open_low=True, open_high=True)
    if eps == 0.5:
        return 0.0
    # Q(-40) rounds to 1 and Q(40) underflows to 0, so every eps in (0, 1) is inside
    lo, hi = -40.0, 40.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if q_function(mid) > eps:
            lo = mid
        else:
            hi = mid
    # pick whichever endpoint reproduces eps better
    if abs(q_function(lo) - eps) <= abs(q_function(hi) - eps):
        return lo
    return hi


def find_root(f, bracket, tol=1e-12, maxiter=500):
    """Root of ``f`` on ``bracket`` using Brent's method.

    The returned ``x`` satisfies ``|f(x)| <= tol`` or the final bracket width
    is at most ``tol * |x|``.
    """
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise BracketError("objective is not finite at the bracket endpoints")
    if flo == 0:
        return float(bracket.lo)
    if fhi == 0:
        return float(bracket.hi)
    if flo * fhi > 0:
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: f = ({flo}, {fhi})"
        )
    rtol = max(tol, 4 * np.finfo(float).eps)
    root, info = brentq(
        f, bracket.lo, bracket.hi, xtol=1e-300, rtol=rtol,
        maxiter=maxiter, full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(f"root finding stopped: {info.flag}", best=root)
    return float(root)
