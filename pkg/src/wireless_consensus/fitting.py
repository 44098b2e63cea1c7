"""Reliability gain and Gaussian curve fitting.

:class:`GaussianFitter` follows the scikit-learn estimator protocol
(``fit``/``predict``/``score``/``get_params``) so it drops into pipelines and
model-selection utilities; :func:`fit_gaussian` is the functional entry
point used by the CLI.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_xy
from .exceptions import ConvergenceError, DegenerateSeriesError, DomainError

TRANSFORMS = ("log10_of_failure", "log10_of_success")


@dataclass(frozen=True)
class GainSeries:
    """Reliability gain per node count, plus points dropped as out of domain."""

    n: tuple
    gain: tuple
    transform: str = "log10_of_failure"
    dropped: tuple = field(default=())


@dataclass(frozen=True)
class GaussianFit:
    """Parameters of ``a * exp(-((x - b) / c) ** 2)`` and the fit's R^2."""

    a: float
    b: float
    c: float
    r_squared: float
    iterations: int = 0

    def __call__(self, x):
        return gaussian(np.asarray(x, dtype=float), self.a, self.b, self.c)


def gaussian(x, a, b, c):
    return a * np.exp(-(((x - b) / c) ** 2))


def reliability_gain(points, transform="log10_of_failure"):
    """Map ``(n, P)`` pairs to ``(n, log10(1 - P))`` or ``(n, log10(P))``.

    Points whose transformed value would be infinite or undefined are
    dropped and listed in ``GainSeries.dropped`` with a warning.
    """
    if transform not in TRANSFORMS:
        raise DomainError(f"transform must be one of {TRANSFORMS}, got {transform!r}")
    ns, gains, dropped = [], [], []
    for n, p in points:
        p = float(p)
        arg = 1.0 - p if transform == "log10_of_failure" else p
        if not (math.isfinite(p) and 0.0 <= p <= 1.0 and arg > 0.0):
            dropped.append((n, p))
            continue
        ns.append(n)
        gains.append(math.log10(arg))
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} point(s) outside the domain of {transform}: {dropped}",
            RuntimeWarning,
            stacklevel=2,
        )
    return GainSeries(tuple(ns), tuple(gains), transform, tuple(dropped))


def _jacobian(x, a, b, c):
    u = (x - b) / c
    e = np.exp(-(u**2))
    return np.column_stack((e, a * e * 2 * u / c, a * e * 2 * u**2 / c))


def _initial_guess(x, y):
    i = int(np.argmax(np.abs(y)))
    half_range = 0.5 * (x.max() - x.min())
    return np.array([y[i], x[i], half_range if half_range > 0 else 1.0])


def _r_squared(y, fitted):
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


def _levenberg_marquardt(x, y, theta, step_tol, max_iter):
    """Damped Gauss-Newton. The cost never increases: a step is kept only if it lowers it."""
    lam = 1e-3
    resid = y - gaussian(x, *theta)
    cost = float(resid @ resid)
    history = [cost]
    for it in range(1, max_iter + 1):
        J = _jacobian(x, *theta)
        JtJ = J.T @ J
        g = J.T @ resid
        while True:
            A = JtJ + lam * np.diag(np.diag(JtJ) + 1e-300)
            try:
                delta = np.linalg.solve(A, g)
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(A, g, rcond=None)[0]
            candidate = theta + delta
            trial = y - gaussian(x, *candidate)
            trial_cost = float(trial @ trial)
            if np.isfinite(trial_cost) and trial_cost <= cost and candidate[2] != 0:
                theta, resid, cost = candidate, trial, trial_cost
                history.append(cost)
                lam = max(lam / 3.0, 1e-12)
                break
            lam *= 4.0
            if lam > 1e16:
                # no descent direction left at working precision
                return theta, it, history
        if np.linalg.norm(delta) <= step_tol * (np.linalg.norm(theta) + step_tol):
            return theta, it, history
        if cost == 0.0:
            return theta, it, history
    raise ConvergenceError(
        f"Gaussian fit did not converge in {max_iter} iterations",
        best=GaussianFit(
            float(theta[0]), float(theta[1]), abs(float(theta[2])),
            _r_squared(y, gaussian(x, *theta)), max_iter,
        ),
    )


def fit_gaussian_xy(x, y, step_tol=1e-10, max_iter=500):
    x, y = check_xy(x, y)
    if x.size < 4:
        raise DegenerateSeriesError(f"need at least 4 points to fit, got {x.size}")
    if np.all(y == y[0]):
        raise DegenerateSeriesError("all gain values are equal; nothing to fit")
    # sort so the result does not depend on input order
    order = np.lexsort((y, x))
    x, y = x[order], y[order]
    theta, iterations, _ = _levenberg_marquardt(x, y, _initial_guess(x, y), step_tol, max_iter)
    a, b, c = (float(v) for v in theta)
    c = abs(c)
    return GaussianFit(a, b, c, _r_squared(y, gaussian(x, a, b, c)), iterations)


def fit_gaussian(series, **kwargs):
    return fit_gaussian_xy(series.n, series.gain, **kwargs)


class GaussianFitter(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``a * exp(-((x - b) / c) ** 2)`` to one feature.

    Parameters
    ----------
    step_tol : float
        Stop once an accepted step is smaller than this, relative to the
        parameter vector norm.
    max_iter : int
        Iteration cap; exceeding it raises :class:`ConvergenceError`.

    Attributes
    ----------
    amplitude_, center_, width_ : float
        Fitted ``a``, ``b`` and ``c``.
    r_squared_ : float
        Coefficient of determination on the training data.
    """

    def __init__(self, step_tol=1e-10, max_iter=500):
        self.step_tol = step_tol
        self.max_iter = max_iter

    def fit(self, X, y):
        fit = fit_gaussian_xy(X, y, step_tol=self.step_tol, max_iter=self.max_iter)
        self.amplitude_, self.center_, self.width_ = fit.a, fit.b, fit.c
        self.r_squared_ = fit.r_squared
        self.n_iter_ = fit.iterations
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "amplitude_")
        x = np.asarray(X, dtype=float)
        if x.ndim == 2:
            if x.shape[1] != 1:
                raise DomainError(f"expected a single feature, got {x.shape[1]}")
            x = x[:, 0]
        return gaussian(x, self.amplitude_, self.center_, self.width_)

    def to_fit(self):
        check_is_fitted(self, "amplitude_")
        return GaussianFit(self.amplitude_, self.center_, self.width_, self.r_squared_, self.n_iter_)
