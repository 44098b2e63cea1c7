"""Monte Carlo oracles for the analytic channel and consensus models.

Every estimator draws from streams keyed by ``(seed, stream_id, chunk)``
through :class:`numpy.random.SeedSequence`, so results do not depend on how
trials are split across workers: chunk counts are summed, and summation of
integers is order independent.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from ._validation import check_count, check_probability
from .consensus import fault_budget

DEFAULT_CHUNK = 1_000_000
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self, chunk=0):
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, chunk))
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, stream_id):
        return RngSeed(self.seed, stream_id)


@dataclass(frozen=True)
class McEstimate:
    successes: int
    samples: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("an estimate needs at least one sample")

    @property
    def mean(self):
        return self.successes / self.samples

    @property
    def std_error(self):
        m = self.mean
        return math.sqrt(m * (1.0 - m) / self.samples)

    def merge(self, other):
        return McEstimate(self.successes + other.successes, self.samples + other.samples)


def _chunks(total, chunk):
    full, rest = divmod(total, chunk)
    sizes = [chunk] * full
    if rest:
        sizes.append(rest)
    return sizes


def _run_chunked(count_fn, total, seed, chunk):
    successes = 0
    for index, size in enumerate(_chunks(total, chunk)):
        successes += int(count_fn(seed.generator(index), size))
    return McEstimate(successes, total)


def distance_from_uniform(net, u):
    """Inverse-transform map from ``u`` in [0, 1] to a distance with density ``2r/R_a^2``."""
    return net.radius * np.sqrt(u)


def sample_distance(net, rng, size=None):
    return distance_from_uniform(net, rng.random(size))


def sample_fading(rng, size=None):
    """Exponential(1) power gains by inverse transform."""
    return -np.log1p(-rng.random(size))


def estimate_ps(profile, net, samples=1_000_000, seed=RngSeed(), chunk=DEFAULT_CHUNK):
    """Fraction of random (distance, fading) draws whose SNR clears the threshold."""
    samples = check_count(samples, "samples", minimum=1)
    z = net.z_linear
    pt, pn, alpha = profile.transmit_power, profile.noise_power, profile.alpha

    def count(rng, size):
        r = sample_distance(net, rng, size)
        h = sample_fading(rng, size)
        # P_T h r^-a / P_N >= z rearranged so r = 0 needs no division
        return np.count_nonzero(pt * h >= z * pn * r**alpha)

    return _run_chunked(count, samples, seed, chunk)


SAMPLERS = ("inversion", "numpy", "bernoulli")


def binomial_draws(rng, population, q, method="numpy"):
    """Failure counts for each entry of ``population`` at failure probability ``q``.

    ``"numpy"`` uses numpy's exact binomial sampler; ``"bernoulli"`` sums one
    uniform comparison per node.
    """
    population = np.asarray(population, dtype=np.int64)
    if method == "numpy":
        return rng.binomial(population, q)
    if method == "bernoulli":
        width = int(population.max(initial=0))
        fails = rng.random((population.size, width)) < q
        fails &= np.arange(width) < population[:, None]
        return fails.sum(axis=1)
    raise ValueError(f"unknown binomial method {method!r}")


def _inversion_table(n, budget, offset, q):
    # row c: Binomial(n + offset - c, q) CDF at 0..budget-c, +inf past the budget
    table = np.full((budget + 1, budget + 1), np.inf)
    for c in range(budget + 1):
        population = n + offset - c
        if population < 0:
            continue
        k = np.arange(budget - c + 1)
        table[c, : k.size] = binom.cdf(k, population, q)
    return table


def _simulate_stages(n, p, budget, offsets, trials, seed, method, chunk):
    if method not in SAMPLERS:
        raise ValueError(f"unknown binomial method {method!r}; expected one of {SAMPLERS}")
    q = 1.0 - p
    tables = None
    if method == "inversion":
        tables = [_inversion_table(n, budget, offset, q) for offset in offsets]

    def count(rng, size):
        failures = np.zeros(size, dtype=np.int64)
        for stage, offset in enumerate(offsets):
            if failures.size == 0:
                break
            if tables is not None:
                # number of CDF entries <= u is an exact inverse-transform draw,
                # capped at one past the remaining budget
                u = rng.random(failures.size)
                draws = np.count_nonzero(tables[stage][failures] <= u[:, None], axis=1)
            else:
                draws = binomial_draws(rng, n + offset - failures, q, method)
            failures = failures + draws
            failures = failures[failures <= budget]
        return failures.size

    return _run_chunked(count, trials, seed, chunk)


def simulate_pbft(n, p, trials=10_000_000, seed=RngSeed(), method="inversion", chunk=DEFAULT_CHUNK):
    """Stage-level simulation of the four PBFT stages with a cumulative failure budget."""
    p = check_probability(p, "p")
    trials = check_count(trials, "trials", minimum=1)
    budget = fault_budget("pbft", n).budget
    return _simulate_stages(n, p, budget, (-1, -1, 0, 0), trials, seed, method, chunk)


def simulate_raft(n, p, trials=10_000_000, seed=RngSeed(), method="inversion", chunk=DEFAULT_CHUNK):
    p = check_probability(p, "p")
    trials = check_count(trials, "trials", minimum=1)
    budget = fault_budget("raft", n).budget
    return _simulate_stages(n, p, budget, (-1, -1), trials, seed, method, chunk)


def simulate_consensus(protocol, n, p, trials=10_000_000, seed=RngSeed(), **kwargs):
    if protocol == "pbft":
        return simulate_pbft(n, p, trials, seed, **kwargs)
    return simulate_raft(n, p, trials, seed, **kwargs)


def concordant(analytic, estimate, sigmas=3.0):
    """Whether ``analytic`` lies within ``sigmas`` standard errors of ``estimate``.

    When the estimate is degenerate (every draw succeeded or every draw
    failed) its empirical standard error is zero, and the binomial standard
    error at the analytic value is used instead.
    """
    se = estimate.std_error
    if estimate.successes in (0, estimate.samples):
        p = min(1.0, max(0.0, analytic))
        se = math.sqrt(p * (1.0 - p) / estimate.samples)
    return abs(analytic - estimate.mean) <= sigmas * se
