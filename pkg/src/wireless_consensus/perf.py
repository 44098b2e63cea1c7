"""Latency, throughput and energy of one consensus round.

Per-message latency comes from inverting the finite-blocklength relation

    1 - p_s = Q((u (C - R) + 0.5 log2 u) / (log2(e) sqrt(u))),   u = T B N

for ``T``. Logs are base 2 and ``C``, ``R`` are used in bits per second as
given, which places THz latencies near 0.039 as and mmWave near 4.388 as.
"""

import math
import sys
from dataclasses import dataclass

from ._validation import check_count, check_positive, check_probability
from .channel import transmission_success_probability
from .exceptions import BracketError, DomainError
from .numerics import RootBracket, find_root, q_function, q_inverse

LOG2_E = math.log2(math.e)

_BRACKET_START = sys.float_info.min
_BRACKET_GROWTH = 10.0


@dataclass(frozen=True)
class Latency:
    t1: float
    t2: float
    total: float


@dataclass(frozen=True)
class EnergyBreakdown:
    stages: tuple
    total: float

    def as_dict(self):
        return dict(self.stages)


@dataclass(frozen=True)
class PerfReport:
    """Timing and energy of one round. Seconds, transactions/second, joules."""

    protocol: str
    per_message_T: float
    t1: float
    t2: float
    total_latency: float
    throughput: float
    energy: float
    energy_stages: tuple = ()


def blocklength_argument(u, profile):
    """Argument of Q in the finite-blocklength relation at blocklength ``u``."""
    rate_gap = profile.capacity - profile.rate
    return (u * rate_gap + 0.5 * math.log2(u)) / (LOG2_E * math.sqrt(u))


def outage_at(T, profile):
    """``Q(...)`` evaluated at per-message latency ``T``: the implied ``1 - p_s``."""
    u = T * profile.bandwidth * profile.subcarriers
    return q_function(blocklength_argument(u, profile))


def per_message_latency(profile, p_s):
    """Per-message latency ``T`` at which the link delivers with probability ``p_s``."""
    p_s = check_probability(p_s, "p_s", open_low=True, open_high=True)
    target = q_inverse(1.0 - p_s)

    def objective(u):
        return blocklength_argument(u, profile) - target

    # objective -> -inf as u -> 0+, so grow the upper end until it turns positive
    lo = _BRACKET_START
    hi = lo * _BRACKET_GROWTH
    while objective(hi) < 0:
        lo, hi = hi, hi * _BRACKET_GROWTH
        if not math.isfinite(hi) or hi > 1e300:
            raise BracketError("could not bracket the blocklength root")
    u = find_root(objective, RootBracket(lo, hi), tol=1e-15)
    return u / (profile.bandwidth * profile.subcarriers)


def pbft_latency(n, T):
    """Three broadcast stages of ``(n-1) T`` plus one reply of ``T``."""
    n = check_count(n, "n", minimum=2)
    T = check_positive(T, "T")
    t1 = (n - 1) * T
    return Latency(t1, T, 3 * t1 + T)


def raft_latency(n, T):
    n = check_count(n, "n", minimum=2)
    T = check_positive(T, "T")
    t1 = (n - 1) * T
    return Latency(t1, T, t1 + T)


def throughput(total_latency):
    total_latency = float(total_latency)
    if not total_latency > 0:
        raise DomainError(f"total latency must be > 0, got {total_latency!r}")
    return 1.0 / total_latency


def pbft_energy(n, t1, t2, transmit_power):
    """Energy per stage: ``(n-1)``, ``(n-1)^2``, ``n(n-1)`` broadcasts of ``t1`` and ``n`` replies of ``t2``."""
    n = check_count(n, "n", minimum=2)
    t1, t2 = check_positive(t1, "t1"), check_positive(t2, "t2")
    pt = check_positive(transmit_power, "transmit_power")
    stages = (
        ("pre-prepare", (n - 1) * t1 * pt),
        ("prepare", (n - 1) ** 2 * t1 * pt),
        ("commit", n * (n - 1) * t1 * pt),
        ("reply", n * t2 * pt),
    )
    return EnergyBreakdown(stages, math.fsum(e for _, e in stages))


def pbft_energy_closed_form(n, t1, t2, transmit_power):
    return (2 * n * n * t1 - 2 * n * t1 + n * t2) * transmit_power


def raft_energy(n, t1, t2, transmit_power):
    n = check_count(n, "n", minimum=2)
    t1, t2 = check_positive(t1, "t1"), check_positive(t2, "t2")
    pt = check_positive(transmit_power, "transmit_power")
    stages = (
        ("downlink", (n - 1) * t1 * pt),
        ("uplink", (n - 1) * t2 * pt),
    )
    return EnergyBreakdown(stages, math.fsum(e for _, e in stages))


def raft_energy_closed_form(n, t1, t2, transmit_power):
    return (n - 1) * (t1 + t2) * transmit_power


def evaluate(profile, net, p_s=None):
    """Full :class:`PerfReport` for ``net.protocol``.

    ``p_s`` defaults to the channel-averaged transmission success probability.
    """
    if p_s is None:
        p_s = transmission_success_probability(profile, net)
    T = per_message_latency(profile, p_s)
    if net.protocol == "pbft":
        lat = pbft_latency(net.n, T)
        energy = pbft_energy(net.n, lat.t1, lat.t2, profile.transmit_power)
    else:
        lat = raft_latency(net.n, T)
        energy = raft_energy(net.n, lat.t1, lat.t2, profile.transmit_power)
    return PerfReport(
        protocol=net.protocol,
        per_message_T=T,
        t1=lat.t1,
        t2=lat.t2,
        total_latency=lat.total,
        throughput=throughput(lat.total),
        energy=energy.total,
        energy_stages=energy.stages,
    )
