"""Analytic consensus success rates for PBFT and RAFT over lossy links.

Each protocol is a chain of stages. In every stage each participating node
independently fails with probability ``1 - p``; failures accumulate across
stages and consensus succeeds while the cumulative count stays within the
fault budget. The stage population shrinks by the failures seen so far:

====== ============================ =========================
stage  PBFT population              RAFT population
====== ============================ =========================
1      n - 1                        n - 1
2      n - 1 - i                    n - 1 - i
3      n - i - j   (primary joins)
4      n - i - j - k
====== ============================ =========================
"""

import math
from dataclasses import dataclass

from ._validation import check_count, check_probability
from .exceptions import DomainError

PBFT_STAGES = ("pre-prepare", "prepare", "commit", "reply")
RAFT_STAGES = ("downlink", "uplink")

# population of stage s is base[s] minus the failures accumulated before it
_PBFT_OFFSETS = (-1, -1, 0, 0)
_RAFT_OFFSETS = (-1, -1)

_LOG_SPACE_THRESHOLD = 60


@dataclass(frozen=True)
class FaultBudget:
    protocol: str
    n: int
    budget: int

    @property
    def optimal(self):
        """Whether ``n`` is the smallest size for its budget (3b+1 or 2f+1)."""
        per_fault = 3 if self.protocol == "pbft" else 2
        return self.n == per_fault * self.budget + 1


@dataclass(frozen=True)
class ConsensusBreakdown:
    """Stage-level success probabilities of one evaluation.

    ``per_stage`` holds ``(label, probability)`` where the first entry is the
    unconditional first-stage success and each later entry is conditional on
    all earlier stages having succeeded, so their product is ``total``.
    """

    per_stage: tuple
    total: float

    @property
    def first_stage(self):
        return self.per_stage[0][1]

    @property
    def geometric_stage_mean(self):
        """``total ** (1 / stages)``: one summary of the per-stage success rate."""
        return self.total ** (1.0 / len(self.per_stage))

    def as_dict(self):
        return dict(self.per_stage)


def fault_budget(protocol, n):
    n = check_count(n, "n", minimum=2)
    if protocol == "pbft":
        return FaultBudget("pbft", n, (n - 1) // 3)
    if protocol == "raft":
        return FaultBudget("raft", n, (n - 1) // 2)
    raise DomainError(f"unknown protocol {protocol!r}")


def primary_index(view, node_set_size):
    """Index of the primary node in view ``view``, rotating round-robin."""
    view = check_count(view, "view")
    node_set_size = check_count(node_set_size, "node_set_size", minimum=1)
    return view % node_set_size


def _log_pow(x, k):
    if k == 0:
        return 0.0
    return k * math.log(x) if x > 0 else -math.inf


def _pmf_table(population, p, max_failures, log_space):
    """Binomial(population, 1-p) masses for 0..max_failures failures."""
    q = 1.0 - p
    top = min(max_failures, population)
    if not log_space:
        return [
            math.comb(population, x) * q**x * p ** (population - x)
            for x in range(top + 1)
        ]
    lg = math.lgamma(population + 1)
    out = []
    for x in range(top + 1):
        log_c = lg - math.lgamma(x + 1) - math.lgamma(population - x + 1)
        log_term = log_c + _log_pow(q, x) + _log_pow(p, population - x)
        out.append(math.exp(log_term) if log_term > -math.inf else 0.0)
    return out


def _staged_success(n, p, budget, offsets, labels):
    # mass[c]: probability of having passed every stage so far with c failures
    log_space = n > _LOG_SPACE_THRESHOLD
    mass = [1.0] + [0.0] * budget
    reached = []
    for offset in offsets:
        nxt = [0.0] * (budget + 1)
        for c, weight in enumerate(mass):
            if weight == 0.0:
                continue
            pmf = _pmf_table(n + offset - c, p, budget - c, log_space)
            for x, pm in enumerate(pmf):
                nxt[c + x] += weight * pm
        mass = nxt
        reached.append(math.fsum(mass))

    per_stage = []
    previous = 1.0
    for label, value in zip(labels, reached):
        per_stage.append((label, value / previous if previous > 0 else 0.0))
        previous = value
    total = min(1.0, max(0.0, reached[-1]))
    return ConsensusBreakdown(tuple(per_stage), total)


def pbft_success(n, p):
    """Probability that all four PBFT stages finish within ``b = (n-1)//3`` failures."""
    p = check_probability(p, "p")
    budget = fault_budget("pbft", n).budget
    return _staged_success(n, p, budget, _PBFT_OFFSETS, PBFT_STAGES)


def raft_success(n, p):
    """Probability that downlink and uplink finish within ``f = (n-1)//2`` failures."""
    p = check_probability(p, "p")
    budget = fault_budget("raft", n).budget
    return _staged_success(n, p, budget, _RAFT_OFFSETS, RAFT_STAGES)


def consensus_success(protocol, n, p):
    if protocol == "pbft":
        return pbft_success(n, p)
    if protocol == "raft":
        return raft_success(n, p)
    raise DomainError(f"unknown protocol {protocol!r}")
