"""Monte Carlo concordance grid: every analytic value against its oracle."""

import itertools
from dataclasses import dataclass

from .channel import MMWAVE, THZ, NetworkConfig, transmission_success_probability
from .consensus import consensus_success
from .montecarlo import RngSeed, concordant, estimate_ps, simulate_consensus

DEFAULT_REGIMES = ((6.0, 2.0), (6.0, 5.0), (4.0, 5.0))
VALIDATION_N = (4, 10, 19, 31)


@dataclass(frozen=True)
class ConcordanceResult:
    signal: str
    n: int
    z_db: float
    gamma: float
    quantity: str
    analytic: float
    mc_mean: float
    mc_stderr: float
    samples: int
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.quantity:<12} signal={self.signal:<6} n={self.n:<3} "
            f"z_db={self.z_db:g} gamma={self.gamma:g} analytic={self.analytic:.6e} "
            f"mc={self.mc_mean:.6e} se={self.mc_stderr:.2e} samples={self.samples}"
        )


def concordance_grid(
    profiles=(THZ, MMWAVE),
    n_values=VALIDATION_N,
    regimes=DEFAULT_REGIMES,
    samples=1_000_000,
    trials=10_000_000,
    seed=0,
    threshold_mode="db_to_linear",
):
    """Compare P_s, P_p and P_R with their Monte Carlo estimates on a grid.

    Each cell gets three consecutive stream ids, so a cell's draws do not
    depend on which other cells are run.
    """
    results = []
    cells = itertools.product(enumerate(profiles), enumerate(regimes), enumerate(n_values))
    for (pi, profile), (ri, (z_db, gamma)), (ni, n) in cells:
        cell = (pi * len(regimes) + ri) * len(n_values) + ni
        base = RngSeed(seed, 3 * cell)
        net = NetworkConfig(n, gamma, z_db, threshold_mode)
        p_s = transmission_success_probability(profile, net)
        checks = [("P_s", p_s, estimate_ps(profile, net, samples, base))]
        for offset, protocol in enumerate(("pbft", "raft"), start=1):
            analytic = consensus_success(protocol, n, p_s).total
            est = simulate_consensus(protocol, n, p_s, trials, base.substream(3 * cell + offset))
            checks.append((f"P_{protocol}", analytic, est))
        for quantity, analytic, est in checks:
            results.append(
                ConcordanceResult(
                    profile.name, n, z_db, gamma, quantity, analytic,
                    est.mean, est.std_error, est.samples, concordant(analytic, est),
                )
            )
    return results
