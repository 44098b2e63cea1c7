import math

import pytest
from scipy.special import gamma, gammainc

from wireless_consensus.channel import MMWAVE, THZ

PROFILES = [THZ, MMWAVE]
REFERENCE_REGIMES = [(6.0, 2.0), (6.0, 5.0), (4.0, 5.0)]

# populated by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = []


def ps_closed_form(profile, n, gamma_density, z_linear):
    """Average success probability via the lower incomplete gamma function."""
    s = profile.noise_power * z_linear / profile.transmit_power
    radius = math.sqrt(n / (math.pi * gamma_density))
    if s == 0:
        return 1.0
    k = 2.0 / profile.alpha
    integral = gamma(k) * gammainc(k, s * radius**profile.alpha) / (profile.alpha * s**k)
    return 2.0 * math.pi * gamma_density / n * integral


@pytest.fixture(params=PROFILES, ids=lambda p: p.name)
def profile(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
