"""Physical-layer model: SNR under Rayleigh fading, log-distance path loss,
average transmission success probability and the active distance."""

import math
from dataclasses import dataclass, replace

from ._validation import check_count, check_finite, check_positive
from .exceptions import DomainError
from .numerics import QuadratureSpec, integrate

THRESHOLD_MODES = ("db_to_linear", "linear_as_given")
PROTOCOLS = ("pbft", "raft")


@dataclass(frozen=True)
class SignalProfile:
    """Physical-layer parameters of one signal class.

    Powers are in watts, bandwidth in hertz, capacity and rate in bits per
    second. ``subcarriers`` is fixed at 1 for the built-in profiles.
    """

    name: str
    transmit_power: float
    noise_power: float
    bandwidth: float
    capacity: float
    rate: float
    alpha: float
    subcarriers: int = 1

    def __post_init__(self):
        check_positive(self.transmit_power, "transmit_power")
        check_positive(self.noise_power, "noise_power")
        check_positive(self.bandwidth, "bandwidth")
        check_positive(self.rate, "rate")
        check_positive(self.alpha, "alpha")
        check_count(self.subcarriers, "subcarriers", minimum=1)
        if not check_finite(self.capacity, "capacity") > self.rate:
            raise DomainError(
                f"capacity must exceed rate, got C={self.capacity!r} R={self.rate!r}"
            )

    def with_overrides(self, **changes):
        return replace(self, **changes)


THZ = SignalProfile(
    name="thz", transmit_power=1.0, noise_power=0.2, bandwidth=10e9,
    capacity=80e9, rate=40e9, alpha=2.229,
)
MMWAVE = SignalProfile(
    name="mmwave", transmit_power=1.0, noise_power=0.2, bandwidth=800e6,
    capacity=8e9, rate=4e9, alpha=1.7,
)
BUILTIN_PROFILES = {"thz": THZ, "mmwave": MMWAVE}


def builtin_profile(name):
    try:
        return BUILTIN_PROFILES[name.lower()]
    except KeyError:
        raise DomainError(
            f"unknown signal profile {name!r}; expected one of {sorted(BUILTIN_PROFILES)}"
        ) from None


def db_to_linear(value_db):
    return 10.0 ** (check_finite(value_db, "z_db") / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Consensus network geometry and receive threshold.

    ``z_db`` is converted to a linear ratio unless ``threshold_mode`` is
    ``"linear_as_given"``, in which case the number is used verbatim.
    """

    n: int
    gamma: float
    z_db: float
    threshold_mode: str = "db_to_linear"
    protocol: str = "pbft"

    def __post_init__(self):
        check_count(self.n, "n", minimum=2)
        check_positive(self.gamma, "gamma")
        check_finite(self.z_db, "z_db")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise DomainError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.protocol not in PROTOCOLS:
            raise DomainError(f"protocol must be one of {PROTOCOLS}")
        if self.threshold_mode == "linear_as_given" and self.z_db < 0:
            raise DomainError("a linear SNR threshold must be >= 0")
        radius = self.radius
        if not (math.isfinite(radius) and radius > 0):
            raise DomainError(f"derived radius is not finite and positive: {radius!r}")

    @property
    def radius(self):
        """Radius of the disc holding ``n`` nodes at density ``gamma``, in meters."""
        return math.sqrt(self.n / (math.pi * self.gamma))

    @property
    def z_linear(self):
        if self.threshold_mode == "linear_as_given":
            return float(self.z_db)
        return db_to_linear(self.z_db)


@dataclass(frozen=True)
class PathLossParams:
    reference_distance: float
    reference_loss_db: float
    shadowing_sigma_db: float = 0.0

    def __post_init__(self):
        check_positive(self.reference_distance, "reference_distance")
        check_finite(self.reference_loss_db, "reference_loss_db")
        check_positive(self.shadowing_sigma_db, "shadowing_sigma_db", allow_zero=True)


def snr(profile, h, r):
    """Linear SNR ``P_T * h * r**-alpha / P_N`` at distance ``r`` with fading gain ``h``."""
    h = check_positive(h, "h", allow_zero=True)
    r = check_positive(r, "r")
    return profile.transmit_power * h * r ** (-profile.alpha) / profile.noise_power


def path_loss_db(params, alpha, r, shadowing_draw=0.0):
    """Close-in reference-distance path loss in dB."""
    alpha = check_positive(alpha, "alpha")
    r = check_finite(r, "r")
    if r < params.reference_distance:
        raise DomainError(
            f"r={r!r} is inside the reference distance {params.reference_distance!r}"
        )
    ratio = r / params.reference_distance
    return (
        params.reference_loss_db
        + 10.0 * alpha * math.log10(ratio)
        + check_finite(shadowing_draw, "shadowing_draw")
    )


def transmission_success_probability(profile, net, quadrature=None):
    """Average probability that one transmission clears the SNR threshold.

    Averages the Rayleigh outage ``exp(-P_N r^alpha z / P_T)`` over the
    distance density ``2 r / R_a**2`` on ``[0, R_a]``.
    """
    z = net.z_linear
    radius = net.radius
    scale = profile.noise_power * z / profile.transmit_power
    alpha = profile.alpha

    def integrand(r):
        return math.exp(-scale * r**alpha) * r

    value = integrate(integrand, 0.0, radius, quadrature or QuadratureSpec())
    p_s = 2.0 * math.pi * net.gamma / net.n * value
    return min(1.0, max(0.0, p_s))


def active_distance(profile, z_linear, h=1.0):
    """Largest distance at which the SNR with fading gain ``h`` still reaches ``z_linear``."""
    h = check_positive(h, "h")
    z_linear = check_positive(z_linear, "z_linear")
    base = profile.transmit_power * h / (z_linear * profile.noise_power)
    return base ** (1.0 / profile.alpha)
