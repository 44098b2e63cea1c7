"""Performance models of PBFT and RAFT consensus over non-ideal wireless links."""

__version__ = "0.1.0"

from .channel import (
    MMWAVE,
    THZ,
    NetworkConfig,
    PathLossParams,
    SignalProfile,
    active_distance,
    path_loss_db,
    snr,
    transmission_success_probability,
)
from .consensus import ConsensusBreakdown, fault_budget, pbft_success, primary_index, raft_success
from .exceptions import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DegenerateSeriesError,
    DomainError,
    NumericalError,
)
from .fitting import GaussianFit, GaussianFitter, fit_gaussian, reliability_gain
from .perf import PerfReport, evaluate, per_message_latency

__all__ = [
    "MMWAVE", "THZ", "NetworkConfig", "PathLossParams", "SignalProfile",
    "active_distance", "path_loss_db", "snr", "transmission_success_probability",
    "ConsensusBreakdown", "fault_budget", "pbft_success", "primary_index", "raft_success",
    "BracketError", "ConfigError", "ConvergenceError", "DegenerateSeriesError",
    "DomainError", "NumericalError",
    "GaussianFit", "GaussianFitter", "fit_gaussian", "reliability_gain",
    "PerfReport", "evaluate", "per_message_latency",
]
