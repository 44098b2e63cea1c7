"""Parameter sweeps producing one CSV row per (signal, protocol, regime, n)."""

import csv
import math
import sys
from dataclasses import dataclass, fields

from .channel import NetworkConfig, transmission_success_probability
from .consensus import consensus_success
from .exceptions import ConsensusModelError, NumericalError
from .montecarlo import RngSeed, concordant, simulate_consensus
from . import perf


@dataclass
class RunRecord:
    signal: str
    protocol: str
    n: int
    z_db: float
    gamma: float
    p_s: float = None
    p_consensus: float = None
    T_s: float = None
    t1_s: float = None
    t2_s: float = None
    t_total_s: float = None
    tps: float = None
    energy_j: float = None
    gain: float = None
    mc_mean: float = None
    mc_stderr: float = None


COLUMNS = tuple(f.name for f in fields(RunRecord))


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, str)):
        return str(value)
    return format(float(value), ".12g")


def _evaluate_row(spec, profile, protocol, n, z_db, gamma, stream_id):
    metrics = set(spec.metrics)
    row = RunRecord(profile.name, protocol, n, z_db, gamma)
    est = None
    net = NetworkConfig(n, gamma, z_db, spec.threshold_mode, protocol)
    p_s = transmission_success_probability(profile, net)
    if "ps" in metrics:
        row.p_s = p_s

    if metrics & {"consensus", "gain"} or spec.mc_samples:
        p_c = consensus_success(protocol, n, p_s).total
        if "consensus" in metrics:
            row.p_consensus = p_c
        if "gain" in metrics and p_c < 1.0:
            row.gain = math.log10(1.0 - p_c)
        elif "gain" in metrics:
            print(f"warning: gain undefined at P=1 for {profile.name}/{protocol} n={n}", file=sys.stderr)
        if spec.mc_samples:
            est = simulate_consensus(
                protocol, n, p_s, spec.mc_samples, RngSeed(spec.seed, stream_id)
            )
            row.mc_mean, row.mc_stderr = est.mean, est.std_error

    if metrics & {"latency", "throughput", "energy"}:
        T = perf.per_message_latency(profile, p_s)
        lat = (perf.pbft_latency if protocol == "pbft" else perf.raft_latency)(n, T)
        if "latency" in metrics:
            row.T_s, row.t1_s, row.t2_s, row.t_total_s = T, lat.t1, lat.t2, lat.total
        if "throughput" in metrics:
            row.tps = perf.throughput(lat.total)
        if "energy" in metrics:
            energy_fn = perf.pbft_energy if protocol == "pbft" else perf.raft_energy
            row.energy_j = energy_fn(n, lat.t1, lat.t2, profile.transmit_power).total
    return row, est


def iter_cells(spec):
    for signal in spec.signals:
        for protocol in spec.protocols:
            for z_db, gamma in spec.regimes:
                for n in spec.n_values[protocol]:
                    yield spec.profiles[signal], protocol, n, z_db, gamma


def run_sweep(spec, verify=False, discordant=None):
    """Evaluate every cell of ``spec`` in a fixed order.

    Errors are re-raised with the offending cell prepended to the message.
    With ``verify``, rows whose Monte Carlo estimate is more than three
    standard errors from the analytic value are appended to ``discordant``
    rather than raised: with hundreds of rows a few are expected by chance.
    """
    records = []
    for stream_id, (profile, protocol, n, z_db, gamma) in enumerate(iter_cells(spec)):
        try:
            row, est = _evaluate_row(spec, profile, protocol, n, z_db, gamma, stream_id)
            if verify:
                verify_record(row, spec)
                if est is not None and not concordant(
                    consensus_success(protocol, n, p_s_of(row, spec)).total, est
                ):
                    if discordant is not None:
                        discordant.append(row)
        except ConsensusModelError as exc:
            exc.args = (
                f"row signal={profile.name} protocol={protocol} n={n} "
                f"z_db={z_db:g} gamma={gamma:g}: {exc}",
            )
            raise
        records.append(row)
    return records


def _close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def p_s_of(row, spec):
    if row.p_s is not None:
        return row.p_s
    net = NetworkConfig(row.n, row.gamma, row.z_db, spec.threshold_mode, row.protocol)
    return transmission_success_probability(spec.profiles[row.signal], net)


def verify_record(row, spec):
    """Re-check the deterministic model invariants on one finished row."""
    problems = []
    profile = spec.profiles[row.signal]
    for name in ("p_s", "p_consensus", "mc_mean"):
        value = getattr(row, name)
        if value is not None and not 0.0 <= value <= 1.0:
            problems.append(f"{name}={value} outside [0, 1]")
    if row.T_s is not None:
        if not _close(row.t1_s, (row.n - 1) * row.T_s):
            problems.append("t1 != (n-1) T")
        if row.t2_s != row.T_s:
            problems.append("t2 != T")
        mult = 3 * row.n - 2 if row.protocol == "pbft" else row.n
        if not _close(row.t_total_s, mult * row.T_s):
            problems.append("total latency identity fails")
        if abs(perf.outage_at(row.T_s, profile) - (1.0 - p_s_of(row, spec))) > 1e-9:
            problems.append("latency root does not reproduce 1 - p_s")
    if row.tps is not None and row.t_total_s is not None:
        if not _close(row.tps * row.t_total_s, 1.0):
            problems.append("throughput * latency != 1")
    if row.energy_j is not None and row.T_s is not None:
        closed = (
            perf.pbft_energy_closed_form if row.protocol == "pbft" else perf.raft_energy_closed_form
        )
        expected = closed(row.n, row.t1_s, row.t2_s, profile.transmit_power)
        if not _close(row.energy_j, expected, 1e-14):
            problems.append("energy breakdown does not match the closed form")
    if problems:
        raise NumericalError("invariant check failed: " + "; ".join(problems))


def write_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for row in records:
        writer.writerow([format_value(getattr(row, c)) for c in COLUMNS])


def summarize(records):
    """Human-readable min/max of the populated metrics per signal and protocol."""
    groups = {}
    for row in records:
        groups.setdefault((row.signal, row.protocol), []).append(row)
    lines = [f"{len(records)} rows"]
    for (signal, protocol), rows in groups.items():
        parts = []
        for column in ("p_s", "p_consensus", "t2_s", "t_total_s", "tps", "energy_j"):
            values = [getattr(r, column) for r in rows if getattr(r, column) is not None]
            if values:
                parts.append(f"{column}=[{min(values):.4g}, {max(values):.4g}]")
        lines.append(f"  {signal}/{protocol}: " + " ".join(parts))
    return "\n".join(lines)
