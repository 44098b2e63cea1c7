"""Sweep configuration: a flat ``key = value`` file with bracketed sections.

Recognised sections are ``[signal.<name>]`` and ``[sweep]``. A signal
section named after a built-in profile (``thz``, ``mmwave``) overrides its
fields; any other name defines a custom profile, which starts from
``base`` (default ``thz``). ``#`` starts a comment.

Example::

    [signal.mmwave]
    alpha = 1.7

    [sweep]
    signals = thz, mmwave
    protocols = both
    pbft_n = 4:52:3          # start:stop:step, stop inclusive
    regimes = 6:2, 6:5, 4:5  # z_db:gamma pairs
    metrics = ps, consensus, latency
"""

import itertools
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .channel import BUILTIN_PROFILES, PROTOCOLS, THRESHOLD_MODES, SignalProfile
from .exceptions import ConfigError, DomainError
from .validation import DEFAULT_REGIMES

METRICS = ("ps", "consensus", "latency", "throughput", "energy", "gain")
DEFAULT_N = {"pbft": tuple(range(4, 53, 3)), "raft": tuple(range(3, 52, 2))}

SIGNAL_KEYS = {
    "transmit_power": float,
    "noise_power": float,
    "bandwidth": float,
    "capacity": float,
    "rate": float,
    "alpha": float,
    "subcarriers": int,
}
SWEEP_KEYS = (
    "signals", "protocols", "n_values", "pbft_n", "raft_n", "regimes",
    "z_db", "gamma", "metrics", "threshold_mode", "mc_samples", "seed",
)


@dataclass(frozen=True)
class SweepSpec:
    signals: tuple = ("thz", "mmwave")
    protocols: tuple = PROTOCOLS
    n_values: dict = field(default_factory=lambda: dict(DEFAULT_N))
    regimes: tuple = DEFAULT_REGIMES
    metrics: tuple = METRICS
    threshold_mode: str = "db_to_linear"
    mc_samples: int = 0
    seed: int = 0
    profiles: dict = field(default_factory=lambda: dict(BUILTIN_PROFILES))

    def __post_init__(self):
        if not self.signals:
            raise DomainError("at least one signal is required")
        for name in self.signals:
            if name not in self.profiles:
                raise DomainError(f"signal {name!r} has no profile")
        if not self.protocols or set(self.protocols) - set(PROTOCOLS):
            raise DomainError(f"protocols must be a non-empty subset of {PROTOCOLS}")
        for protocol in self.protocols:
            grid = self.n_values.get(protocol)
            if not grid:
                raise DomainError(f"empty node-count grid for {protocol}")
            if min(grid) < 2:
                raise DomainError(f"node counts must be >= 2, got {min(grid)}")
        if not self.regimes:
            raise DomainError("at least one (z_db, gamma) regime is required")
        for z_db, gamma in self.regimes:
            if not gamma > 0:
                raise DomainError(f"gamma must be > 0, got {gamma!r}")
        if not self.metrics or set(self.metrics) - set(METRICS):
            raise DomainError(f"metrics must be a non-empty subset of {METRICS}")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise DomainError(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.mc_samples < 0:
            raise DomainError("mc_samples must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")

    def with_updates(self, **changes):
        return replace(self, **changes)


def _split_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_ints(text):
    out = []
    for item in _split_list(text):
        if ":" in item:
            parts = [int(v) for v in item.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step <= 0:
                raise ValueError("range step must be positive")
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(item))
    return tuple(out)


def _parse_regimes(text):
    out = []
    for item in _split_list(text):
        z, _, g = item.partition(":")
        if not g:
            raise ValueError(f"regime {item!r} is not z_db:gamma")
        out.append((float(z), float(g)))
    return tuple(out)


def _parse_floats(text):
    return tuple(float(v) for v in _split_list(text))


def _tokenize(text):
    """Yield ``(line_no, section, key, value)``; section headers yield key None."""
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", line_no)
            section = line[1:-1].strip().lower()
            if section != "sweep" and not section.startswith("signal."):
                raise ConfigError(f"unknown section [{section}]", line_no)
            yield line_no, section, None, None
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line_no)
        if section is None:
            raise ConfigError(f"key {key.strip()!r} appears before any section", line_no)
        yield line_no, section, key.strip().lower(), value.strip()


def parse_config(text):
    """Parse configuration text into a :class:`SweepSpec`."""
    overrides = {}
    sweep = {}
    for line_no, section, key, value in _tokenize(text):
        if key is None:
            if section.startswith("signal."):
                overrides.setdefault(section[len("signal."):], {})
            continue
        if section == "sweep":
            if key not in SWEEP_KEYS:
                raise ConfigError(f"unknown key {key!r} in [sweep]", line_no)
            sweep[key] = (line_no, value)
            continue
        name = section[len("signal."):]
        if key not in SIGNAL_KEYS and key != "base":
            raise ConfigError(f"unknown key {key!r} in [{section}]", line_no)
        overrides.setdefault(name, {})[key] = (line_no, value)

    profiles = dict(BUILTIN_PROFILES)
    for name, entries in overrides.items():
        base_name = entries.pop("base", (None, "thz" if name not in profiles else name))[1]
        base = profiles.get(name) or BUILTIN_PROFILES.get(base_name.lower())
        if base is None:
            raise ConfigError(f"unknown base profile {base_name!r} for signal {name!r}")
        changes = {"name": name}
        for key, (line_no, value) in entries.items():
            try:
                changes[key] = SIGNAL_KEYS[key](value)
            except ValueError:
                raise ConfigError(f"invalid value {value!r} for {key}", line_no) from None
        try:
            profiles[name] = replace(base, **changes)
        except DomainError as exc:
            raise ConfigError(f"signal {name!r}: {exc}") from None

    kwargs = {"profiles": profiles}
    parsers = {
        "signals": lambda v: tuple(s.lower() for s in _split_list(v)),
        "protocols": lambda v: PROTOCOLS if v.strip().lower() == "both"
        else tuple(s.lower() for s in _split_list(v)),
        "metrics": lambda v: tuple(s.lower() for s in _split_list(v)),
        "threshold_mode": str.strip,
        "mc_samples": int,
        "seed": int,
    }
    for key, parse in parsers.items():
        if key in sweep:
            line_no, value = sweep[key]
            try:
                kwargs[key] = parse(value)
            except ValueError:
                raise ConfigError(f"invalid value {value!r} for {key}", line_no) from None

    n_values = dict(DEFAULT_N)
    try:
        if "n_values" in sweep:
            grid = _parse_ints(sweep["n_values"][1])
            n_values = {p: grid for p in PROTOCOLS}
        for protocol in PROTOCOLS:
            key = f"{protocol}_n"
            if key in sweep:
                n_values[protocol] = _parse_ints(sweep[key][1])
    except ValueError as exc:
        raise ConfigError(f"invalid node-count grid: {exc}") from None
    kwargs["n_values"] = n_values

    if "regimes" in sweep and ("z_db" in sweep or "gamma" in sweep):
        raise ConfigError("use either regimes or z_db/gamma, not both", sweep["regimes"][0])
    try:
        if "regimes" in sweep:
            kwargs["regimes"] = _parse_regimes(sweep["regimes"][1])
        elif "z_db" in sweep or "gamma" in sweep:
            zs = _parse_floats(sweep["z_db"][1]) if "z_db" in sweep else (4.0,)
            gammas = _parse_floats(sweep["gamma"][1]) if "gamma" in sweep else (5.0,)
            kwargs["regimes"] = tuple(itertools.product(zs, gammas))
    except ValueError as exc:
        raise ConfigError(f"invalid regime: {exc}") from None

    try:
        return SweepSpec(**kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None):
    """Read a configuration file; ``None`` gives the built-in defaults."""
    if path is None:
        return SweepSpec()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def _fmt_range(values):
    values = list(values)
    if len(values) >= 3:
        step = values[1] - values[0]
        if step > 0 and all(b - a == step for a, b in zip(values, values[1:])):
            return f"{values[0]}:{values[-1]}:{step}"
    return ", ".join(str(v) for v in values)


def dump_config(spec):
    """Render ``spec`` in the configuration format; :func:`parse_config` reads it back."""
    lines = []
    for name in sorted(spec.profiles):
        profile = spec.profiles[name]
        lines.append(f"[signal.{name}]")
        for f in fields(SignalProfile):
            if f.name == "name":
                continue
            lines.append(f"{f.name} = {getattr(profile, f.name)!r}")
        lines.append("")
    lines.append("[sweep]")
    lines.append(f"signals = {', '.join(spec.signals)}")
    lines.append(f"protocols = {', '.join(spec.protocols)}")
    for protocol in PROTOCOLS:
        lines.append(f"{protocol}_n = {_fmt_range(spec.n_values[protocol])}")
    lines.append("regimes = " + ", ".join(f"{z!r}:{g!r}" for z, g in spec.regimes))
    lines.append(f"metrics = {', '.join(spec.metrics)}")
    lines.append(f"threshold_mode = {spec.threshold_mode}")
    lines.append(f"mc_samples = {spec.mc_samples}")
    lines.append(f"seed = {spec.seed}")
    return "\n".join(lines) + "\n"
