import pytest

from wireless_consensus.channel import BUILTIN_PROFILES, MMWAVE
from wireless_consensus.config import DEFAULT_N, METRICS, SweepSpec, dump_config, load_config, parse_config
from wireless_consensus.exceptions import ConfigError, DomainError


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.conf"
    path.write_text("")
    spec = load_config(path)
    assert spec == SweepSpec() == load_config()
    assert spec.regimes == ((6.0, 2.0), (6.0, 5.0), (4.0, 5.0))
    assert spec.profiles == BUILTIN_PROFILES
    assert spec.metrics == METRICS
    assert spec.n_values == DEFAULT_N


def test_comments_and_blank_lines_only():
    assert parse_config("# nothing\n\n   # here\n") == SweepSpec()


def test_alpha_override_identity():
    spec = parse_config("[signal.mmwave]\nalpha = 1.7\n")
    assert spec.profiles["mmwave"] == MMWAVE


def test_signal_override_changes_profile():
    spec = parse_config("[signal.thz]\ntransmit_power = 2  # watts\n")
    assert spec.profiles["thz"].transmit_power == 2.0
    assert spec.profiles["mmwave"] == MMWAVE


def test_custom_signal_from_base():
    spec = parse_config("[signal.sub6]\nbase = mmwave\nbandwidth = 1e8\n[sweep]\nsignals = sub6\n")
    profile = spec.profiles["sub6"]
    assert profile.name == "sub6"
    assert profile.bandwidth == 1e8
    assert profile.alpha == MMWAVE.alpha
    assert spec.signals == ("sub6",)


def test_sweep_keys():
    spec = parse_config(
        "[sweep]\nprotocols = both\npbft_n = 4:13:3\nraft_n = 3, 5, 9\n"
        "regimes = 6:2, 4:5\nmetrics = ps, consensus\nseed = 42\nmc_samples = 1000\n"
    )
    assert spec.n_values == {"pbft": (4, 7, 10, 13), "raft": (3, 5, 9)}
    assert spec.regimes == ((6.0, 2.0), (4.0, 5.0))
    assert spec.metrics == ("ps", "consensus")
    assert (spec.seed, spec.mc_samples) == (42, 1000)


def test_z_gamma_grid():
    spec = parse_config("[sweep]\nz_db = 2, 4\ngamma = 1, 5\n")
    assert spec.regimes == ((2.0, 1.0), (2.0, 5.0), (4.0, 1.0), (4.0, 5.0))
    assert parse_config("[sweep]\nz_db = 3\n").regimes == ((3.0, 5.0),)


def test_negative_gamma_rejected():
    with pytest.raises(DomainError, match="gamma"):
        parse_config("[sweep]\ngamma = -1\n")


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("[sweep]\nsignals = thz\ncolour = blue\n", "colour", 3),
        ("# hi\n[signal.thz]\n\npower = 1\n", "power", 4),
    ],
)
def test_unknown_key_named_with_line(text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert key in str(info.value)
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "text, line",
    [
        ("[sweep\n", 1),
        ("[sweep]\nseed 4\n", 2),
        ("alpha = 2\n", 1),
        ("[plots]\n", 1),
        ("[signal.thz]\nalpha = steep\n", 2),
        ("[sweep]\n\nmc_samples = many\n", 3),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError, match=f"line {line}"):
        parse_config(text)


@pytest.mark.parametrize(
    "text",
    [
        "[sweep]\nregimes = 6\n",
        "[sweep]\npbft_n = 4:10:0\n",
        "[sweep]\nregimes = 6:2\nz_db = 4\n",
        "[sweep]\nmetrics = colour\n",
        "[sweep]\nsignals = lte\n",
        "[sweep]\nraft_n = 1, 3\n",
        "[signal.thz]\nalpha = -2\n",
        "[signal.x]\nbase = lte\n",
        "[sweep]\nseed = -3\n",
    ],
)
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.conf")


def test_dump_round_trip():
    spec = parse_config(
        "[signal.sub6]\nbase = mmwave\nbandwidth = 1e8\n[sweep]\nsignals = sub6, thz\n"
        "protocols = raft\nraft_n = 3, 4, 9\nregimes = 5.5:0.25\nmetrics = latency\nseed = 7\n"
    )
    assert parse_config(dump_config(spec)) == spec
    assert parse_config(dump_config(SweepSpec())) == SweepSpec()
