import math

import pytest
from hypothesis import given, strategies as st

from wireless_consensus import consensus
from wireless_consensus.consensus import (
    fault_budget,
    pbft_success,
    primary_index,
    raft_success,
)
from wireless_consensus.exceptions import DomainError


def term(m, k, p):
    return math.comb(m, k) * (1 - p) ** k * p ** (m - k)


def pbft_loops(n, p):
    """Nested sums written out term by term."""
    b = (n - 1) // 3
    total = 0.0
    for i in range(b + 1):
        for j in range(b - i + 1):
            for k in range(b - i - j + 1):
                for l in range(b - i - j - k + 1):
                    total += (
                        term(n - 1, i, p)
                        * term(n - 1 - i, j, p)
                        * term(n - i - j, k, p)
                        * term(n - i - j - k, l, p)
                    )
    return total


def raft_loops(n, p):
    f = (n - 1) // 2
    return sum(
        term(n - 1, i, p) * term(n - 1 - i, j, p)
        for i in range(f + 1)
        for j in range(f - i + 1)
    )


@pytest.mark.parametrize(
    "protocol, n, budget, optimal",
    [("pbft", 4, 1, True), ("raft", 7, 3, True), ("pbft", 3, 0, False),
     ("pbft", 52, 17, True), ("raft", 8, 3, False), ("raft", 2, 0, False)],
)
def test_fault_budget(protocol, n, budget, optimal):
    fb = fault_budget(protocol, n)
    assert fb.budget == budget
    assert fb.optimal is optimal


def test_fault_budget_domain():
    with pytest.raises(DomainError):
        fault_budget("pbft", 1)
    with pytest.raises(DomainError):
        fault_budget("paxos", 4)


@pytest.mark.parametrize("view, size, expected", [(0, 4, 0), (5, 4, 1), (4, 4, 0), (11, 7, 4)])
def test_primary_index(view, size, expected):
    assert primary_index(view, size) == expected


def test_primary_index_empty_set():
    with pytest.raises(DomainError):
        primary_index(3, 0)


@pytest.mark.parametrize("n", [4, 7, 10, 31])
def test_pbft_perfect_links(n):
    result = pbft_success(n, 1.0)
    assert result.total == 1.0
    assert all(v == 1.0 for _, v in result.per_stage)
    assert [label for label, _ in result.per_stage] == ["pre-prepare", "prepare", "commit", "reply"]


def test_pbft_dead_links():
    assert pbft_success(4, 0.0).total == 0.0


def test_raft_examples():
    assert raft_success(7, 1.0).total == 1.0
    assert all(v == 1.0 for _, v in raft_success(7, 1.0).per_stage)
    assert raft_success(3, 0.0).total == 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
@pytest.mark.parametrize("p", [0.0, 0.1, 0.5, 0.77, 0.9, 0.99, 1.0])
def test_exact_enumeration_small_n(n, p):
    assert pbft_success(n, p).total == pytest.approx(pbft_loops(n, p), abs=1e-12)
    assert raft_success(n, p).total == pytest.approx(raft_loops(n, p), abs=1e-12)


@pytest.mark.parametrize("n", [13, 22, 40, 61, 64, 70])
@pytest.mark.parametrize("p", [0.6, 0.9, 0.97])
def test_enumeration_larger_n(n, p):
    # n > 60 exercises the log-space binomial path
    assert pbft_success(n, p).total == pytest.approx(pbft_loops(n, p), rel=1e-10, abs=1e-300)
    assert raft_success(n, p).total == pytest.approx(raft_loops(n, p), rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("n", [61, 100, 400])
def test_log_space_matches_direct_path(monkeypatch, n):
    log_space = pbft_success(n, 0.95).total, raft_success(n, 0.8).total
    monkeypatch.setattr(consensus, "_LOG_SPACE_THRESHOLD", 10**9)
    direct = pbft_success(n, 0.95).total, raft_success(n, 0.8).total
    assert log_space == pytest.approx(direct, rel=1e-11)


@pytest.mark.parametrize("m", [1, 3, 9, 30, 120])
@pytest.mark.parametrize("p", [0.1, 0.5, 0.93])
def test_full_range_binomial_terms_sum_to_one(m, p):
    for log_space in (False, True):
        pmf = consensus._pmf_table(m, p, m, log_space)
        assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-12)


def test_stage_breakdown_multiplies_to_total():
    result = pbft_success(13, 0.83)
    assert math.prod(v for _, v in result.per_stage) == pytest.approx(result.total, rel=1e-12)
    assert result.first_stage == pytest.approx(
        sum(term(12, i, 0.83) for i in range(5)), rel=1e-12
    )
    assert result.geometric_stage_mean == pytest.approx(result.total**0.25)


@given(st.integers(min_value=2, max_value=60), st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1))
def test_totals_monotone_in_p(n, p1, p2):
    lo, hi = sorted((p1, p2))
    for fn in (pbft_success, raft_success):
        a, b = fn(n, lo).total, fn(n, hi).total
        assert 0.0 <= a <= 1.0 and 0.0 <= b <= 1.0
        assert a <= b + 1e-15


@pytest.mark.parametrize("n", range(4, 53, 3))
@pytest.mark.parametrize("p", [0.5, 0.7, 0.9, 0.99])
def test_raft_at_least_pbft(n, p):
    assert raft_success(n, p).total >= pbft_success(n, p).total


@pytest.mark.parametrize("p", [-0.1, 1.1, math.nan])
def test_probability_domain(p):
    with pytest.raises(DomainError):
        pbft_success(4, p)
    with pytest.raises(DomainError):
        raft_success(4, p)
