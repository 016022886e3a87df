import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import enumerate_value
from matroid_portfolio.stochastic import (
    CapacityError,
    ExplicitDistribution,
    ProductDistribution,
    binomial_pb,
    exact_portfolio_value,
    expected_max_iid,
    pb_pmf,
    prob_max_at_least,
)

probs_st = st.lists(st.floats(0, 1), max_size=10)


def pmf_by_enumeration(p):
    n = len(p)
    out = np.zeros(n + 1)
    for mask in range(1 << n):
        w = 1.0
        for i in range(n):
            w *= p[i] if mask >> i & 1 else 1 - p[i]
        out[bin(mask).count("1")] += w
    return out


def test_product_sampling_extremes(rng):
    assert ProductDistribution(np.ones(5)).sample(rng) == frozenset(range(5))
    assert ProductDistribution(np.zeros(5)).sample(rng) == frozenset()


def test_product_sampling_frequency(rng):
    d = ProductDistribution(np.full(4, 0.5))
    hits = np.zeros(4)
    for _ in range(100_000):
        hits[list(d.sample(rng))] += 1
    assert np.all(np.abs(hits / 100_000 - 0.5) <= 0.01)


@pytest.mark.parametrize("bad", [[1.2], [-0.1], [float("nan")], [[0.5]]])
def test_product_rejects_bad_probs(bad):
    with pytest.raises(ValueError):
        ProductDistribution(np.asarray(bad))


def test_pmf_examples():
    assert np.allclose(pb_pmf([0.5, 0.5]).pmf, [0.25, 0.5, 0.25])
    assert np.allclose(pb_pmf([]).pmf, [1.0])
    assert np.allclose(pb_pmf([1.0, 0.3]).pmf, [0.0, 0.7, 0.3])


@settings(max_examples=80, deadline=None)
@given(probs_st)
def test_pmf_matches_enumeration(p):
    assert np.allclose(pb_pmf(p).pmf, pmf_by_enumeration(p), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.floats(0, 1))
def test_binomial_matches_closed_form(n, p):
    exact = [math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(n + 1)]
    assert np.allclose(binomial_pb(n, p).pmf, exact, atol=1e-12)


def test_expected_max_examples():
    pb = pb_pmf([0.3, 0.6, 0.2])
    assert expected_max_iid(pb, 1) == pytest.approx(1.1)
    assert expected_max_iid(pb_pmf([0.5]), 2) == pytest.approx(0.75)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=4), st.integers(1, 3))
def test_expected_max_by_joint_enumeration(p, k):
    # joint pmf of k iid copies, enumerated directly
    pmf = pmf_by_enumeration(p)
    vals = np.arange(len(pmf))
    grids = np.meshgrid(*([vals] * k), indexing="ij")
    weights = np.ones_like(grids[0], dtype=float)
    for g in grids:
        weights = weights * pmf[g]
    exact = float((np.maximum.reduce(grids) * weights).sum())
    assert expected_max_iid(pb_pmf(p), k) == pytest.approx(exact, abs=1e-10)


def test_expected_max_monte_carlo(rng):
    k, n = 4, 3
    draws = rng.binomial(n, 0.5, size=(1_000_000, k)).max(axis=1)
    sigma = draws.std() / math.sqrt(len(draws))
    assert abs(expected_max_iid(binomial_pb(n, 0.5), k) - draws.mean()) <= 3 * sigma


def test_prob_max_at_least():
    pb = pb_pmf([0.5])
    assert prob_max_at_least(pb, 2, 1) == pytest.approx(0.75)
    assert prob_max_at_least(pb, 2, 0) == 1.0
    assert prob_max_at_least(pb, 2, 2) == 0.0


def test_portfolio_value_examples():
    p = np.array([0.2, 0.7, 0.4])
    d = ProductDistribution(p)
    assert exact_portfolio_value([[0, 2]], d) == pytest.approx(0.6)
    assert exact_portfolio_value([[0, 2]] * 4, d) == pytest.approx(0.6)
    assert exact_portfolio_value([[0], [1]], ProductDistribution(np.array([0.5, 0.5]))) == pytest.approx(0.75)
    assert exact_portfolio_value([], d) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0, 1), min_size=n, max_size=n),
    st.lists(st.sets(st.integers(0, n - 1)), min_size=1, max_size=4),
)))
def test_portfolio_value_matches_enumeration(args):
    p, sets = args
    got = exact_portfolio_value(sets, ProductDistribution(np.asarray(p)))
    assert got == pytest.approx(enumerate_value(sets, p), abs=1e-10)


def test_portfolio_value_guard():
    d = ProductDistribution(np.full(30, 0.5))
    with pytest.raises(CapacityError):
        exact_portfolio_value([range(23)], d)


def test_explicit_distribution(rng):
    d = ExplicitDistribution([([0, 1], 0.25), ([2], 0.75)])
    assert d.value([[0, 1]]) == pytest.approx(0.5)
    assert d.value([[0, 1], [2]]) == pytest.approx(1.25)
    seen = [d.sample(rng) for _ in range(4000)]
    assert abs(sum(s == {2} for s in seen) / 4000 - 0.75) < 0.03
    with pytest.raises(ValueError):
        ExplicitDistribution([([0], 0.5)])


def test_explicit_from_product_agrees():
    p = np.array([0.3, 0.9, 0.5])
    prod = ProductDistribution(p)
    expl = ExplicitDistribution.from_product(prod)
    sets = [[0, 1], [1, 2]]
    assert expl.value(sets) == pytest.approx(exact_portfolio_value(sets, prod))
