import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroid_portfolio.crs import (
    ColumnSampler,
    CRSOrder,
    ProductSampler,
    UniformPrefixSampler,
    compute_order,
    dominated_by_base_average,
    resolve,
)
from matroid_portfolio.matroids import GraphicMatroid, UniformMatroid, independent_sets


def test_free_matroid_order_is_descending(rng):
    m = UniformMatroid(5, 5)
    order = compute_order(m, ProductSampler([0.5] * 5), 50, rng)
    assert order.order == (4, 3, 2, 1, 0)


def test_single_element_order(rng):
    order = compute_order(UniformMatroid(1, 1), ProductSampler([0.3]), 10, rng)
    assert order.order == (0,)


def test_rank_one_two_elements_follows_analytic_oracle(rng):
    # Pr[e spanned | e present] = Pr[other present after thinning] = p_other / 4
    p = np.array([0.9, 0.1])
    spanned = {0: p[1] / 4, 1: p[0] / 4}
    last = min(spanned, key=lambda e: (spanned[e], e))
    order = compute_order(UniformMatroid(2, 1), ProductSampler(p), 20_000, rng)
    assert order.order[-1] == last == 0


def test_order_is_deterministic_given_seed():
    m = GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    s = UniformPrefixSampler(5, range(5), 3)
    a = compute_order(m, s, 100, np.random.default_rng(3))
    b = compute_order(m, s, 100, np.random.default_rng(3))
    assert a.order == b.order


def test_order_covers_ground_set(rng):
    m = UniformMatroid(6, 2)
    order = compute_order(m, UniformPrefixSampler(6, [1, 4], 2), 20, rng)
    assert sorted(order.order) == list(range(6))
    assert set(order.order[:2]) == {1, 4}


def test_order_rejects_zero_trials(rng):
    with pytest.raises(ValueError):
        compute_order(UniformMatroid(2, 1), ProductSampler([0.5, 0.5]), 0, rng)


def test_from_sequence_rejects_repeats():
    with pytest.raises(ValueError):
        CRSOrder.from_sequence([0, 1, 0])


def test_resolve_empty(rng):
    order = CRSOrder.from_sequence([0, 1])
    assert resolve(UniformMatroid(2, 1), order, [], rng) == frozenset()


def test_resolve_single_free_element_keeps_three_quarters(rng):
    m, order = UniformMatroid(1, 1), CRSOrder.from_sequence([0])
    kept = sum(bool(resolve(m, order, [0], rng)) for _ in range(100_000))
    assert abs(kept / 100_000 - 0.75) <= 0.01


def test_resolve_parallel_pair_keeps_earlier(rng):
    m = UniformMatroid(2, 1)
    order = CRSOrder.from_sequence([1, 0])
    outs = {resolve(m, order, [0, 1], rng) for _ in range(2000)}
    # both survive w.p. 9/16; then only element 1 may be kept
    assert frozenset({1}) in outs and frozenset({0, 1}) not in outs
    assert outs <= {frozenset(), frozenset({0}), frozenset({1})}


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 5), st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=8), st.integers(0, 2**31))
def test_resolve_feasible_and_subset(v, edges, seed):
    edges = [(a % v, b % v) for a, b in edges]
    m = GraphicMatroid(v, edges)
    rng = np.random.default_rng(seed)
    order = CRSOrder.from_sequence(rng.permutation(m.ground_size))
    for _ in range(20):
        R = set(np.flatnonzero(rng.random(m.ground_size) < 0.6).tolist())
        out = resolve(m, order, R, rng)
        assert out <= R and m.is_independent(out)


def test_uniform_prefix_marginals(rng):
    s = UniformPrefixSampler(12, range(10), 10)
    expected = 1 - (1 - 1 / 10) ** 10
    assert np.allclose(s.marginals()[:10], expected)
    hits = np.zeros(12)
    draws = s.draw_batch(rng, 20_000)
    for d in draws:
        hits[d] += 1
    assert np.all(np.abs(hits[:10] / 20_000 - expected) < 0.015)
    assert hits[10:].sum() == 0
    assert abs(np.mean([len(d) for d in draws]) - 10 * expected) < 0.1


def test_column_sampler_transversal_and_marginals(rng):
    cols = [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]
    s = ColumnSampler(12, cols)
    hits = np.zeros(12)
    for d in s.draw_batch(rng, 100_000):
        assert len(d) == 3 and all(len(set(d) & set(c)) == 1 for c in cols)
        hits[d] += 1
    assert np.allclose(s.marginals(), 0.25)
    assert np.all(np.abs(hits / 100_000 - 0.25) <= 0.005)


def test_ragged_columns(rng):
    s = ColumnSampler(5, [[0], [1, 2, 3, 4]])
    for d in s.draw_batch(rng, 50):
        assert 0 in d and len(d) == 2


def test_halved_marginals_in_polytope():
    # prefix samplers over l disjoint bases: halved marginals are below the base average
    m = GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])
    bases = [(0, 1, 2), (3, 4, 5)]
    prefix = [e for b in bases for e in b]
    for s in (UniformPrefixSampler(6, prefix, 3), ColumnSampler(6, [[0, 3], [1, 4], [2, 5]])):
        assert dominated_by_base_average(s.marginals() / 2, bases)
    assert all(m.is_base(b) for b in bases)
    assert len(independent_sets(m, maximal_only=True)) == 16


def test_end_to_end_retention_small(rng):
    m = UniformMatroid(8, 2)
    s = UniformPrefixSampler(8, range(8), 2)
    order = compute_order(m, s, 200, rng)
    in_r = np.zeros(8)
    kept = np.zeros(8)
    for R in s.draw_batch(rng, 20_000):
        out = resolve(m, order, R, rng)
        in_r[R] += 1
        kept[list(out)] += 1
    q = kept / in_r
    sigma = np.sqrt(q * (1 - q) / in_r)
    assert np.all(q >= 1 / 8 - 3 * sigma)
    # free-ish regime: at most 2 distinct draws, rank 2, so only thinning drops
    assert np.allclose(q, 0.75, atol=4 * sigma.max() + 0.01)
    assert math.isclose(s.marginals()[0], 1 - (7 / 8) ** 2)
