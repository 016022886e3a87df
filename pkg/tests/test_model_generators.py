import math

import numpy as np
import pytest

from matroid_portfolio.algorithms import disjoint_baseline
from matroid_portfolio.generators import (
    batch_count_formula,
    gen_batch_portfolio,
    gen_graphic_clique_path,
    gen_random,
    gen_uniform_mixing,
    largest_feasible_batches,
)
from matroid_portfolio.matroids import MalformedInput, UniformMatroid, independent_sets
from matroid_portfolio.model import (
    DependentSet,
    InfeasibleK,
    Instance,
    Portfolio,
    SolverConfig,
    instance_from_json,
    instance_to_json,
)
from matroid_portfolio.stochastic import binomial_pb, expected_max_iid


# model

def test_instance_validation():
    with pytest.raises(MalformedInput):
        Instance(UniformMatroid(3, 1), [0.5, 0.5], 1)
    with pytest.raises(InfeasibleK):
        Instance(UniformMatroid(2, 1), [0.5, 0.5], 0)
    with pytest.raises(InfeasibleK):
        Instance(UniformMatroid(2, 1), [0.5, 0.5], 1.5)


def test_portfolio_validate_reports_index():
    port = Portfolio([[0], [0, 1]])
    with pytest.raises(DependentSet) as info:
        port.validate(UniformMatroid(2, 1))
    assert info.value.index == 1


def test_instance_json_round_trip():
    for kind in ("uniform", "graphic", "partition", "explicit"):
        inst = gen_random(6, 2, 2, "beta", kind, seed=1)
        back = instance_from_json(instance_to_json(inst))
        assert back.k == inst.k and np.allclose(back.probs, inst.probs)
        assert independent_sets(back.matroid) == independent_sets(inst.matroid)


def test_instance_json_errors():
    with pytest.raises(MalformedInput):
        instance_from_json({"matroid": {"kind": "uniform", "rank": 1}, "k": 1})
    with pytest.raises(MalformedInput):
        instance_from_json({"matroid": {"kind": "uniform", "rank": 1}, "probs": [2.0], "k": 1})
    with pytest.raises(InfeasibleK):
        instance_from_json({"matroid": {"kind": "uniform", "rank": 1}, "probs": [0.5], "k": -1})


def test_portfolio_json_shape():
    port = Portfolio([[2, 0], [1]], {"algorithm": "x"})
    obj = port.to_json()
    assert obj == {"sets": [[0, 2], [1]], "provenance": {"algorithm": "x"}}
    assert Portfolio.from_json(obj).sets == port.sets


def test_thread_env(monkeypatch):
    monkeypatch.setenv("PORTFOLIO_THREADS", "3")
    assert SolverConfig().worker_count() == 3
    assert SolverConfig(threads=2).worker_count() == 2


# generators

def test_mixing_parameters():
    inst = gen_uniform_mixing(4)
    p = inst.probs
    assert inst.n == 16 and inst.matroid.r == 4 and inst.k == 4
    assert np.sum(p == 0.25) == 8 and np.sum(p == 1 / 16) == 8
    inst16 = gen_uniform_mixing(16)
    assert inst16.n == 256 and np.sum(inst16.probs == 1 / 16) == 64
    assert np.all((inst16.probs > 0) & (inst16.probs <= 1))


def test_batch_portfolio_structure():
    k = 256
    high = set(range(int(k * math.log2(k))))
    for B in (2, None):
        port = gen_batch_portfolio(k, B)
        b = port.provenance["batches"]
        assert len(port.sets) == k
        assert len(set(port.sets)) == math.comb(b * b, b)
        assert all(len(s) == b * (k // b) and set(s) <= high for s in port.sets)
    assert len(set(gen_batch_portfolio(256, 2).sets)) == 6
    assert math.floor(batch_count_formula(256)) == 1
    assert largest_feasible_batches(256) == 3


def test_batch_portfolio_infeasible():
    with pytest.raises(ValueError):
        gen_batch_portfolio(16, 3)


def test_clique_path_structure():
    inst = gen_graphic_clique_path(9)
    m, p = inst.matroid, inst.probs
    assert m.ground_size == 3 + 5
    assert np.allclose(p[:3], 1 / 3) and np.allclose(p[3:], 1 / 3 - 1e-6)
    assert m.full_rank == (3 - 1) + (9 - 3 - 1)
    n, s = 10_000, 100
    path_exp = (n - s - 1) * (1 / s)
    clique_exp = (s - 1) * (1 / s)
    assert path_exp > clique_exp


def test_clique_path_disjoint_prefers_path():
    inst = gen_graphic_clique_path(16)
    first = set(disjoint_baseline(inst).sets[0])
    path = {e for e, (u, _) in enumerate(inst.matroid.edges) if u >= 4}
    assert path <= first


def test_random_reproducible_and_valid():
    a = gen_random(10, 3, 2, "bimodal", "graphic", seed=4)
    b = gen_random(10, 3, 2, "bimodal", "graphic", seed=4)
    assert instance_to_json(a) == instance_to_json(b)
    for law in ("uniform", "beta", "bimodal"):
        for kind in ("uniform", "graphic", "partition", "explicit"):
            inst = gen_random(8, 3, 1, law, kind, seed=7)
            assert np.all((inst.probs >= 0) & (inst.probs <= 1))
            assert inst.matroid.full_rank == 3
    free = gen_random(5, 5, 1, "uniform", "uniform", seed=0)
    assert free.matroid.is_independent(range(5))
    with pytest.raises(ValueError):
        gen_random(5, 2, 1, "cauchy", "uniform")


def test_mixing_disjoint_value_matches_formula():
    # each disjoint base holds k high elements or k low ones
    k = 16
    inst = gen_uniform_mixing(k)
    port = disjoint_baseline(inst)
    high = int(k * math.log2(k))
    n_high_sets = sum(all(e < high for e in s) for s in port.sets)
    assert n_high_sets == high // k
    assert expected_max_iid(binomial_pb(k, 1 / k), n_high_sets) > 1.0
