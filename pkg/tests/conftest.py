"""Independent oracles shared by the test modules.

These deliberately avoid the package's greedy machinery so that tests compare
two unrelated computations.
"""

from itertools import combinations

import numpy as np
import pytest


def forest_oracle(edges, S) -> bool:
    """Acyclicity by repeated leaf stripping (no union-find)."""
    es = [edges[e] for e in S]
    if any(u == v for u, v in es):
        return False
    while es:
        deg = {}
        for u, v in es:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        keep = [(u, v) for u, v in es if deg[u] > 1 and deg[v] > 1]
        if len(keep) == len(es):
            return False
        es = keep
    return True


def partition_oracle(blocks, capacities, S) -> bool:
    counts = np.bincount([blocks[e] for e in S], minlength=len(capacities)) if S else np.zeros(len(capacities))
    return bool(np.all(counts <= capacities))


def enumerate_value(sets, probs) -> float:
    """E[max_i |S_i & A|] by looping over every outcome of the whole ground set."""
    n = len(probs)
    total = 0.0
    for mask in range(1 << n):
        active = {i for i in range(n) if mask >> i & 1}
        w = 1.0
        for i in range(n):
            w *= probs[i] if i in active else 1 - probs[i]
        total += w * max((len(active & set(s)) for s in sets), default=0)
    return total


def best_k_sets(candidates, k, probs) -> float:
    """Brute-force optimum via the plain enumeration oracle."""
    k = min(k, len(candidates))
    return max(enumerate_value(c, probs) for c in combinations(candidates, k))


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


TRIANGLE = [(0, 1), (1, 2), (2, 0)]
