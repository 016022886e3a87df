"""Instance families: the mixing counterexample, its batch portfolio, the
clique-plus-path graph, and seeded random instances."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .matroids import ExplicitMatroid, GraphicMatroid, PartitionMatroid, UniformMatroid, independent_sets
from .model import Instance, Portfolio

PROB_LAWS = ("uniform", "beta", "bimodal")
MATROID_KINDS = ("uniform", "graphic", "partition", "explicit")


def gen_uniform_mixing(k: int) -> Instance:
    """Rank-k uniform matroid on k^2 elements; the first floor(k log2 k) are
    active w.p. 1/k, the rest w.p. 1/k^2."""
    if k < 4:
        raise ValueError("gen_uniform_mixing needs k >= 4")
    n = k * k
    high = int(math.floor(k * math.log2(k)))
    probs = np.full(n, 1.0 / (k * k))
    probs[:high] = 1.0 / k
    return Instance(UniformMatroid(n, k), probs, k)


def batch_count_formula(k: int) -> float:
    """Asymptotic batch count (1/2) log k / log log k, logs base 2."""
    return 0.5 * math.log2(k) / math.log2(math.log2(k))


def largest_feasible_batches(k: int) -> int:
    """Largest B with C(B^2, B) <= k and B <= log2 k (enough high rows)."""
    B = 1
    while math.comb((B + 1) ** 2, B + 1) <= k and B + 1 <= math.log2(k):
        B += 1
    return B


def gen_batch_portfolio(k: int, n_batches: int | None = None) -> Portfolio:
    """All selections of B batches out of a B x B grid of high elements.

    Row ``i`` holds high elements ``i*k .. i*k + k - 1`` of
    :func:`gen_uniform_mixing`, cut into B batches of ``k // B``.  The
    ``C(B^2, B)`` selections are padded to k sets by repeating the first.
    """
    B = largest_feasible_batches(k) if n_batches is None else int(n_batches)
    if B < 1:
        raise ValueError("need at least one batch")
    n_sets = math.comb(B * B, B)
    if n_sets > k:
        raise ValueError(f"C(B^2, B) = {n_sets} exceeds k = {k} for B = {B}")
    if B * k > math.floor(k * math.log2(k)):
        raise ValueError(f"B = {B} rows need {B * k} high elements")
    width = k // B
    batches = [
        tuple(range(row * k + j * width, row * k + (j + 1) * width))
        for row in range(B)
        for j in range(B)
    ]
    sets = [tuple(e for b in combo for e in batches[b]) for combo in combinations(range(B * B), B)]
    sets += [sets[0]] * (k - len(sets))
    return Portfolio(sets, {"algorithm": "batch-mixing", "batches": B, "batch_size": width, "distinct_sets": n_sets})


def gen_graphic_clique_path(n: int, k: int = 2, eps: float = 1e-6) -> Instance:
    """Clique on sqrt(n) vertices (edge prob 1/sqrt(n)) plus a disjoint path on
    n - sqrt(n) vertices (edge prob 1/sqrt(n) - eps)."""
    s = math.isqrt(n)
    if s * s != n or n < 9:
        raise ValueError("n must be a perfect square >= 9")
    edges = list(combinations(range(s), 2))
    n_clique = len(edges)
    edges += [(v, v + 1) for v in range(s, n - 1)]
    probs = np.full(len(edges), 1.0 / s - eps)
    probs[:n_clique] = 1.0 / s
    return Instance(GraphicMatroid(n, edges), probs, k)


def _probs(rng: np.random.Generator, n: int, law: str) -> np.ndarray:
    if law == "uniform":
        return rng.random(n)
    if law == "beta":
        return rng.beta(0.5, 2.0, size=n)
    if law == "bimodal":
        high = rng.random(n) < 0.2
        return np.where(high, rng.uniform(0.5, 1.0, n), rng.uniform(0.0, 0.1, n))
    raise ValueError(f"unknown probability law {law!r}; choose from {PROB_LAWS}")


def gen_random(n: int, r: int, k: int, law: str = "uniform", kind: str = "uniform", seed: int = 0) -> Instance:
    """Reproducible random instance of rank ``r`` (graphic and partition
    kinds reach rank r exactly when n >= r)."""
    if not 0 <= r <= n:
        raise ValueError("need 0 <= r <= n")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        m = UniformMatroid(n, r)
    elif kind == "graphic":
        # random spanning tree on r+1 vertices, then random extra edges
        verts = rng.permutation(r + 1)
        edges = [(int(verts[i]), int(verts[rng.integers(0, i)])) for i in range(1, r + 1)]
        while len(edges) < n:
            u, v = rng.choice(r + 1, size=2, replace=False) if r >= 1 else (0, 0)
            edges.append((int(u), int(v)))
        order = rng.permutation(len(edges))
        m = GraphicMatroid(r + 1, [edges[i] for i in order])
    elif kind in ("partition", "explicit"):
        blocks = np.concatenate([np.arange(r), rng.integers(0, max(r, 1), size=n - r)]) if r else np.zeros(n, int)
        blocks = rng.permutation(blocks)
        m = PartitionMatroid(blocks.tolist(), [1] * max(r, 1) if r else [0])
        if kind == "explicit":
            if n > 12:
                raise ValueError("explicit random instances limited to n <= 12")
            m = ExplicitMatroid(n, independent_sets(m, maximal_only=True))
    else:
        raise ValueError(f"unknown matroid kind {kind!r}; choose from {MATROID_KINDS}")
    return Instance(m, _probs(rng, n, law), k)
