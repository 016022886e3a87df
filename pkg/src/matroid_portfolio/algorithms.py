"""Portfolio construction: prefix sampling for uniform matroids, base
orderings with column decompositions for general matroids, and baselines."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .crs import ColumnSampler, CRSOrder, UniformPrefixSampler, compute_order, resolve
from .evaluation import estimate_many
from .matroids import (
    Matroid,
    UniformMatroid,
    exchange_bijection,
    independent_sets,
    max_weight_base,
    pad_with_duplicates,
)
from .model import Instance, Portfolio
from .stochastic import ExplicitDistribution

HIGH_PROB_SCALE = 10.0  # column split threshold is HIGH_PROB_SCALE / prefix length


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


SELECTION_STREAM, REPORT_STREAM = 2, 3


def derive_seed(seed: int, stream: int) -> int:
    """Independent evaluation seed for one use of a base seed."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def _pick_best(candidates: list[Portfolio], inst: Instance, stream: int = SELECTION_STREAM) -> Portfolio:
    cfg = inst.config
    ests = estimate_many(
        [c.sets for c in candidates], inst.dist, cfg.eval_samples,
        seed=derive_seed(cfg.seed, stream),
        delta=cfg.delta, threads=cfg.worker_count(),
    )
    best = max(range(len(candidates)), key=lambda i: (ests[i].mean, -i))
    winner = candidates[best]
    winner.estimate = ests[best]
    winner.provenance = {**winner.provenance, "candidates": len(candidates), "seed": cfg.seed}
    return winner


# uniform matroids

def portfolio_from_prefix(prefix: Sequence[int], k: int, r: int, rng: np.random.Generator) -> list[tuple]:
    """k sets, each the distinct elements of r uniform draws from ``prefix``."""
    pre = np.asarray(prefix, dtype=np.int64)
    if len(pre) == 0:
        raise ValueError("prefix must be non-empty")
    if r == 0:
        return [() for _ in range(k)]
    picks = pre[rng.integers(0, len(pre), size=(k, r))]
    return [tuple(np.unique(row).tolist()) for row in picks]


def solve_uniform(inst: Instance) -> Portfolio:
    m = inst.matroid
    if not isinstance(m, UniformMatroid):
        raise TypeError("solve_uniform needs a uniform matroid")
    p, cfg = inst.probs, inst.config
    order = sorted(range(inst.n), key=lambda e: (-p[e], e))
    cands = []
    for i in range(1, inst.n + 1):
        sets = portfolio_from_prefix(order[:i], inst.k, m.r, _rng(cfg.seed, 1, i))
        cands.append(Portfolio(sets, {"algorithm": "uniform", "prefix": i}))
    if not cands:
        return Portfolio([()] * inst.k, {"algorithm": "uniform", "prefix": 0, "seed": cfg.seed})
    # consecutive top-r blocks, so a single unlucky draw cannot lose the best base
    blocks = [tuple(order[j * m.r:(j + 1) * m.r]) for j in range(inst.k)] if m.r else [()] * inst.k
    blocks = [b if len(b) == m.r else blocks[0] for b in blocks]
    cands.append(Portfolio(blocks, {"algorithm": "uniform", "prefix": 0, "candidate": "disjoint"}))
    return _pick_best(cands, inst)


# general matroids

@dataclass
class BaseOrdering:
    """Disjoint bases of a (padded) matroid in order of extraction."""

    bases: list
    probs: np.ndarray
    matroid: Matroid
    original: list  # padded element -> original element

    @property
    def expectations(self) -> list[float]:
        return [float(self.probs[list(b)].sum()) for b in self.bases]

    @property
    def rank(self) -> int:
        return len(self.bases[0]) if self.bases else 0

    def to_original(self, sets: Iterable[Iterable[int]]) -> list[tuple]:
        return [tuple(sorted({self.original[e] for e in s})) for s in sets]


def build_base_ordering(inst: Instance, ell_pad: int, cap: int | None = None) -> BaseOrdering:
    """Pad with ``ell_pad`` parallel copies, then peel off max-expectation bases."""
    if ell_pad < 1:
        raise ValueError("ell_pad must be >= 1")
    pm, pp, original = pad_with_duplicates(inst.matroid, inst.probs, ell_pad)
    r = inst.matroid.full_rank
    ordering = BaseOrdering([], pp, pm, original)
    if r == 0:
        return ordering
    if cap is None:
        cap = math.ceil(pm.ground_size / r)
    remaining = set(range(pm.ground_size))
    while len(ordering.bases) < cap:
        base = max_weight_base(pm, pp, within=remaining)
        if len(base) < r:
            break
        ordering.bases.append(tuple(base))
        remaining.difference_update(base)
    return ordering


@dataclass
class ColumnDecomposition:
    prefix_len: int
    high: list  # elements of the next base with p >= threshold, by decreasing p
    low: list
    columns: dict  # next-base element -> its images in bases 1..prefix_len
    threshold: float

    @property
    def next_base(self) -> list:
        return self.high + self.low

    def column_list(self) -> list[list[int]]:
        return [self.columns[e] for e in self.next_base]


def column_decomposition(ordering: BaseOrdering, ell: int) -> ColumnDecomposition:
    if ell < 1 or len(ordering.bases) < ell + 1:
        raise ValueError(f"column decomposition at prefix {ell} needs {ell + 1} bases, have {len(ordering.bases)}")
    m, p = ordering.matroid, ordering.probs
    nxt = sorted(ordering.bases[ell], key=lambda e: (-p[e], e))
    thr = HIGH_PROB_SCALE / ell
    high = [e for e in nxt if p[e] >= thr]
    low = [e for e in nxt if p[e] < thr]
    maps = [exchange_bijection(m, nxt, ordering.bases[i]) for i in range(ell)]
    columns = {e: [bij[e] for bij in maps] for e in nxt}

    prefix = [e for b in ordering.bases[:ell] for e in b]
    cells = [x for col in columns.values() for x in col]
    assert sorted(cells) == sorted(prefix), "columns do not partition the prefix"
    for i, base in enumerate(ordering.bases[:ell]):
        bset = set(base)
        for e in nxt:
            f = columns[e][i]
            assert m.is_base((bset - {f}) | {e}), f"invalid exchange {e}->{f} in base {i}"
            assert p[f] >= p[e], f"probability domination fails: p[{f}] < p[{e}]"
    return ColumnDecomposition(ell, high, low, columns, thr)


def uniform_portfolio_general(
    ordering: BaseOrdering, ell: int, k: int, rng: np.random.Generator,
    crs_order: CRSOrder | None = None, order_trials: int = 400,
) -> list[tuple]:
    """k sets from r uniform draws over the first ``ell`` bases, resolved by the CRS.

    Sets are in padded element ids.
    """
    m = ordering.matroid
    prefix = [e for b in ordering.bases[:ell] for e in b]
    sampler = UniformPrefixSampler(m.ground_size, prefix, ordering.rank)
    if crs_order is None:
        crs_order = compute_order(m, sampler, order_trials, rng)
    return [tuple(sorted(resolve(m, crs_order, sampler.draw(rng), rng))) for _ in range(k)]


def column_portfolio(
    decomp: ColumnDecomposition, ordering: BaseOrdering, k: int, rng: np.random.Generator,
    crs_order: CRSOrder | None = None, order_trials: int = 400,
) -> list[tuple]:
    """k sets from one uniform element per column, resolved by the CRS."""
    m = ordering.matroid
    sampler = ColumnSampler(m.ground_size, decomp.column_list())
    if crs_order is None:
        crs_order = compute_order(m, sampler, order_trials, rng)
    return [tuple(sorted(resolve(m, crs_order, sampler.draw(rng), rng))) for _ in range(k)]


def _first_bases(ordering: BaseOrdering, k: int) -> list[tuple]:
    bases = ordering.to_original(ordering.bases[:k])
    if bases and len(bases) < k:
        bases += [bases[0]] * (k - len(bases))
    return bases


def _swap_worst(sets: list[tuple], b1: tuple, p: np.ndarray) -> list[tuple] | None:
    if b1 in sets:
        return None
    worst = min(range(len(sets)), key=lambda i: (p[list(sets[i])].sum(), i))
    out = list(sets)
    out[worst] = b1
    return out


def solve_general(inst: Instance) -> Portfolio:
    """Best of the uniform and column portfolios over every prefix of the
    base ordering, the k-disjoint-bases portfolio, and base-swap variants."""
    cfg, k, p = inst.config, inst.k, inst.probs
    ell_pad = cfg.ell_pad if cfg.ell_pad is not None else max(k, 2)
    ordering = build_base_ordering(inst, ell_pad, cfg.base_cap)
    if not ordering.bases:
        return Portfolio([()] * k, {"algorithm": "general", "candidate": "empty", "seed": cfg.seed})

    cands: list[Portfolio] = []
    for ell in range(1, len(ordering.bases)):
        sets = uniform_portfolio_general(ordering, ell, k, _rng(cfg.seed, 1, ell, 0), order_trials=cfg.order_trials)
        cands.append(Portfolio(ordering.to_original(sets), {"algorithm": "general", "candidate": "uniform", "prefix": ell}))
        decomp = column_decomposition(ordering, ell)
        sets = column_portfolio(decomp, ordering, k, _rng(cfg.seed, 1, ell, 1), order_trials=cfg.order_trials)
        cands.append(Portfolio(ordering.to_original(sets), {"algorithm": "general", "candidate": "column", "prefix": ell}))
    cands.append(Portfolio(_first_bases(ordering, k), {"algorithm": "general", "candidate": "disjoint", "prefix": 0}))

    b1 = ordering.to_original([ordering.bases[0]])[0]
    for c in list(cands):
        swapped = _swap_worst(c.sets, b1, p)
        if swapped is not None:
            cands.append(Portfolio(swapped, {**c.provenance, "candidate": c.provenance["candidate"] + "+swap"}))

    best = _pick_best(cands, inst)
    best.validate(inst.matroid)
    return best


def disjoint_baseline(inst: Instance) -> Portfolio:
    """The k greedily extracted disjoint max-expectation bases (padding only if needed)."""
    cfg, k = inst.config, inst.k
    ordering = build_base_ordering(inst, 1, cap=k)
    if len(ordering.bases) < k:
        ordering = build_base_ordering(inst, max(k, 2), cap=k)
    sets = _first_bases(ordering, k) or [()] * k
    port = Portfolio(sets, {"algorithm": "disjoint", "seed": cfg.seed})
    port.validate(inst.matroid)
    return port


def greedy_explicit(solutions: Sequence[Iterable[int]], d: ExplicitDistribution, k: int) -> Portfolio:
    """Greedy marginal-gain selection of k solutions under an explicit support."""
    sols = [frozenset(int(e) for e in s) for s in solutions]
    if not sols:
        raise ValueError("greedy_explicit needs at least one solution")
    vals = np.array([[len(s & a) for a in d.outcomes] for s in sols], dtype=float)
    cur = np.zeros(len(d.outcomes))
    chosen: list[int] = []
    for _ in range(k):
        gains = (np.maximum(vals, cur) - cur) @ d.weights
        free = [i for i in range(len(sols)) if i not in chosen]
        i = max(free, key=lambda j: (gains[j], -j)) if free else 0
        chosen.append(i)
        cur = np.maximum(cur, vals[i])
    return Portfolio([sols[i] for i in chosen], {"algorithm": "greedy-explicit", "picked": chosen, "value": float(cur @ d.weights)})


def solve(inst: Instance, algorithm: str | None = None) -> Portfolio:
    """Dispatch by name; the default picks by matroid kind."""
    if algorithm is None:
        algorithm = "uniform" if isinstance(inst.matroid, UniformMatroid) else "general"
    if algorithm == "uniform":
        return solve_uniform(inst)
    if algorithm == "general":
        return solve_general(inst)
    if algorithm == "disjoint":
        return disjoint_baseline(inst)
    if algorithm == "greedy-explicit":
        if inst.explicit is None:
            d = ExplicitDistribution.from_product(inst.dist)
        else:
            d = inst.explicit
        sols = inst.solutions if inst.solutions is not None else independent_sets(inst.matroid, maximal_only=True)
        return greedy_explicit(sols, d, inst.k)
    raise ValueError(f"unknown algorithm {algorithm!r}")
