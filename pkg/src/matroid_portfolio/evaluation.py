"""Monte Carlo value estimates, brute-force optima and ratio reports.

Estimates are computed over fixed-size blocks of samples.  Block ``j`` uses a
generator seeded by ``(seed, j)`` and partial sums are combined in block
order, so results do not depend on how many worker threads run the blocks.
All portfolios passed to :func:`estimate_many` see the same active sets
(common random numbers).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .matroids import independent_sets
from .model import Instance, Portfolio
from .stochastic import (
    EXACT_ENUMERATION_LIMIT,
    CapacityError,
    ProductDistribution,
    exact_portfolio_value,
)

BLOCK = 1024
DENSE_LIMIT = 1 << 21


@dataclass(frozen=True)
class ValueEstimate:
    mean: float
    ci_half_width: float  # Hoeffding, value range [0, max set size]
    n_samples: int
    seed: int
    std_error: float = 0.0

    def normal_ci(self, z: float = 1.959963984540054) -> tuple[float, float]:
        return self.mean - z * self.std_error, self.mean + z * self.std_error

    def hoeffding_ci(self) -> tuple[float, float]:
        return self.mean - self.ci_half_width, self.mean + self.ci_half_width


def hoeffding_half_width(value_range: float, n_samples: int, delta: float) -> float:
    return value_range * math.sqrt(math.log(2.0 / delta) / (2.0 * n_samples))


def draw_active_block(probs: np.ndarray, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Active (sample index, element) pairs for ``size`` independent draws."""
    nz = np.flatnonzero(probs > 0)
    q = probs[nz]
    if len(nz) * size <= DENSE_LIMIT:
        s, j = np.nonzero(rng.random((size, len(nz))) < q)
        return s, nz[j]
    counts = rng.binomial(size, q)
    rows, elems = [], []
    for j in np.flatnonzero(counts):
        rows.append(rng.choice(size, counts[j], replace=False))
        elems.append(np.full(counts[j], nz[j]))
    if not rows:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(rows), np.concatenate(elems)


class _SetIndex:
    """Element -> containing-set lookup for one portfolio (CSR layout)."""

    def __init__(self, sets: Sequence[Iterable[int]], n: int):
        uniq = list({frozenset(s) for s in sets})
        self.K = len(uniq)
        self.max_size = max((len(s) for s in uniq), default=0)
        sizes = np.fromiter((len(s) for s in uniq), dtype=np.int64, count=self.K)
        elems = np.fromiter((e for s in uniq for e in s), dtype=np.int64, count=int(sizes.sum()))
        owner = np.repeat(np.arange(self.K, dtype=np.int64), sizes)
        order = np.argsort(elems, kind="stable")
        self.indptr = np.concatenate([[0], np.cumsum(np.bincount(elems, minlength=n))])
        self.indices = owner[order]

    def best_counts(self, s: np.ndarray, e: np.ndarray, size: int) -> np.ndarray:
        if self.K == 0:
            return np.zeros(size, dtype=np.int64)
        starts = self.indptr[e]
        lengths = self.indptr[e + 1] - starts
        total = int(lengths.sum())
        if total == 0:
            return np.zeros(size, dtype=np.int64)
        rep_s = np.repeat(s, lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        set_idx = self.indices[np.repeat(starts, lengths) + offsets]
        counts = np.bincount(rep_s * self.K + set_idx, minlength=size * self.K)
        return counts.reshape(size, self.K).max(axis=1)


def estimate_many(
    portfolios: Sequence[Sequence[Iterable[int]]],
    d: ProductDistribution,
    n_samples: int,
    seed: int = 0,
    delta: float = 0.05,
    threads: int = 1,
) -> list[ValueEstimate]:
    """Estimate every portfolio's value on one shared stream of active sets."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    probs = np.asarray(d.probs)
    idx = [_SetIndex(p, len(probs)) for p in portfolios]
    sizes = [BLOCK] * (n_samples // BLOCK)
    if n_samples % BLOCK:
        sizes.append(n_samples % BLOCK)

    def run_block(j: int):
        rng = np.random.default_rng([seed, j])
        s, e = draw_active_block(probs, sizes[j], rng)
        out = []
        for ix in idx:
            v = ix.best_counts(s, e, sizes[j])
            out.append((int(v.sum()), int((v * v).sum())))
        return out

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run_block, range(len(sizes))))
    else:
        partials = [run_block(j) for j in range(len(sizes))]

    results = []
    for i, ix in enumerate(idx):
        total = sum(p[i][0] for p in partials)
        total_sq = sum(p[i][1] for p in partials)
        mean = total / n_samples
        var = max(total_sq / n_samples - mean * mean, 0.0)
        se = math.sqrt(var / max(n_samples - 1, 1)) if n_samples > 1 else 0.0
        hw = hoeffding_half_width(ix.max_size, n_samples, delta)
        results.append(ValueEstimate(mean, hw, n_samples, seed, se))
    return results


def estimate_value(portfolio, d: ProductDistribution, n_samples: int, seed: int = 0, delta: float = 0.05, threads: int = 1) -> ValueEstimate:
    sets = portfolio.sets if isinstance(portfolio, Portfolio) else portfolio
    return estimate_many([sets], d, n_samples, seed, delta, threads)[0]


def optimal_portfolio_bruteforce(
    inst: Instance,
    maximal_only: bool = True,
    max_sets: int = 200,
    max_combinations: int = 1_000_000,
) -> tuple[Portfolio, float]:
    """Best k-subset of (maximal) independent sets under the exact value.

    With ``maximal_only`` only bases are enumerated, which loses nothing
    because the value is monotone in each set.
    """
    m, k = inst.matroid, inst.k
    if m.ground_size > EXACT_ENUMERATION_LIMIT:
        raise CapacityError(f"ground set of {m.ground_size} exceeds the exact guard")
    sets = independent_sets(m, maximal_only=maximal_only)
    if len(sets) > max_sets:
        raise CapacityError(f"{len(sets)} candidate sets exceed max_sets={max_sets}")
    tag = {"algorithm": "bruteforce", "maximal_only": maximal_only}
    if k >= len(sets):
        chosen = list(sets) + [sets[0]] * (k - len(sets))
        return Portfolio(chosen, tag), exact_portfolio_value(sets, inst.dist)
    n_comb = math.comb(len(sets), k)
    if n_comb > max_combinations:
        raise CapacityError(f"C({len(sets)}, {k}) = {n_comb} exceeds max_combinations={max_combinations}")

    n = m.ground_size
    codes = np.arange(1 << n, dtype=np.int64)
    masks = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int32)
    p = inst.probs
    w = np.where(masks, p, 1.0 - p).prod(axis=1)
    incidence = np.zeros((n, len(sets)), dtype=np.int32)
    for j, s in enumerate(sets):
        incidence[list(s), j] = 1
    counts = (masks @ incidence).T  # sets x outcomes

    chunk = max(1, (1 << 23) // (k * len(w)))
    best_val, best_combo = -1.0, None
    it = combinations(range(len(sets)), k)
    while True:
        block = np.array([c for _, c in zip(range(chunk), it)], dtype=np.int64)
        if len(block) == 0:
            break
        vals = counts[block].max(axis=1) @ w
        j = int(np.argmax(vals))
        if vals[j] > best_val + 1e-12:
            best_val, best_combo = float(vals[j]), block[j]
    return Portfolio([sets[i] for i in best_combo], tag), best_val


def portfolio_value(portfolio, d: ProductDistribution, n_samples: int = 100_000, seed: int = 0) -> tuple[float, bool]:
    """Exact value when the footprint allows it, else a Monte Carlo mean."""
    sets = portfolio.sets if isinstance(portfolio, Portfolio) else portfolio
    try:
        return exact_portfolio_value(sets, d), True
    except CapacityError:
        return estimate_value(sets, d, n_samples, seed).mean, False


def ratio_report(inst: Instance, outputs: dict, opt_value: float | None = None, n_samples: int = 100_000) -> dict:
    """Value of each named portfolio and its ratio to the brute-force optimum."""
    if opt_value is None:
        _, opt_value = optimal_portfolio_bruteforce(inst)
    rows = []
    for name, port in outputs.items():
        val, exact = portfolio_value(port, inst.dist, n_samples, inst.config.seed)
        ratio = val / opt_value if opt_value > 0 else 1.0
        rows.append({"algorithm": name, "value": val, "exact": exact, "ratio": ratio})
    return {"opt": opt_value, "rows": rows}


def format_table(rows: list[dict], columns: Sequence[str]) -> str:
    """Aligned plain-text table."""
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)
