"""Contention resolution for correlated samplers over a matroid.

A sampler proposes a random set ``R``; :func:`resolve` trims it to an
independent subset.  The processing order is built once per sampler by
:func:`compute_order`, filling positions from the back with the element least
likely to be spanned by the rest of a (thinned) sample.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .matroids import Matroid

ORDER_THIN_KEEP = 0.25  # sampling with parameter p/4 while building the order
RESOLVE_DROP = 0.25  # each element of R is discarded with this probability


class Sampler:
    """Random subsets of ``range(n)`` with known marginals."""

    n: int

    def marginals(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.marginals() > 0)

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return self.draw_batch(rng, 1)[0]

    def draw_batch(self, rng: np.random.Generator, count: int) -> list[np.ndarray]:
        raise NotImplementedError


class ProductSampler(Sampler):
    """Independent inclusion with the given probabilities."""

    def __init__(self, probs: Sequence[float]):
        self.probs = np.asarray(probs, dtype=float)
        self.n = len(self.probs)

    def marginals(self):
        return self.probs.copy()

    def draw_batch(self, rng, count):
        hits = rng.random((count, self.n)) < self.probs
        return [np.flatnonzero(row) for row in hits]


class UniformPrefixSampler(Sampler):
    """``draws`` uniform picks with replacement from ``prefix``, duplicates removed."""

    def __init__(self, n: int, prefix: Sequence[int], draws: int):
        self.n = n
        self.prefix = np.asarray(sorted(prefix), dtype=np.int64)
        self.draws = int(draws)
        if len(self.prefix) == 0:
            raise ValueError("prefix must be non-empty")

    def marginals(self):
        out = np.zeros(self.n)
        out[self.prefix] = 1.0 - (1.0 - 1.0 / len(self.prefix)) ** self.draws
        return out

    def draw_batch(self, rng, count):
        picks = self.prefix[rng.integers(0, len(self.prefix), size=(count, self.draws))]
        return [np.unique(row) for row in picks]


class ColumnSampler(Sampler):
    """One uniform element from each column; columns must be disjoint."""

    def __init__(self, n: int, columns: Sequence[Sequence[int]]):
        self.n = n
        self.columns = [np.asarray(c, dtype=np.int64) for c in columns]
        if any(len(c) == 0 for c in self.columns):
            raise ValueError("empty column")
        self._rect = len({len(c) for c in self.columns}) == 1
        if self._rect:
            self._table = np.stack(self.columns) if self.columns else np.zeros((0, 1), dtype=np.int64)

    def marginals(self):
        out = np.zeros(self.n)
        for c in self.columns:
            out[c] += 1.0 / len(c)
        return out

    def draw_batch(self, rng, count):
        if not self.columns:
            return [np.zeros(0, dtype=np.int64) for _ in range(count)]
        if self._rect:
            width = self._table.shape[1]
            idx = rng.integers(0, width, size=(count, len(self.columns)))
            picks = self._table[np.arange(len(self.columns)), idx]
        else:
            picks = np.stack([c[rng.integers(0, len(c), size=count)] for c in self.columns], axis=1)
        return [np.sort(row) for row in picks]


def dominated_by_base_average(marginals: np.ndarray, bases: Sequence[Iterable[int]], tol: float = 1e-12) -> bool:
    """True if ``marginals`` is coordinatewise below the average base indicator.

    The average of base indicators lies in the matroid polytope, which is
    down-closed, so this certifies polytope membership constructively.
    """
    avg = np.zeros(len(marginals))
    for b in bases:
        avg[list(b)] += 1.0 / len(bases)
    return bool(np.all(np.asarray(marginals) <= avg + tol))


@dataclass(frozen=True)
class CRSOrder:
    order: tuple
    trials_used: int
    position: dict = field(repr=False, compare=False, hash=False)

    @classmethod
    def from_sequence(cls, order: Iterable[int], trials_used: int = 0) -> "CRSOrder":
        seq = tuple(int(e) for e in order)
        if len(set(seq)) != len(seq):
            raise ValueError("order must not repeat elements")
        return cls(seq, trials_used, {e: i for i, e in enumerate(seq)})


def _spanned_flags(m: Matroid, R: list[int]) -> list[bool]:
    """For each e in R: is e in span(R - e)?"""
    if len(R) == 1:
        return [m.rank(R) == 0]
    full = m.rank(R)
    return [m.rank(R[:i] + R[i + 1 :]) == full for i in range(len(R))]


def spanned_given_present(
    m: Matroid, sampler: Sampler, rng: np.random.Generator, n_trials: int,
    keep: set | None = None, thin: float = ORDER_THIN_KEEP,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo counts of (e in R_x, e in span(R_x - e) and e in R_x).

    ``R_x`` is a sampler draw intersected with ``keep`` and then thinned to
    keep each element with probability ``thin``.
    """
    appear = np.zeros(m.ground_size, dtype=np.int64)
    spanned = np.zeros(m.ground_size, dtype=np.int64)
    draws = sampler.draw_batch(rng, n_trials)
    lengths = [len(d) for d in draws]
    coins = rng.random(sum(lengths))
    pos = 0
    for d, ln in zip(draws, lengths):
        mask = coins[pos : pos + ln] < thin
        pos += ln
        R = [int(e) for e in d[mask] if keep is None or int(e) in keep]
        if not R:
            continue
        appear[R] += 1
        for e, s in zip(R, _spanned_flags(m, R)):
            if s:
                spanned[e] += 1
    return appear, spanned


def compute_order(m: Matroid, sampler: Sampler, n_trials: int = 400, rng: np.random.Generator | None = None) -> CRSOrder:
    """Build the resolution order for ``sampler``.

    Each round samples ``n_trials`` sets restricted to the unplaced elements,
    picks the element least often spanned by the rest of the sample (given
    that it was sampled; 0 when never sampled; ties by lower id) and puts it
    in the last free position.  Elements the sampler never proposes cannot
    affect resolution and are appended after the ordered support.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    support = [int(e) for e in sampler.support]
    remaining = set(support)
    placed: list[int] = []
    trials = 0
    while remaining:
        appear, spanned = spanned_given_present(m, sampler, rng, n_trials, keep=remaining)
        trials += n_trials
        best, best_val = -1, np.inf
        for e in sorted(remaining):
            val = spanned[e] / appear[e] if appear[e] else 0.0
            if val < best_val:
                best, best_val = e, val
        placed.append(best)
        remaining.discard(best)
    rest = sorted(set(range(m.ground_size)) - set(support))
    return CRSOrder.from_sequence(placed[::-1] + rest, trials)


def resolve(m: Matroid, order: CRSOrder, R: Iterable[int], rng: np.random.Generator) -> frozenset:
    """Drop each element of ``R`` w.p. 1/4, then run greedy in ``order``."""
    items = sorted(set(int(e) for e in R))
    if not items:
        return frozenset()
    keep = rng.random(len(items)) >= RESOLVE_DROP
    pos = order.position
    survivors = sorted((e for e, k in zip(items, keep) if k), key=pos.__getitem__)
    return frozenset(m.greedy(survivors))
