"""Activation distributions and exact Poisson-binomial machinery."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

EXACT_ENUMERATION_LIMIT = 22


class CapacityError(RuntimeError):
    """An exact computation would exceed its enumeration guard."""


@dataclass(frozen=True)
class ProductDistribution:
    """Each element is active independently with probability ``probs[e]``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).copy()
        if p.ndim != 1:
            raise ValueError("probs must be a vector")
        if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n(self) -> int:
        return len(self.probs)

    def sample(self, rng: np.random.Generator) -> frozenset:
        return frozenset(np.flatnonzero(rng.random(self.n) < self.probs).tolist())


@dataclass(frozen=True)
class ExplicitDistribution:
    """Finite support of ``(active set, probability)`` outcomes."""

    outcomes: tuple
    weights: np.ndarray

    def __init__(self, support: Iterable[tuple[Iterable[int], float]]):
        outs, ws = [], []
        for active, w in support:
            outs.append(frozenset(int(e) for e in active))
            ws.append(float(w))
        w = np.asarray(ws, dtype=float)
        if len(w) == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("explicit support weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "outcomes", tuple(outs))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_cdf", np.cumsum(w))

    def sample(self, rng: np.random.Generator) -> frozenset:
        u = rng.random() * self._cdf[-1]
        idx = int(np.searchsorted(self._cdf, u, side="right"))
        return self.outcomes[min(idx, len(self.outcomes) - 1)]

    def value(self, portfolio: Sequence[Iterable[int]]) -> float:
        """Exact expected best-set value over the support."""
        sets = [frozenset(s) for s in portfolio]
        if not sets:
            return 0.0
        best = np.array([max(len(s & a) for s in sets) for a in self.outcomes], dtype=float)
        return float(best @ self.weights)

    @classmethod
    def from_product(cls, d: ProductDistribution) -> "ExplicitDistribution":
        """Enumerate all ``2**n`` outcomes of a small product distribution."""
        if d.n > 16:
            raise CapacityError("explicit expansion of a product limited to 16 elements")
        masks, w = _enumerate_outcomes(d.probs)
        support = [(np.flatnonzero(row).tolist(), wt) for row, wt in zip(masks, w) if wt > 0]
        return cls(support)


def sample_active_set(d: ProductDistribution | ExplicitDistribution, rng: np.random.Generator) -> frozenset:
    return d.sample(rng)


@dataclass(frozen=True)
class PBDistribution:
    pmf: np.ndarray
    probs: tuple

    @property
    def mean(self) -> float:
        return float(np.arange(len(self.pmf)) @ self.pmf)

    def cdf(self) -> np.ndarray:
        return np.minimum(np.cumsum(self.pmf), 1.0)


def pb_pmf(probs: Sequence[float]) -> PBDistribution:
    """Exact pmf of a sum of independent Bernoullis by repeated convolution."""
    ps = [float(p) for p in probs]
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise ValueError("probabilities must lie in [0, 1]")
    pmf = np.zeros(len(ps) + 1)
    pmf[0] = 1.0
    for i, p in enumerate(ps):
        # right-hand side is materialized before the slice is overwritten
        pmf[1 : i + 2] = pmf[1 : i + 2] * (1 - p) + pmf[: i + 1] * p
        pmf[0] *= 1 - p
    np.clip(pmf, 0.0, None, out=pmf)
    return PBDistribution(pmf, tuple(ps))


def binomial_pb(n: int, p: float) -> PBDistribution:
    return pb_pmf([p] * n)


def expected_max_iid(pb: PBDistribution, k: int) -> float:
    """E[max of k iid draws] = sum_t (1 - F(t-1)^k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    F = pb.cdf()[:-1]
    return float(np.sum(1.0 - F**k))


def prob_max_at_least(pb: PBDistribution, k: int, threshold: float) -> float:
    """Pr[max of k iid draws >= threshold]."""
    t = int(np.ceil(threshold))
    if t <= 0:
        return 1.0
    if t >= len(pb.pmf):
        return 0.0
    return float(1.0 - pb.cdf()[t - 1] ** k)


def _enumerate_outcomes(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = len(probs)
    codes = np.arange(1 << m, dtype=np.int64)
    masks = ((codes[:, None] >> np.arange(m)) & 1).astype(bool)
    w = np.where(masks, probs, 1.0 - probs).prod(axis=1) if m else np.ones(1)
    return masks, w


def exact_portfolio_value(portfolio: Sequence[Iterable[int]], d: ProductDistribution) -> float:
    """Exact E[max_i |S_i & A|] by enumerating the portfolio's footprint."""
    sets = [sorted(set(int(e) for e in s)) for s in portfolio]
    if not sets:
        return 0.0
    footprint = sorted({e for s in sets for e in s})
    if len(footprint) > EXACT_ENUMERATION_LIMIT:
        raise CapacityError(
            f"portfolio touches {len(footprint)} elements (> {EXACT_ENUMERATION_LIMIT}); "
            "use the Monte Carlo estimator instead"
        )
    pos = {e: i for i, e in enumerate(footprint)}
    m = len(footprint)
    p = d.probs[footprint]
    incidence = np.zeros((m, len(sets)), dtype=np.int8)
    for j, s in enumerate(sets):
        incidence[[pos[e] for e in s], j] = 1
    total = 0.0
    chunk = 1 << 16
    for start in range(0, 1 << m, chunk):
        codes = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        masks = ((codes[:, None] >> np.arange(m)) & 1).astype(np.int8)
        w = np.where(masks, p, 1.0 - p).prod(axis=1)
        best = (masks.astype(np.int32) @ incidence).max(axis=1)
        total += float(best @ w)
    return total
