"""Matroid representations and oracle operations.

Every matroid here is over a dense ground set ``range(n)`` and is immutable
after construction.  The one primitive subclasses must provide is
:meth:`Matroid.greedy`, which scans a sequence and keeps each element that
does not create a dependency; rank, independence and span all reduce to it.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


class MalformedInput(ValueError):
    """Element id out of range, or a structurally invalid matroid description."""


class UnionFind:
    """Disjoint sets over ``range(n)`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        """Merge the sets of ``i`` and ``j``; False if they were already joined."""
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        return True


class Matroid:
    """Base class: independence oracle over ``range(ground_size)``."""

    kind = "abstract"

    def __init__(self, ground_size: int):
        if ground_size < 0:
            raise MalformedInput("ground size must be nonnegative")
        self.ground_size = int(ground_size)

    # subclasses override this
    def _greedy(self, seq: Sequence[int]) -> list[int]:
        raise NotImplementedError

    def _check(self, elements: Iterable[int]) -> list[int]:
        out = [int(e) for e in elements]
        n = self.ground_size
        for e in out:
            if e < 0 or e >= n:
                raise MalformedInput(f"element {e} outside ground set of size {n}")
        return out

    def greedy(self, seq: Iterable[int]) -> list[int]:
        """Scan ``seq`` in order, keeping each element that stays independent.

        Repeated elements are skipped after their first occurrence.
        """
        seen: set[int] = set()
        uniq = []
        for e in self._check(seq):
            if e not in seen:
                seen.add(e)
                uniq.append(e)
        return self._greedy(uniq)

    def is_independent(self, S: Iterable[int]) -> bool:
        items = set(self._check(S))
        return len(self._greedy(sorted(items))) == len(items)

    def rank(self, S: Iterable[int] | None = None) -> int:
        if S is None:
            S = range(self.ground_size)
        return len(self.greedy(sorted(set(S))))

    @property
    def full_rank(self) -> int:
        return self.rank()

    def span_contains(self, S: Iterable[int], e: int) -> bool:
        items = set(self._check(S))
        (e,) = self._check([e])
        if e in items:
            return True
        return self.rank(items | {e}) == self.rank(items)

    def is_base(self, S: Iterable[int]) -> bool:
        items = set(self._check(S))
        return len(items) == self.full_rank and self.is_independent(items)

    def to_json(self) -> dict:
        raise NotImplementedError(f"{self.kind} matroids have no JSON form")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.ground_size})"


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, ground_size: int, rank: int):
        super().__init__(ground_size)
        if rank < 0:
            raise MalformedInput("uniform rank must be nonnegative")
        self.r = int(rank)

    def _greedy(self, seq):
        return list(seq[: self.r])

    def to_json(self):
        return {"kind": "uniform", "n": self.ground_size, "rank": self.r}


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; edge ``i`` is element ``i``.

    Every query builds a fresh union-find, so instances stay immutable and
    can be shared between threads.
    """

    kind = "graphic"

    def __init__(self, vertices: int, edges: Sequence[Sequence[int]]):
        super().__init__(len(edges))
        self.vertices = int(vertices)
        self.edges = [tuple(int(x) for x in uv) for uv in edges]
        for uv in self.edges:
            if len(uv) != 2 or not all(0 <= x < self.vertices for x in uv):
                raise MalformedInput(f"bad edge {uv} for {self.vertices} vertices")

    def _greedy(self, seq):
        uf = UnionFind(self.vertices)
        edges = self.edges
        out = []
        for e in seq:
            u, v = edges[e]
            if uf.union(u, v):
                out.append(e)
        return out

    def to_json(self):
        return {"kind": "graphic", "vertices": self.vertices, "edges": [list(uv) for uv in self.edges]}


class PartitionMatroid(Matroid):
    kind = "partition"

    def __init__(self, blocks: Sequence[int], capacities: Sequence[int]):
        super().__init__(len(blocks))
        self.blocks = [int(b) for b in blocks]
        self.capacities = [int(c) for c in capacities]
        for b in self.blocks:
            if not 0 <= b < len(self.capacities):
                raise MalformedInput(f"block {b} has no capacity")
        if any(c < 0 for c in self.capacities):
            raise MalformedInput("capacities must be nonnegative")

    def _greedy(self, seq):
        used = [0] * len(self.capacities)
        out = []
        for e in seq:
            b = self.blocks[e]
            if used[b] < self.capacities[b]:
                used[b] += 1
                out.append(e)
        return out

    def to_json(self):
        return {"kind": "partition", "blocks": self.blocks, "capacities": self.capacities}


class ExplicitMatroid(Matroid):
    """Matroid given by its list of maximal independent sets.

    The listing is trusted to satisfy the matroid axioms;
    :func:`check_axioms` verifies that exhaustively for small ground sets.
    """

    kind = "explicit"

    def __init__(self, ground_size: int, maximal_sets: Iterable[Iterable[int]]):
        super().__init__(ground_size)
        sets = []
        for s in maximal_sets:
            fs = frozenset(self._check(s))
            sets.append(fs)
        if not sets:
            sets = [frozenset()]
        self.maximal_sets = sets

    def _contained(self, items: frozenset) -> bool:
        return any(items <= m for m in self.maximal_sets)

    def _greedy(self, seq):
        out: list[int] = []
        cur = frozenset()
        for e in seq:
            cand = cur | {e}
            if self._contained(cand):
                out.append(e)
                cur = cand
        return out

    def to_json(self):
        return {
            "kind": "explicit",
            "n": self.ground_size,
            "independent_sets": [sorted(s) for s in self.maximal_sets],
        }


class ParallelExtension(Matroid):
    """Adds parallel copies: each element maps to an element of ``base``.

    A set is independent iff no two of its elements share an original and the
    projected set is independent in ``base``.
    """

    kind = "parallel_extension"

    def __init__(self, base: Matroid, original: Sequence[int]):
        super().__init__(len(original))
        self.base = base
        self.original = [int(o) for o in original]
        base._check(self.original)

    def _greedy(self, seq):
        # greedy in the base over projected elements, first copy wins
        proj = []
        first: dict[int, int] = {}
        for e in seq:
            o = self.original[e]
            if o not in first:
                first[o] = e
                proj.append(o)
        kept = set(self.base.greedy(proj))
        return [e for e in seq if self.original[e] in kept and first[self.original[e]] == e]


class Restriction(Matroid):
    """``base`` restricted to ``keep``; element ids are unchanged."""

    kind = "restriction"

    def __init__(self, base: Matroid, keep: Iterable[int]):
        super().__init__(base.ground_size)
        self.base = base
        self.keep = frozenset(base._check(keep))

    def _greedy(self, seq):
        return self.base._greedy([e for e in seq if e in self.keep])


def restrict(m: Matroid, keep: Iterable[int]) -> Restriction:
    return Restriction(m, keep)


def max_weight_base(m: Matroid, weights: Sequence[float], within: Iterable[int] | None = None) -> list[int]:
    """Greedy maximum-weight base (of ``m`` restricted to ``within`` if given).

    Elements are scanned by decreasing weight, ties by ascending id.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (m.ground_size,):
        raise MalformedInput(f"expected {m.ground_size} weights, got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise MalformedInput("weights must be finite")
    pool = range(m.ground_size) if within is None else sorted(set(within))
    order = sorted(pool, key=lambda e: (-w[e], e))
    return sorted(m.greedy(order))


@dataclass(frozen=True)
class ExchangeBijection:
    from_base: frozenset
    to_base: frozenset
    mapping: dict = field(hash=False)

    def __getitem__(self, e: int) -> int:
        return self.mapping[e]


def _perfect_matching(left: list[int], adj: dict[int, list[int]]) -> dict[int, int]:
    """Maximum bipartite matching by augmenting paths (Kuhn)."""
    match_right: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in left:
        augment(u, set())
    return {u: v for v, u in match_right.items()}


def exchange_bijection(m: Matroid, from_base: Iterable[int], to_base: Iterable[int]) -> ExchangeBijection:
    """Bijection ``pi`` with ``(to_base - pi(e)) + e`` a base for every ``e``.

    Shared elements are fixed points; the rest comes from a perfect matching
    in the exchange graph, which exists for any two bases of a matroid.
    """
    src, dst = frozenset(m._check(from_base)), frozenset(m._check(to_base))
    if not (m.is_base(src) and m.is_base(dst)):
        raise ValueError("exchange_bijection needs two bases")
    mapping = {e: e for e in src & dst}
    left = sorted(src - dst)
    right = sorted(dst - src)
    adj = {e: [f for f in right if m.is_independent((dst - {f}) | {e})] for e in left}
    matched = _perfect_matching(left, adj)
    assert len(matched) == len(left), "exchange graph has no perfect matching"
    mapping.update(matched)
    return ExchangeBijection(src, dst, mapping)


def pad_with_duplicates(m: Matroid, probs: Sequence[float], copies: int):
    """Add ``copies - 1`` zero-probability parallel copies of every element.

    Returns ``(padded matroid, padded probs, original id per padded element)``.
    Copies of element ``e`` get ids ``e + j*n`` for ``j = 1..copies-1``.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    n = m.ground_size
    p = np.asarray(probs, dtype=float)
    if copies == 1:
        return m, p.copy(), list(range(n))
    original = [e for _ in range(copies) for e in range(n)]
    padded = np.concatenate([p, np.zeros(n * (copies - 1))])
    return ParallelExtension(m, original), padded, original


def independent_sets(m: Matroid, maximal_only: bool = False) -> list[tuple[int, ...]]:
    """Enumerate independent sets by size (exponential; small ground sets only)."""
    n, r = m.ground_size, m.full_rank
    found: list[tuple[int, ...]] = [()]
    frontier = [()]
    for _ in range(r):
        nxt = []
        for s in frontier:
            start = s[-1] + 1 if s else 0
            for e in range(start, n):
                cand = s + (e,)
                if m.is_independent(cand):
                    nxt.append(cand)
        found.extend(nxt)
        frontier = nxt
    if maximal_only:
        # in a matroid the maximal independent sets are exactly the bases
        return [s for s in found if len(s) == r]
    return found


def check_axioms(m: Matroid) -> list[str]:
    """Exhaustive downward-closure and exchange checks; returns violations."""
    n = m.ground_size
    if n > 12:
        raise ValueError("exhaustive axiom check limited to n <= 12")
    indep = set()
    for mask in range(1 << n):
        s = frozenset(i for i in range(n) if mask >> i & 1)
        if m.is_independent(s):
            indep.add(s)
    problems = []
    if frozenset() not in indep:
        problems.append("empty set dependent")
    for s in indep:
        for e in s:
            if s - {e} not in indep:
                problems.append(f"downward closure: {sorted(s)} minus {e}")
    by_size: dict[int, list[frozenset]] = {}
    for s in indep:
        by_size.setdefault(len(s), []).append(s)
    for I in indep:
        for size in range(len(I) + 1, n + 1):
            for J in by_size.get(size, ()):
                if not any(I | {e} in indep for e in J - I):
                    problems.append(f"exchange: {sorted(I)} vs {sorted(J)}")
    return problems


def brute_rank(m: Matroid, S: Iterable[int]) -> int:
    """Largest independent subset size by enumeration (test oracle)."""
    items = sorted(set(S))
    for size in range(len(items), -1, -1):
        if any(m.is_independent(c) for c in combinations(items, size)):
            return size
    return 0


def matroid_from_json(obj: dict, n: int | None = None) -> Matroid:
    """Build a matroid from its instance-file form; ``n`` fills in a missing size."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedInput("matroid needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "uniform":
            return UniformMatroid(obj["n"] if "n" in obj else n, obj["rank"])
        if kind == "graphic":
            return GraphicMatroid(obj["vertices"], obj["edges"])
        if kind == "partition":
            return PartitionMatroid(obj["blocks"], obj["capacities"])
        if kind == "explicit":
            sets = obj["independent_sets"]
            size = obj.get("n", n)
            if size is None:
                size = 1 + max((e for s in sets for e in s), default=-1)
            return ExplicitMatroid(size, sets)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"{kind} matroid missing field {exc}") from None
    raise MalformedInput(f"unknown matroid kind {kind!r}")

