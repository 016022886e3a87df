"""Instances, solver configuration and portfolios, with their JSON forms."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .matroids import Matroid, MalformedInput, matroid_from_json
from .stochastic import ExplicitDistribution, ProductDistribution


@dataclass
class SolverConfig:
    eval_samples: int = 4000
    order_trials: int = 400
    ell_pad: int | None = None  # None: max(k, 2)
    base_cap: int | None = None  # None: ceil(padded ground size / rank)
    seed: int = 0
    delta: float = 0.05
    threads: int | None = None  # None: PORTFOLIO_THREADS or 1

    def worker_count(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("PORTFOLIO_THREADS")
        return max(1, int(env)) if env else 1


@dataclass
class Instance:
    matroid: Matroid
    dist: ProductDistribution
    k: int
    config: SolverConfig = field(default_factory=SolverConfig)
    explicit: ExplicitDistribution | None = None
    solutions: list | None = None  # candidate solutions for the greedy baseline

    def __post_init__(self):
        if not isinstance(self.dist, ProductDistribution):
            self.dist = ProductDistribution(np.asarray(self.dist, dtype=float))
        if self.dist.n != self.matroid.ground_size:
            raise MalformedInput(
                f"{self.dist.n} probabilities for a ground set of {self.matroid.ground_size}"
            )
        if int(self.k) != self.k or self.k < 1:
            raise InfeasibleK(f"portfolio size must be a positive integer, got {self.k!r}")
        self.k = int(self.k)

    @property
    def probs(self) -> np.ndarray:
        return self.dist.probs

    @property
    def n(self) -> int:
        return self.matroid.ground_size


class InfeasibleK(ValueError):
    pass


class DependentSet(ValueError):
    def __init__(self, index: int, elements):
        super().__init__(f"set {index} is not independent: {sorted(elements)}")
        self.index = index


@dataclass
class Portfolio:
    sets: list
    provenance: dict = field(default_factory=dict)
    estimate: Any = None  # ValueEstimate, attached by solvers

    def __post_init__(self):
        self.sets = [tuple(sorted(int(e) for e in set(s))) for s in self.sets]

    def __len__(self) -> int:
        return len(self.sets)

    def validate(self, m: Matroid) -> None:
        for i, s in enumerate(self.sets):
            if not m.is_independent(s):
                raise DependentSet(i, s)

    def to_json(self) -> dict:
        out: dict = {"sets": [list(s) for s in self.sets], "provenance": self.provenance}
        if self.estimate is not None:
            est = self.estimate
            out["estimate"] = {"mean": est.mean, "ci": est.ci_half_width, "n": est.n_samples, "seed": est.seed}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Portfolio":
        if not isinstance(obj, dict) or not isinstance(obj.get("sets"), list):
            raise MalformedInput("portfolio needs a 'sets' list")
        return cls([list(s) for s in obj["sets"]], dict(obj.get("provenance", {})))


def instance_from_json(obj: dict, config: SolverConfig | None = None) -> Instance:
    if not isinstance(obj, dict):
        raise MalformedInput("instance must be a JSON object")
    for key in ("matroid", "probs", "k"):
        if key not in obj:
            raise MalformedInput(f"instance missing field {key!r}")
    probs = obj["probs"]
    if not isinstance(probs, list):
        raise MalformedInput("'probs' must be a list")
    matroid = matroid_from_json(obj["matroid"], n=len(probs))
    try:
        dist = ProductDistribution(np.asarray(probs, dtype=float))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from None
    explicit = None
    if "support" in obj:
        explicit = ExplicitDistribution((a, w) for a, w in obj["support"])
    return Instance(
        matroid, dist, obj["k"], config or SolverConfig(),
        explicit=explicit, solutions=obj.get("solutions"),
    )


def instance_to_json(inst: Instance) -> dict:
    out = {"matroid": inst.matroid.to_json(), "probs": [float(p) for p in inst.probs], "k": inst.k}
    if inst.explicit is not None:
        out["support"] = [[sorted(a), float(w)] for a, w in zip(inst.explicit.outcomes, inst.explicit.weights)]
    if inst.solutions is not None:
        out["solutions"] = [sorted(s) for s in inst.solutions]
    return out


def config_dict(cfg: SolverConfig) -> dict:
    return asdict(cfg)
