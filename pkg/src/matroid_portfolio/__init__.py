"""Portfolios of k independent sets over matroids with Bernoulli element values."""

from .algorithms import (
    BaseOrdering,
    build_base_ordering,
    column_decomposition,
    disjoint_baseline,
    greedy_explicit,
    solve,
    solve_general,
    solve_uniform,
)
from .crs import ColumnSampler, CRSOrder, ProductSampler, UniformPrefixSampler, compute_order, resolve
from .evaluation import ValueEstimate, estimate_many, estimate_value, optimal_portfolio_bruteforce, ratio_report
from .matroids import (
    ExplicitMatroid,
    GraphicMatroid,
    MalformedInput,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
    check_axioms,
    exchange_bijection,
    matroid_from_json,
    max_weight_base,
    pad_with_duplicates,
)
from .model import DependentSet, InfeasibleK, Instance, Portfolio, SolverConfig, instance_from_json, instance_to_json
from .stochastic import (
    CapacityError,
    ExplicitDistribution,
    ProductDistribution,
    binomial_pb,
    exact_portfolio_value,
    expected_max_iid,
    pb_pmf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
