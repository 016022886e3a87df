"""Named experiments; each returns a JSON-ready report with pass/fail checks."""

from __future__ import annotations

import math
import time

import numpy as np

from .algorithms import build_base_ordering, column_decomposition, disjoint_baseline, solve_general
from .crs import ColumnSampler, UniformPrefixSampler, compute_order, resolve
from .evaluation import estimate_many, format_table, optimal_portfolio_bruteforce
from .generators import batch_count_formula, gen_batch_portfolio, gen_random, gen_uniform_mixing
from .model import Instance, SolverConfig
from .stochastic import binomial_pb, exact_portfolio_value, expected_max_iid, pb_pmf, prob_max_at_least


def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def _report(name: str, checks: list[dict], started: float, **extra) -> dict:
    return {
        "experiment": name,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "seconds": round(time.perf_counter() - started, 3),
        **extra,
    }


# contention resolution retention

def crs_desk_instances(count: int = 20, seed: int = 0) -> list[Instance]:
    """Alternating uniform and graphic instances with n <= 40."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if i % 2 == 0:
            r = int(rng.integers(2, 6))
            n = int(rng.integers(3 * r, min(40, 8 * r) + 1))
            out.append(gen_random(n, r, 1, "uniform", "uniform", seed=seed * 1000 + i))
        else:
            r = int(rng.integers(2, 5))
            n = int(rng.integers(3 * r, min(40, 10 * r) + 1))
            out.append(gen_random(n, r, 1, "uniform", "graphic", seed=seed * 1000 + i))
    return out


def crs_samplers(inst: Instance, rng: np.random.Generator):
    """Uniform-prefix and one-per-column samplers on a random prefix of the base ordering."""
    ordering = build_base_ordering(inst, 2)
    ell = int(rng.integers(1, len(ordering.bases)))
    m = ordering.matroid
    prefix = [e for b in ordering.bases[:ell] for e in b]
    decomp = column_decomposition(ordering, ell)
    return m, ell, {
        "uniform": UniformPrefixSampler(m.ground_size, prefix, ordering.rank),
        "column": ColumnSampler(m.ground_size, decomp.column_list()),
    }


def retention_counts(m, sampler, order, trials: int, rng: np.random.Generator, check_feasible: bool = True):
    """Counts of e in R and e in resolve(R) over ``trials`` end-to-end runs."""
    in_r = np.zeros(m.ground_size, dtype=np.int64)
    kept = np.zeros(m.ground_size, dtype=np.int64)
    violations = 0
    for R in sampler.draw_batch(rng, trials):
        out = resolve(m, order, R, rng)
        in_r[R] += 1
        if out:
            kept[list(out)] += 1
        if check_feasible and not (out <= set(R.tolist()) and m.is_independent(out)):
            violations += 1
    return in_r, kept, violations


def crs_retention(n_instances: int = 20, trials: int = 10_000, order_trials: int = 400,
                  min_events: int = 500, seed: int = 0) -> dict:
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 7])
    rows, checks = [], []
    total_calls = total_violations = 0
    for idx, inst in enumerate(crs_desk_instances(n_instances, seed)):
        m, ell, samplers = crs_samplers(inst, rng)
        for name, sampler in samplers.items():
            order = compute_order(m, sampler, order_trials, rng)
            in_r, kept, bad = retention_counts(m, sampler, order, trials, rng)
            total_calls += trials
            total_violations += bad
            mask = in_r >= min_events
            if not mask.any():
                continue
            q = kept[mask] / in_r[mask]
            sigma = np.sqrt(np.maximum(q * (1 - q), 1e-12) / in_r[mask])
            slack = q - (1 / 8 - 3 * sigma)
            worst = int(np.argmin(slack))
            rows.append({
                "instance": idx, "kind": inst.matroid.kind, "n": inst.n, "prefix": ell,
                "sampler": name, "elements": int(mask.sum()), "min_retention": float(q.min()),
                "worst_slack": float(slack[worst]),
            })
            checks.append(_check(f"retention {idx}/{name}", slack.min() >= 0, min_retention=float(q.min())))
    checks.append(_check("resolve feasibility", total_violations == 0, calls=total_calls, violations=total_violations))
    return _report("crs-retention", checks, started, rows=rows)


# approximation ratio against brute force

def tiny_instances(count: int = 50, seed: int = 0) -> list[Instance]:
    kinds = ("uniform", "graphic", "partition", "explicit")
    laws = ("uniform", "beta", "bimodal")
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, 11, i])
        n = int(rng.integers(3, 9))
        r = int(rng.integers(1, min(3, n) + 1))
        k = int(rng.integers(1, 4))
        inst = gen_random(n, r, k, laws[i % 3], kinds[i % 4], seed=seed * 1000 + i)
        inst.config = SolverConfig(seed=i)
        out.append(inst)
    return out


def ratio_sweep(n_instances: int = 50, floor: float = 0.5, median_floor: float = 0.8, seed: int = 0) -> dict:
    started = time.perf_counter()
    rows = []
    for i, inst in enumerate(tiny_instances(n_instances, seed)):
        port = solve_general(inst)
        base = disjoint_baseline(inst)
        _, opt = optimal_portfolio_bruteforce(inst)
        val = exact_portfolio_value(port.sets, inst.dist)
        dval = exact_portfolio_value(base.sets, inst.dist)
        rows.append({
            "instance": i, "kind": inst.matroid.kind, "n": inst.n, "r": inst.matroid.full_rank, "k": inst.k,
            "opt": opt, "general": val, "disjoint": dval,
            "ratio": val / opt if opt > 0 else 1.0,
            "disjoint_ratio": dval / opt if opt > 0 else 1.0,
            "candidate": port.provenance.get("candidate"),
        })
    ratios = np.array([r["ratio"] for r in rows])
    summary = {"min": float(ratios.min()), "median": float(np.median(ratios)), "mean": float(ratios.mean())}
    checks = [
        _check(f"every ratio >= {floor}", summary["min"] >= floor, observed_min=summary["min"]),
        _check(f"median ratio >= {median_floor}", summary["median"] >= median_floor, observed_median=summary["median"]),
        _check("ratios <= 1", bool(np.all(ratios <= 1 + 1e-9))),
    ]
    return _report("ratio-sweep", checks, started, rows=rows, summary=summary)


# mixing versus disjoint counterexample

def mixing_counterexample(k: int = 256, samples: int = 100_000, n_batches: int | None = None,
                          seed: int = 0, threads: int = 1) -> dict:
    started = time.perf_counter()
    inst = gen_uniform_mixing(k)
    batch = gen_batch_portfolio(k, n_batches)
    disjoint = disjoint_baseline(inst)
    eb, ed = estimate_many([batch.sets, disjoint.sets], inst.dist, samples, seed=seed, threads=threads)
    lo_b, hi_b = eb.normal_ci()
    lo_d, hi_d = ed.normal_ci()
    summary = {
        "k": k, "samples": samples,
        "batches": batch.provenance["batches"], "batch_formula": batch_count_formula(k),
        "batch": {"mean": eb.mean, "ci95": [lo_b, hi_b], "hoeffding_half_width": eb.ci_half_width},
        "disjoint": {"mean": ed.mean, "ci95": [lo_d, hi_d], "hoeffding_half_width": ed.ci_half_width},
    }
    checks = [_check("batch CI above disjoint CI", lo_b > hi_d, gap=lo_b - hi_d)]
    return _report("mixing-counterexample", checks, started, summary=summary)


# probability lemmas

def balls_in_bins_expected(m: int, n: int) -> float:
    """Expected number of non-empty bins after m balls into n bins."""
    return n * (1.0 - (1.0 - 1.0 / n) ** m)


def lemma_suite(n_params: int = 200, seed: int = 0, mc_draws: int = 20_000) -> dict:
    started = time.perf_counter()
    rng = np.random.default_rng([seed, 13])
    checks = []
    tol = 1e-12

    fails = 0
    for _ in range(n_params):
        n, k = int(rng.integers(1, 15)), int(rng.integers(1, 20))
        q = rng.random(n)
        p = q + rng.random(n) * (1 - q)
        fails += expected_max_iid(pb_pmf(p), k) < expected_max_iid(pb_pmf(q), k) - tol
    checks.append(_check("max expectation monotone in trial probabilities", fails == 0, cases=n_params, failures=int(fails)))

    fails = 0
    for _ in range(n_params):
        n, k = int(rng.integers(1, 15)), int(rng.integers(1, 20))
        q = rng.random(n)
        base = expected_max_iid(pb_pmf(q), k)
        for c in np.linspace(0, 1, 11):
            fails += expected_max_iid(pb_pmf(c * q), k) < c * base - tol
    checks.append(_check("scaling lower bound E[max PB(cq)] >= c E[max PB(q)]", fails == 0, cases=n_params * 11, failures=int(fails)))

    fails = 0
    for _ in range(n_params):
        n, k = int(rng.integers(1, 8)), int(rng.integers(1, 10))
        q = rng.random(n)
        s = rng.uniform(0.0, 1.0, n)
        c = float(s.min())
        # shared thinning: E over the random subset T of max of k iid PB(q_T)
        lhs = 0.0
        for mask in range(1 << n):
            keep = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
            w = float(np.prod(np.where(keep, s, 1 - s)))
            lhs += w * expected_max_iid(pb_pmf(q[keep]), k)
        fails += lhs < c * expected_max_iid(pb_pmf(q), k) - 1e-10
    checks.append(_check("shared random subset keeps a c fraction of the max", fails == 0, cases=n_params, failures=int(fails)))

    fails = 0
    for _ in range(n_params):
        n, k = int(rng.integers(1, 30)), int(rng.integers(1, 30))
        q = rng.random(n)
        fails += expected_max_iid(pb_pmf(q), k) > expected_max_iid(binomial_pb(n, float(q.mean())), k) + 1e-10
    checks.append(_check("averaging dominance PB <= Bin(n, mean)", fails == 0, cases=n_params, failures=int(fails)))

    fails = cases = 0
    for m in range(1, 201):
        for n in range(1, 201, 3):
            cases += 1
            fails += balls_in_bins_expected(m, n) < min(m / 2, 3 * n / 10) - tol
    checks.append(_check("balls and bins E[nonempty] >= min(m/2, 3n/10)", fails == 0, cases=cases, failures=int(fails)))

    fails = cases = 0
    worst = 1.0
    sim_fail = 0
    for _ in range(n_params):
        k = int(rng.integers(4, 65))
        p = float(rng.uniform(0.05, 0.9))
        n = int(rng.integers(max(2, math.ceil(30 / p)), math.ceil(30 / p) + 400))
        pb = binomial_pb(n, p)
        emax = expected_max_iid(pb, k)
        if emax < 30:
            continue
        cases += 1
        prob = prob_max_at_least(pb, k, emax / 6)
        worst = min(worst, prob)
        fails += prob < 1 - 1 / math.e
        draws = rng.binomial(n, p, size=(mc_draws, k)).max(axis=1)
        hit = float(np.mean(draws >= emax / 6))
        sim_fail += hit < 1 - 1 / math.e - 3 * math.sqrt(0.25 / mc_draws)
    checks.append(_check("max-binomial concentration (exact)", fails == 0 and cases > 0, cases=cases, worst=worst))
    checks.append(_check("max-binomial concentration (simulated)", sim_fail == 0 and cases > 0, cases=cases))

    fails = cases = 0
    for i in range(n_params):
        inst = gen_random(int(rng.integers(2, 9)), int(rng.integers(1, 3)), int(rng.integers(1, 4)),
                          "beta", ("uniform", "graphic", "partition")[i % 3], seed=seed * 7919 + i)
        if inst.matroid.full_rank == 0:
            continue
        port = disjoint_baseline(inst)
        union = sorted({e for s in port.sets for e in s})
        mu = float(inst.probs[union].sum())
        val = exact_portfolio_value(port.sets, inst.dist)
        bound = 0.3 if mu >= 0.5 else mu / math.e
        cases += 1
        fails += val < bound - 1e-12
    checks.append(_check("k disjoint bases reach min(0.3, mu/e)", fails == 0, cases=cases, failures=int(fails)))

    fails = cases = tries = 0
    while cases < n_params and tries < 200 * n_params:
        tries += 1
        k = int(rng.integers(1, 10))
        r1, r2 = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        cut = float(rng.random())
        p = rng.uniform(cut, 1.0, r1)
        q = rng.uniform(0.0, cut, r2)
        if expected_max_iid(pb_pmf(q), k) >= expected_max_iid(pb_pmf(p), k):
            cases += 1
            fails += not (r1 < r2)
    checks.append(_check("dominated trials need more of them", fails == 0, cases=cases, failures=int(fails)))

    return _report("lemma-suite", checks, started)


EXPERIMENTS = {
    "crs-retention": crs_retention,
    "ratio-sweep": ratio_sweep,
    "mixing-counterexample": mixing_counterexample,
    "lemma-suite": lemma_suite,
}


def render(report: dict) -> str:
    lines = [f"{report['experiment']}: {'PASS' if report['passed'] else 'FAIL'} ({report['seconds']}s)"]
    for c in report["checks"]:
        extra = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in c.items() if k not in ("name", "passed"))
        lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}" + (f" ({extra})" if extra else ""))
    if "summary" in report:
        lines.append(f"  summary: {report['summary']}")
    if report.get("rows"):
        cols = list(report["rows"][0].keys())
        lines.append(format_table(report["rows"], cols))
    return "\n".join(lines)
