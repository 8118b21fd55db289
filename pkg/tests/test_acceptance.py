"""Acceptance gate: eleven end-to-end criteria, each printing one
"criterion N: PASS" or "criterion N: FAIL" line."""

from __future__ import annotations

import itertools
import random
import time
from functools import wraps

from _oracles import balance_enum, increase_enum, random_points, sec_bruteforce
from _suites import ALL_SUITES

from gathersim.faults import ByzantineSpec, FaultPlan
from gathersim.geometry import Point2, dist, smallest_enclosing_circle, voronoi_cell
from gathersim.harness.analytic import (
    balance_probability,
    increase_probability,
    markov_absorption,
    markov_simulate_hitting,
)
from gathersim.harness.catalog import catalog_scenario
from gathersim.harness.engine import monte_carlo, run
from gathersim.harness.report import write_trace_csv
from gathersim.harness.scenario import Scenario
from gathersim.model import Gathering, ObservationMode
from gathersim.schedulers import SchedulerSpec, validate_history


def criterion(num: int, budget_s: float):
    def deco(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                assert elapsed < budget_s, (
                    f"runtime {elapsed:.2f}s exceeds {budget_s}s budget")
            except BaseException:
                print(f"criterion {num}: FAIL")
                raise
            print(f"criterion {num}: PASS")
        return wrapper
    return deco


@criterion(1, 5.0)
def test_criterion_01_two_robot_expected_steps():
    # n=2, start distance 10, reach 1: sample mean within twice the
    # ceiling bound, all runs succeed
    scenario = catalog_scenario("lemma10-n2")
    stats = monte_carlo(scenario, repeats=1000)
    assert stats.successes == stats.runs == 1000
    assert stats.mean_steps <= 20.0, f"mean {stats.mean_steps}"
    assert stats.mean_steps + stats.ci95_half_width <= 22.0


@criterion(2, 1.0)
def test_criterion_02_scripted_cycle_recurrence():
    scenario = catalog_scenario("fig2-cycle")
    pass_len = len(scenario.scheduler.schedule)
    result = run(scenario)
    assert result.outcome.kind == "recurrence", result.outcome.describe()
    assert result.outcome.period == pass_len
    assert result.steps_executed <= 3 * pass_len


@criterion(3, 1.0)
def test_criterion_03_two_bounded_swap():
    scenario = catalog_scenario("k2-swap")
    result = run(scenario)
    assert result.outcome.kind == "recurrence", result.outcome.describe()
    violations = validate_history(
        SchedulerSpec("two-bounded-centralized"), result.history,
        scenario.n, result.eligible_per_step)
    assert not violations, violations


@criterion(4, 5.0)
def test_criterion_04_side_move_necessity():
    scenario = catalog_scenario("appendix-a1")
    naive = run(scenario)
    assert naive.outcome.kind == "recurrence", naive.outcome.describe()
    assert naive.steps_executed <= 50
    fixed = run(scenario.with_overrides(
        algorithm="det-ft", goal="weak", max_steps=10**4,
        recurrence_check=False))
    assert fixed.outcome.kind == "weak-gathered", fixed.outcome.describe()


@criterion(5, 60.0)
def test_criterion_05_crash_tolerant_probabilistic():
    scenario = Scenario(
        name="crash-5-2",
        robots=tuple((p, 1.0) for p in (
            Point2(0.0, 0.0), Point2(2.0, 0.0), Point2(4.0, 1.0),
            Point2(1.0, 3.0), Point2(3.0, 2.0))),
        algorithm="prob-ft",
        scheduler=SchedulerSpec("fair-arbitrary", window=20),
        multiplicity=ObservationMode.WITH_MULTIPLICITY,
        fault_plan=FaultPlan(crashes=((3, 3), (4, 7)), f=2),
        goal="weak",
        max_steps=10**5,
        recurrence_check=False,
    )
    stats = monte_carlo(scenario, repeats=200)
    assert stats.success_rate >= 0.99, f"success rate {stats.success_rate}"


def _byzantine_blocking(name: str) -> None:
    scenario = catalog_scenario(name)
    recur = run(scenario)
    assert recur.outcome.kind == "recurrence", recur.outcome.describe()
    long = run(scenario.with_overrides(
        goal="weak", max_steps=10**4, recurrence_check=False))
    assert long.outcome.kind == "budget-exhausted", long.outcome.describe()
    assert all(g not in (Gathering.WEAK, Gathering.STRONG)
               for g in long.gathering_series)
    assert all(len(s) == 1 for s in long.history)  # centralized schedule
    violations = validate_history(
        SchedulerSpec("fair-k-bounded", k=3), long.history,
        scenario.n, long.eligible_per_step)
    assert not violations, violations[:3]


@criterion(6, 10.0)
def test_criterion_06_byzantine_blocking():
    start = time.perf_counter()
    _byzantine_blocking("byz-balancer")
    assert time.perf_counter() - start < 5.0
    start = time.perf_counter()
    _byzantine_blocking("byz-switch")
    assert time.perf_counter() - start < 5.0


@criterion(7, 1.0)
def test_criterion_07_gathered_breaker():
    scenario = Scenario(
        name="breaker-4-1",
        robots=tuple((Point2(0.0, 0.0), 100.0) for _ in range(4)),
        algorithm="nearest-neighbor",
        scheduler=SchedulerSpec("round-robin", order=(0, 1, 2, 3)),
        fault_plan=FaultPlan(
            byzantine=((3, ByzantineSpec("gathered-breaker")),), f=1),
        goal="budget",
        max_steps=10**3,
        recurrence_check=False,
    )
    result = run(scenario)
    series = result.gathering_series
    first = next(i for i, g in enumerate(series) if g is not Gathering.NO)
    breaks = sum(1 for a, b in itertools.pairwise(series[first:])
                 if a is not Gathering.NO and b is Gathering.NO)
    assert breaks >= 10, f"only {breaks} breaks"


@criterion(8, 10.0)
def test_criterion_08_geometry_oracles():
    rng = random.Random(8)
    for _ in range(500):
        pts = random_points(rng, rng.randint(1, 10))
        got = smallest_enclosing_circle(pts)
        want = sec_bruteforce(pts)
        assert abs(got.radius - want.radius) <= 1e-9
        assert dist(got.center, want.center) <= 1e-9 * max(1.0, want.radius)
    for _ in range(200):
        sites = random_points(rng, rng.randint(2, 8))
        cells = [voronoi_cell(s, sites) for s in sites]
        for _ in range(1000):
            probe = Point2(rng.uniform(-12, 12), rng.uniform(-12, 12))
            dists = [dist(probe, s) for s in sites]
            best = min(dists)
            for cell, d in zip(cells, dists):
                assert cell.contains(probe, 1e-9) == (d <= best + 1e-9)


@criterion(9, 30.0)
def test_criterion_09_analytic_formulas():
    for i in range(5):
        for o in range(5):
            for M in (2, 3, 5):
                assert abs(balance_probability(i, o, M)
                           - balance_enum(i, o, M)) <= 1e-12
                for x in range(i + 1):
                    assert abs(increase_probability(i, o, x, M)
                               - increase_enum(i, o, x, M)) <= 1e-12
    for n in (4, 6, 8):
        for p in (0.1, 0.25, 0.5):
            res = markov_absorption(n, p)
            assert abs(res.absorption_probability - 1.0) <= 1e-9
    exact = markov_absorption(4, 0.25).expected_steps
    sampled = markov_simulate_hitting(4, 0.25, walks=10**6, seed=9)
    assert abs(sampled - exact) <= 0.02 * exact, f"{sampled} vs {exact}"


@criterion(10, 120.0)
def test_criterion_10_invariant_suites():
    for name, suite in ALL_SUITES.items():
        suite(count=1000)


@criterion(11, 5.0)
def test_criterion_11_replay_determinism(tmp_path):
    scenario = catalog_scenario("appendix-a1")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_trace_csv(a, run(scenario).trace)
    write_trace_csv(b, run(scenario).trace)
    assert a.read_bytes() == b.read_bytes()
