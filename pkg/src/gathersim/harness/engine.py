"""Execution engine: scheduler -> faults -> observe -> decide -> move loop
with deterministic replay, plus Monte Carlo aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from gathersim.algorithms import DecisionKind, RandomSource, decide
from gathersim.faults import apply_crashes, make_controller
from gathersim.geometry import Point2, dist
from gathersim.model import (
    Configuration,
    Gathering,
    Metrics,
    ObservationFrame,
    RecurrenceDetector,
    RobotState,
    RobotStatus,
    apply_moves,
    is_gathered,
    metrics,
    observe,
    snap_to_positions,
)
from gathersim.harness.scenario import Scenario
from gathersim.schedulers import make_scheduler


class TraceRecord(NamedTuple):
    step: int
    robot: int
    x: float
    y: float
    status: str
    activated: bool
    decision_kind: str
    target_x: Optional[float]
    target_y: Optional[float]


@dataclass(frozen=True)
class Outcome:
    kind: str  # strong-gathered | weak-gathered | recurrence | budget-exhausted
    step: Optional[int] = None
    first: Optional[int] = None
    period: Optional[int] = None

    def describe(self) -> str:
        if self.kind == "recurrence":
            return f"recurrence first={self.first} period={self.period}"
        if self.step is not None:
            return f"{self.kind} step={self.step}"
        return self.kind


@dataclass
class RunResult:
    outcome: Outcome
    final: Configuration
    steps_executed: int
    metrics_series: list[Metrics]
    gathering_series: list[Gathering]
    trace: list[TraceRecord]
    history: list[set[int]]
    eligible_per_step: list[set[int]]
    notes: list[str] = field(default_factory=list)


def _initial_configuration(scenario: Scenario) -> Configuration:
    byz_ids = {rid for rid, _ in scenario.fault_plan.byzantine}
    robots = []
    for i, (pos, delta) in enumerate(scenario.robots):
        if i in byz_ids:
            robots.append(RobotState(pos, scenario.byz_delta,
                                     RobotStatus.BYZANTINE))
        else:
            robots.append(RobotState(pos, delta))
    return Configuration(tuple(robots), 0)


def _random_frame(position: Point2, rng: RandomSource) -> ObservationFrame:
    rotation = rng.uniform(0.0, 2.0 * math.pi)
    scale = 10.0 ** rng.uniform(-1.0, 1.0)
    chirality = 1 if rng.random() < 0.5 else -1
    return ObservationFrame(position, rotation, scale, chirality)


def _goal_reached(goal: str, g: Gathering) -> Optional[str]:
    if goal == "strong" and g is Gathering.STRONG:
        return "strong-gathered"
    if goal == "weak" and g in (Gathering.STRONG, Gathering.WEAK):
        return "weak-gathered" if g is Gathering.WEAK else "strong-gathered"
    return None


def run(scenario: Scenario) -> RunResult:
    scenario.validate()
    eps = scenario.eps_snap
    config = _initial_configuration(scenario)
    # robots crashed at step 0 are faulty from the start
    config = apply_crashes(config, scenario.fault_plan, 0)
    n = config.n

    root = RandomSource(scenario.seed)
    scheduler = make_scheduler(scenario.scheduler, n, root.substream("scheduler"))
    frames_rng = root.substream("frames")
    coins = {i: root.substream(f"coins/{i}") for i in range(n)}
    controllers = {rid: make_controller(spec)
                   for rid, spec in scenario.fault_plan.byzantine}

    detector = RecurrenceDetector(eps, scenario.recurrence_mode)
    metrics_series = [metrics(config, eps)]
    gathering_series = [is_gathered(config, eps)]
    trace: list[TraceRecord] = []
    history: list[set[int]] = []
    eligible_per_step: list[set[int]] = []
    notes: list[str] = []

    for i, r in enumerate(config.robots):
        trace.append(TraceRecord(0, i, r.position.x, r.position.y,
                                 r.status.value, False, "none", None, None))

    reached = _goal_reached(scenario.goal, gathering_series[0])
    if reached is not None:
        return RunResult(Outcome(reached, step=0), config, 0, metrics_series,
                         gathering_series, trace, history, eligible_per_step,
                         notes)
    if scenario.recurrence_check:
        detector.push(config)

    outcome = Outcome("budget-exhausted")
    steps = 0
    for t in range(scenario.max_steps):
        config = apply_crashes(config, scenario.fault_plan, t)
        activation = scheduler.next_activation(config)
        history.append(set(activation))
        eligible_per_step.append(
            {i for i, r in enumerate(config.robots)
             if r.status is not RobotStatus.CRASHED})

        pre_positions = config.positions()
        moves: dict[int, Point2] = {}
        decisions: dict[int, tuple[str, Optional[Point2]]] = {}
        for rid in sorted(activation):
            state = config.robots[rid]
            if state.status is RobotStatus.CRASHED:
                decisions[rid] = ("crashed-noop", None)
                continue
            if state.status is RobotStatus.BYZANTINE:
                target = controllers[rid].decide(config, rid, eps)
                if target is None:
                    decisions[rid] = ("stay", None)
                else:
                    target = snap_to_positions(target, pre_positions, eps)
                    moves[rid] = target
                    decisions[rid] = ("move", target)
                continue
            frame = _random_frame(state.position, frames_rng)
            obs = observe(config, rid, frame, scenario.multiplicity, eps)
            decision = decide(scenario.algorithm, obs, coins[rid],
                              scenario.blocked_rule)
            if decision.kind is DecisionKind.MOVE_TO:
                assert decision.target is not None
                target = frame.to_global(decision.target)
                target = snap_to_positions(target, pre_positions, eps)
                moved = dist(target, state.position) > eps
                if moved:
                    moves[rid] = target
                decisions[rid] = ("move", target)
            else:
                moved = False
                decisions[rid] = ("stay", None)
            scheduler.notify(rid, moved)

        config = apply_moves(config, moves, eps)
        steps = t + 1
        for i, r in enumerate(config.robots):
            kind, target = decisions.get(i, ("none", None))
            trace.append(TraceRecord(
                steps, i, r.position.x, r.position.y, r.status.value,
                i in activation, kind,
                target.x if target is not None else None,
                target.y if target is not None else None))

        metrics_series.append(metrics(config, eps))
        g = is_gathered(config, eps)
        gathering_series.append(g)

        reached = _goal_reached(scenario.goal, g)
        if reached is not None:
            outcome = Outcome(reached, step=steps)
            break
        if scenario.recurrence_check:
            hit = detector.push(config)
            if hit is not None and scenario.goal == "recurrence":
                outcome = Outcome("recurrence", step=steps,
                                  first=hit[0], period=hit[1])
                break

    return RunResult(outcome, config, steps, metrics_series, gathering_series,
                     trace, history, eligible_per_step, notes)


@dataclass(frozen=True)
class Stats:
    runs: int
    successes: int
    mean_steps: float
    stddev: float
    ci95_half_width: float
    small_sample: bool

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs if self.runs else 0.0


def monte_carlo(scenario: Scenario, repeats: int, seed_stride: int = 1) -> Stats:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    steps: list[int] = []
    successes = 0
    for i in range(repeats):
        result = run(scenario.with_overrides(seed=scenario.seed + i * seed_stride))
        if result.outcome.kind in ("strong-gathered", "weak-gathered"):
            successes += 1
            steps.append(result.outcome.step or 0)
    if steps:
        mean = sum(steps) / len(steps)
        var = (sum((s - mean) ** 2 for s in steps) / (len(steps) - 1)
               if len(steps) > 1 else 0.0)
        sd = math.sqrt(var)
        ci = 1.96 * sd / math.sqrt(len(steps))
    else:
        mean = sd = ci = float("nan")
    return Stats(repeats, successes, mean, sd, ci, repeats < 30)
