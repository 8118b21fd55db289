"""Scenario description and its flat key-value text format (versioned)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from gathersim.algorithms import ALGORITHM_NAMES, requires_multiplicity
from gathersim.faults import ByzantineSpec, FaultPlan
from gathersim.geometry import EPS_SNAP, Point2
from gathersim.model import ObservationMode
from gathersim.schedulers import SchedulerSpec

FORMAT_VERSION = 1

GOALS = ("strong", "weak", "recurrence", "budget")
RECURRENCE_MODES = ("anonymous", "labeled", "equivalence")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    robots: tuple[tuple[Point2, float], ...]  # (position, delta_r)
    algorithm: str
    scheduler: SchedulerSpec
    seed: int = 0
    max_steps: int = 10_000
    goal: str = "strong"
    multiplicity: ObservationMode = ObservationMode.WITHOUT_MULTIPLICITY
    fault_plan: FaultPlan = field(default_factory=FaultPlan)
    eps_snap: float = EPS_SNAP
    recurrence_check: bool = True
    recurrence_mode: str = "anonymous"
    blocked_rule: str = "strict-between"
    byz_delta: float = math.inf
    expect: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.robots)

    def validate(self) -> None:
        if self.n < 1:
            raise ScenarioError("need at least one robot")
        if self.max_steps < 1:
            raise ScenarioError("max_steps must be >= 1")
        if self.algorithm not in ALGORITHM_NAMES:
            raise ScenarioError(f"unknown algorithm: {self.algorithm}")
        if self.goal not in GOALS:
            raise ScenarioError(f"unknown goal: {self.goal}")
        if self.recurrence_mode not in RECURRENCE_MODES:
            raise ScenarioError(f"unknown recurrence mode: {self.recurrence_mode}")
        if (requires_multiplicity(self.algorithm)
                and self.multiplicity is not ObservationMode.WITH_MULTIPLICITY):
            raise ScenarioError(f"{self.algorithm} requires multiplicity = on")
        for pos, delta in self.robots:
            if not (math.isfinite(pos.x) and math.isfinite(pos.y)):
                raise ScenarioError("non-finite robot position")
            if not delta > 0:
                raise ScenarioError("delta_r must be positive")
        self.fault_plan.validate(self.n)

    def with_overrides(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)


def parse_scenario(text: str) -> Scenario:
    entries: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"malformed line: {raw!r}")
        key, value = line.split("=", 1)
        entries.append((key.strip(), value.strip()))
    if not entries or entries[0][0] != "version":
        raise ScenarioError("scenario file must start with a version header")
    if int(entries[0][1]) != FORMAT_VERSION:
        raise ScenarioError(f"unsupported scenario version: {entries[0][1]}")

    fields: dict[str, str] = {}
    robots: list[tuple[Point2, float]] = []
    crashes: list[tuple[int, int]] = []
    byzantine: list[dict] = []
    sched: dict[str, str] = {}
    for key, value in entries[1:]:
        if key == "robot":
            parts = value.split()
            if len(parts) not in (2, 3):
                raise ScenarioError(f"robot entry needs 'x y [delta]': {value!r}")
            delta = float(parts[2]) if len(parts) == 3 else 1.0
            robots.append((Point2(float(parts[0]), float(parts[1])), delta))
        elif key == "crash":
            rid, step = value.split()
            crashes.append((int(rid), int(step)))
        elif key == "byzantine":
            parts = value.split()
            byzantine.append({"robot": int(parts[0]), "strategy": parts[1],
                              "designated": None, "targets": []})
        elif key == "byzantine.designated":
            if not byzantine:
                raise ScenarioError("byzantine.designated before any byzantine entry")
            byzantine[-1]["designated"] = int(value)
        elif key == "byzantine.target":
            if not byzantine:
                raise ScenarioError("byzantine.target before any byzantine entry")
            x, y = value.split()
            byzantine[-1]["targets"].append(Point2(float(x), float(y)))
        elif key.startswith("scheduler"):
            sched["kind" if key == "scheduler" else key.split(".", 1)[1]] = value
        else:
            fields[key] = value

    if not robots:
        raise ScenarioError("scenario declares no robots")
    if "kind" not in sched:
        raise ScenarioError("scenario declares no scheduler")

    schedule: tuple[frozenset[int], ...] = ()
    if "schedule" in sched:
        schedule = tuple(frozenset(int(t) for t in group.split())
                         for group in sched["schedule"].split("|"))
    spec = SchedulerSpec(
        kind=sched["kind"],
        order=tuple(int(t) for t in sched.get("order", "").split()),
        window=int(sched.get("window", 0)),
        k=int(sched.get("k", 0)),
        schedule=schedule,
        cap=int(sched.get("cap", 10_000)),
    )
    byz = tuple((b["robot"], ByzantineSpec(b["strategy"], b["designated"],
                                           tuple(b["targets"])))
                for b in byzantine)
    declared_f = int(fields.get("f", len(crashes) + len(byz)))
    plan = FaultPlan(tuple(crashes), byz, declared_f)

    byz_delta = fields.get("byz_delta", "inf")
    scenario = Scenario(
        name=fields.get("name", "unnamed"),
        robots=tuple(robots),
        algorithm=fields.get("algorithm", "nearest-neighbor"),
        scheduler=spec,
        seed=int(fields.get("seed", 0)),
        max_steps=int(fields.get("max_steps", 10_000)),
        goal=fields.get("goal", "strong"),
        multiplicity=ObservationMode(fields.get("multiplicity", "off")),
        fault_plan=plan,
        eps_snap=float(fields.get("eps_snap", EPS_SNAP)),
        recurrence_check=fields.get("recurrence_check", "on") != "off",
        recurrence_mode=fields.get("recurrence_mode", "anonymous"),
        blocked_rule=fields.get("blocked_rule", "strict-between"),
        byz_delta=float(byz_delta),
        expect=fields.get("expect"),
    )
    scenario.validate()
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def dump_scenario(s: Scenario) -> str:
    lines = [f"version = {FORMAT_VERSION}", f"name = {s.name}",
             f"algorithm = {s.algorithm}", f"seed = {s.seed}",
             f"max_steps = {s.max_steps}", f"goal = {s.goal}",
             f"multiplicity = {s.multiplicity.value}",
             f"eps_snap = {s.eps_snap!r}",
             f"recurrence_check = {'on' if s.recurrence_check else 'off'}",
             f"recurrence_mode = {s.recurrence_mode}",
             f"blocked_rule = {s.blocked_rule}"]
    if math.isfinite(s.byz_delta):
        lines.append(f"byz_delta = {s.byz_delta!r}")
    if s.expect:
        lines.append(f"expect = {s.expect}")
    if s.fault_plan.f:
        lines.append(f"f = {s.fault_plan.f}")
    for pos, delta in s.robots:
        lines.append(f"robot = {pos.x!r} {pos.y!r} {delta!r}")
    sp = s.scheduler
    lines.append(f"scheduler = {sp.kind}")
    if sp.order:
        lines.append("scheduler.order = " + " ".join(str(i) for i in sp.order))
    if sp.window:
        lines.append(f"scheduler.window = {sp.window}")
    if sp.k:
        lines.append(f"scheduler.k = {sp.k}")
    if sp.schedule:
        lines.append("scheduler.schedule = " + " | ".join(
            " ".join(str(i) for i in sorted(group)) for group in sp.schedule))
    for rid, step in s.fault_plan.crashes:
        lines.append(f"crash = {rid} {step}")
    for rid, spec in s.fault_plan.byzantine:
        lines.append(f"byzantine = {rid} {spec.strategy}")
        if spec.designated is not None:
            lines.append(f"byzantine.designated = {spec.designated}")
        for t in spec.targets:
            lines.append(f"byzantine.target = {t.x!r} {t.y!r}")
    return "\n".join(lines) + "\n"
