"""Crash plans and Byzantine adversary controllers."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from gathersim.geometry import EPS_SNAP, Point2, dist, sub, unit
from gathersim.model import Configuration, RobotStatus, location_groups


@dataclass(frozen=True)
class ByzantineSpec:
    strategy: str  # attractor | gathered-breaker | balancer | switch | scripted
    designated: Optional[int] = None
    targets: tuple[Point2, ...] = ()


@dataclass(frozen=True)
class FaultPlan:
    crashes: tuple[tuple[int, int], ...] = ()  # (robot, step)
    byzantine: tuple[tuple[int, ByzantineSpec], ...] = ()
    f: int = 0

    def validate(self, n: int) -> None:
        ids = [r for r, _ in self.crashes] + [r for r, _ in self.byzantine]
        if len(set(ids)) != len(ids):
            raise ValueError("robot appears in more than one fault list")
        if len(ids) > self.f:
            raise ValueError("fault plan exceeds declared budget f")
        if self.f >= n:
            raise ValueError("need f < n: at least one correct robot")
        if any(r < 0 or r >= n for r in ids):
            raise ValueError("fault plan references unknown robot")


def apply_crashes(config: Configuration, plan: FaultPlan, step: int) -> Configuration:
    """Mark robots whose crash step has arrived, before any activation."""
    robots = list(config.robots)
    changed = False
    for rid, at in plan.crashes:
        state = robots[rid]
        if at <= step and state.status is RobotStatus.CORRECT:
            robots[rid] = replace(state, status=RobotStatus.CRASHED, crashed_at=step)
            changed = True
    if not changed:
        return config
    return Configuration(tuple(robots), config.step)


def byz_k_threshold(n: int, f: int) -> int:
    """Scheduler bound at or above which the Byzantine adversaries can block
    deterministic weak gathering."""
    if f < 1 or f >= n:
        raise ValueError("need 1 <= f < n")
    if n % 2 == 0:
        return math.ceil((n - f) / f)
    if f == 1:
        raise ValueError("threshold undefined for odd n with f = 1")
    return math.ceil((n - f) / (f - 1))


class ByzantineController:
    """Per-run adversary state for one Byzantine robot. decide returns a
    global target or None for stay."""

    def decide(self, config: Configuration, robot: int,
               eps: float = EPS_SNAP) -> Optional[Point2]:
        raise NotImplementedError


def _correct_ids(config: Configuration) -> list[int]:
    return [i for i, r in enumerate(config.robots)
            if r.status is RobotStatus.CORRECT]


class Attractor(ByzantineController):
    """Re-baiting lure: whenever a correct robot has reached the adversary's
    position, relocate to a fresh point that stays the victim's most
    attractive target, pulling it away from the other correct robots."""

    def decide(self, config: Configuration, robot: int,
               eps: float = EPS_SNAP) -> Optional[Point2]:
        me = config.robots[robot].position
        correct = _correct_ids(config)
        victims = [i for i in correct if dist(config.robots[i].position, me) <= eps]
        if not victims:
            return None
        victim = config.robots[victims[0]].position
        others = [config.robots[i].position for i in correct if i not in victims]
        if not others:
            return Point2(victim.x + 1.0, victim.y)
        nearest = min(others, key=lambda p: dist(p, victim))
        d = dist(nearest, victim)
        if d <= eps:
            return Point2(victim.x + 1.0, victim.y)
        away = unit(sub(victim, nearest))
        return Point2(victim.x + away.x * d / 4.0, victim.y + away.y * d / 4.0)


class GatheredBreaker(ByzantineController):
    """Whenever all correct robots are colocated, move to a distinct point the
    correct rule will chase, alternating between the two gathering sites."""

    def __init__(self) -> None:
        self._previous: Optional[Point2] = None

    def decide(self, config: Configuration, robot: int,
               eps: float = EPS_SNAP) -> Optional[Point2]:
        correct = _correct_ids(config)
        if not correct:
            return None
        site = config.robots[correct[0]].position
        if any(dist(config.robots[i].position, site) > eps for i in correct[1:]):
            return None
        if self._previous is not None and dist(self._previous, site) > eps:
            target = self._previous
        else:
            target = Point2(site.x + 1.0, site.y)
        self._previous = site
        return target


class Counterbalance(ByzantineController):
    """On bivalent configurations, move from the larger group to the smaller
    one to restore the symmetric split. Stays otherwise."""

    def decide(self, config: Configuration, robot: int,
               eps: float = EPS_SNAP) -> Optional[Point2]:
        groups = location_groups(config, eps)
        if len(groups) != 2:
            return None
        (loc_a, mem_a), (loc_b, mem_b) = groups
        if len(mem_a) == len(mem_b):
            return None
        big_loc, big_mem, small_loc = ((loc_a, mem_a, loc_b)
                                       if len(mem_a) > len(mem_b)
                                       else (loc_b, mem_b, loc_a))
        if robot not in big_mem:
            return None
        return small_loc


class Balancer(Counterbalance):
    pass


class Switch(Counterbalance):
    """Counterbalance variant used by the odd-n blocking schedule; the
    designated switch robot is recorded for reporting."""

    def __init__(self, designated: Optional[int] = None) -> None:
        self.designated = designated


class ScriptedByz(ByzantineController):
    def __init__(self, targets: tuple[Point2, ...]) -> None:
        self._targets = list(targets)
        self._ptr = 0

    def decide(self, config: Configuration, robot: int,
               eps: float = EPS_SNAP) -> Optional[Point2]:
        if self._ptr >= len(self._targets):
            return None
        target = self._targets[self._ptr]
        self._ptr += 1
        return target


def make_controller(spec: ByzantineSpec) -> ByzantineController:
    if spec.strategy == "attractor":
        return Attractor()
    if spec.strategy == "gathered-breaker":
        return GatheredBreaker()
    if spec.strategy == "balancer":
        return Balancer()
    if spec.strategy == "switch":
        return Switch(spec.designated)
    if spec.strategy == "scripted":
        return ScriptedByz(spec.targets)
    raise ValueError(f"unknown byzantine strategy: {spec.strategy}")
