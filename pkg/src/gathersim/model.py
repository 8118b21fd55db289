"""Robot state, configurations, private observation frames, atomic move
semantics, configuration metrics, and recurrence detection."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from gathersim.geometry import (
    EPS_SNAP,
    Circle,
    Point2,
    convex_hull,
    dist,
    smallest_enclosing_circle,
)

RobotId = int


class RobotStatus(enum.Enum):
    CORRECT = "correct"
    CRASHED = "crashed"
    BYZANTINE = "byzantine"


class ObservationMode(enum.Enum):
    WITH_MULTIPLICITY = "on"
    WITHOUT_MULTIPLICITY = "off"


class Gathering(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    NO = "no"


@dataclass(frozen=True)
class RobotState:
    position: Point2
    delta_r: float
    status: RobotStatus = RobotStatus.CORRECT
    crashed_at: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.delta_r > 0:
            raise ValueError("delta_r must be positive")


@dataclass(frozen=True)
class Configuration:
    robots: tuple[RobotState, ...]
    step: int = 0

    @property
    def n(self) -> int:
        return len(self.robots)

    def positions(self) -> list[Point2]:
        return [r.position for r in self.robots]


def location_groups(config: Configuration,
                    eps: float = EPS_SNAP) -> list[tuple[Point2, list[RobotId]]]:
    """Group robots by colocation within eps. Each group is keyed by the
    position of its lowest-index member."""
    groups: list[tuple[Point2, list[RobotId]]] = []
    for i, r in enumerate(config.robots):
        for loc, members in groups:
            if dist(r.position, loc) <= eps:
                members.append(i)
                break
        else:
            groups.append((r.position, [i]))
    return groups


@dataclass(frozen=True)
class ObservationFrame:
    """Private coordinate frame of a robot. Maps global coordinates to local
    ones with the robot's own position at the exact origin."""

    translation: Point2
    rotation: float = 0.0
    scale: float = 1.0
    chirality: int = 1

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.chirality not in (1, -1):
            raise ValueError("chirality must be +1 or -1")

    def to_local(self, p: Point2) -> Point2:
        dx = p.x - self.translation.x
        dy = p.y - self.translation.y
        if self.chirality < 0:
            dy = -dy
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Point2((dx * c + dy * s) * self.scale, (-dx * s + dy * c) * self.scale)

    def to_global(self, p: Point2) -> Point2:
        x, y = p.x / self.scale, p.y / self.scale
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        dx = x * c - y * s
        dy = x * s + y * c
        if self.chirality < 0:
            dy = -dy
        return Point2(dx + self.translation.x, dy + self.translation.y)


@dataclass(frozen=True)
class Observation:
    """Distinct observed locations in local coordinates. counts carries the
    per-location multiplicity when the mode allows it, else all ones."""

    mode: ObservationMode
    points: tuple[Point2, ...]
    counts: tuple[int, ...]

    @property
    def valence(self) -> int:
        return len(self.points)

    @property
    def mulmax(self) -> int:
        if self.mode is not ObservationMode.WITH_MULTIPLICITY:
            raise ValueError("multiplicity not observable in this mode")
        return max(self.counts)

    def maxmult(self) -> list[Point2]:
        m = self.mulmax
        return [p for p, c in zip(self.points, self.counts) if c == m]

    def origin_count(self) -> int:
        for p, c in zip(self.points, self.counts):
            if p.x == 0.0 and p.y == 0.0:
                return c
        raise ValueError("observation does not contain the origin")


def observe(config: Configuration, robot: RobotId, frame: ObservationFrame,
            mode: ObservationMode, eps: float = EPS_SNAP) -> Observation:
    state = config.robots[robot]
    if state.status is RobotStatus.CRASHED:
        raise ValueError("crashed robots never observe")
    points: list[Point2] = []
    counts: list[int] = []
    for loc, members in location_groups(config, eps):
        if robot in members:
            # the observer's group maps to the exact local origin
            points.append(Point2(0.0, 0.0))
        else:
            points.append(frame.to_local(loc))
        counts.append(len(members))
    if mode is ObservationMode.WITHOUT_MULTIPLICITY:
        counts = [1] * len(points)
    return Observation(mode, tuple(points), tuple(counts))


def snap_to_positions(target: Point2, positions: list[Point2],
                      eps: float = EPS_SNAP) -> Point2:
    """Replace target with the nearest position within eps (bit-exact), so
    that colocation is exact. Ties broken by list order."""
    best: Optional[Point2] = None
    best_d = eps
    for p in positions:
        d = dist(target, p)
        if d <= best_d and (best is None or d < best_d):
            best, best_d = p, d
    return best if best is not None else target


def apply_moves(config: Configuration, moves: dict[RobotId, Point2],
                eps: float = EPS_SNAP) -> Configuration:
    """Apply all moves simultaneously from the pre-step snapshot. A mover
    whose target is within delta_r lands bit-exactly on it; otherwise it
    travels exactly delta_r along the straight segment toward the target."""
    pre_positions = config.positions()
    new_robots = list(config.robots)
    for rid, target in moves.items():
        state = config.robots[rid]
        if state.status is RobotStatus.CRASHED:
            raise ValueError(f"move requested for crashed robot {rid}")
        if not (math.isfinite(target.x) and math.isfinite(target.y)):
            raise ValueError("non-finite move target")
        d = dist(state.position, target)
        if d <= state.delta_r:
            landing = target
        else:
            f = state.delta_r / d
            landing = Point2(state.position.x + (target.x - state.position.x) * f,
                             state.position.y + (target.y - state.position.y) * f)
            landing = snap_to_positions(landing, pre_positions, eps)
        new_robots[rid] = replace(state, position=landing)
    return Configuration(tuple(new_robots), config.step + 1)


@dataclass(frozen=True)
class Metrics:
    valence: int
    mulmax: int
    castles: tuple[Point2, ...]
    towers: tuple[Point2, ...]
    nearest_neighbor_distance: float
    sec: Circle
    hull_vertices: tuple[Point2, ...]

    @property
    def sec_diameter(self) -> float:
        return 2.0 * self.sec.radius


def metrics(config: Configuration, eps: float = EPS_SNAP) -> Metrics:
    groups = location_groups(config, eps)
    locs = [loc for loc, _ in groups]
    counts = [len(members) for _, members in groups]
    mulmax = max(counts)
    castles = tuple(loc for loc, c in zip(locs, counts) if c == mulmax)
    towers = tuple(loc for loc, c in zip(locs, counts) if c >= 2)
    if len(locs) > 1:
        d = min(dist(a, b) for i, a in enumerate(locs) for b in locs[i + 1:])
    else:
        d = 0.0
    sec = smallest_enclosing_circle(locs)
    hull = tuple(convex_hull(locs))
    return Metrics(len(locs), mulmax, castles, towers, d, sec, hull)


def min_robot_pair_distance(config: Configuration) -> float:
    """Minimum distance over all robot pairs (0 when any two are colocated)."""
    pos = config.positions()
    if len(pos) < 2:
        return 0.0
    return min(dist(a, b) for i, a in enumerate(pos) for b in pos[i + 1:])


def is_gathered(config: Configuration, eps: float = EPS_SNAP) -> Gathering:
    groups = location_groups(config, eps)
    if len(groups) == 1:
        return Gathering.STRONG
    counts = [len(m) for _, m in groups]
    mulmax = max(counts)
    castle_indices = [i for i, c in enumerate(counts) if c == mulmax]
    if len(castle_indices) != 1:
        return Gathering.NO
    castle_members = set(groups[castle_indices[0]][1])
    correct = [i for i, r in enumerate(config.robots)
               if r.status is RobotStatus.CORRECT]
    if correct and all(i in castle_members for i in correct):
        return Gathering.WEAK
    return Gathering.NO


# --- recurrence detection ---


def _anonymous_key(config: Configuration, eps: float) -> tuple:
    return tuple(sorted((round(r.position.x / eps), round(r.position.y / eps))
                        for r in config.robots))


def _labeled_key(config: Configuration, eps: float) -> tuple:
    return tuple((round(r.position.x / eps), round(r.position.y / eps))
                 for r in config.robots)


def _equivalence_key(config: Configuration, eps: float) -> tuple:
    """Colocation partition of robot ids plus the inter-group distance
    profile: equal keys mean the same robots-to-groups assignment with the
    same geometry up to isometry."""
    groups = location_groups(config, eps)
    order = sorted(range(len(groups)), key=lambda i: tuple(groups[i][1]))
    ids = tuple(tuple(groups[i][1]) for i in order)
    dists = tuple(round(dist(groups[a][0], groups[b][0]) / eps)
                  for ai, a in enumerate(order) for b in order[ai + 1:])
    return (ids, dists)


_KEY_FUNCS = {
    "anonymous": _anonymous_key,
    "labeled": _labeled_key,
    "equivalence": _equivalence_key,
}


class RecurrenceDetector:
    """Rolling detector over a stream of configurations."""

    def __init__(self, eps: float = EPS_SNAP, mode: str = "anonymous") -> None:
        self._eps = eps
        self._key = _KEY_FUNCS[mode]
        self._seen: dict[tuple, int] = {}
        self._index = 0

    def push(self, config: Configuration) -> Optional[tuple[int, int]]:
        key = self._key(config, self._eps)
        index = self._index
        self._index += 1
        first = self._seen.get(key)
        if first is not None:
            return (first, index - first)
        self._seen[key] = index
        return None


def detect_recurrence(trace: list[Configuration], eps: float = EPS_SNAP,
                      mode: str = "anonymous") -> Optional[tuple[int, int]]:
    """Earliest repetition of the position multiset (anonymous), the
    id-labeled positions (labeled), or the colocation-partition shape
    (equivalence). Returns (first_index, period) or None."""
    if not trace:
        raise ValueError("empty trace")
    det = RecurrenceDetector(eps, mode)
    for config in trace:
        hit = det.push(config)
        if hit is not None:
            return hit
    return None
