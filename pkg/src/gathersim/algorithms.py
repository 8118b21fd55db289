"""Robot decision rules: probabilistic gathering, deterministic crash-tolerant
gathering with a disambiguated side move, probabilistic crash-tolerant
gathering, the two-robot rule, a barycenter baseline, and a nearest-neighbor
rule used by the impossibility demos."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from gathersim.geometry import (
    EPS_SNAP,
    GeometryError,
    Point2,
    convex_hull_region,
    dist,
    norm,
    point_to_segment_distance,
    ray_region_exit,
    rotate,
    sub,
    unit,
    voronoi_cell,
)
from gathersim.model import Observation, ObservationMode


class DecisionKind(enum.Enum):
    STAY = "stay"
    MOVE_TO = "move"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    target: Optional[Point2] = None

    @staticmethod
    def stay() -> "Decision":
        return Decision(DecisionKind.STAY)

    @staticmethod
    def move_to(p: Point2) -> "Decision":
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise ValueError("non-finite decision target")
        return Decision(DecisionKind.MOVE_TO, p)


class RandomSource:
    """Seeded deterministic stream; named substreams derive independent
    streams from the same root seed."""

    def __init__(self, seed: int | str) -> None:
        self._seed = str(seed)
        self._rng = random.Random(self._seed)

    @property
    def seed(self) -> str:
        return self._seed

    def substream(self, name: str) -> "RandomSource":
        return RandomSource(f"{self._seed}/{name}")

    def random(self) -> float:
        return self._rng.random()

    def uniform(self, a: float, b: float) -> float:
        return self._rng.uniform(a, b)

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def choice(self, seq: Sequence):
        return seq[self._rng.randrange(len(seq))]

    def shuffle(self, seq: list) -> None:
        self._rng.shuffle(seq)

    def raw(self) -> random.Random:
        return self._rng


# --- canonical frame ---
#
# Tie-breaking and the side move's clockwise sector must not depend on the
# private frame, so angles are computed in a canonical frame derived from the
# observed point set itself: among all rotations placing one observed point on
# the +x axis, both reflections, scaled by the largest observed distance, pick
# the transform whose rounded sorted image is lexicographically smallest.


class CanonicalFrame:
    def __init__(self, points: Sequence[Point2]) -> None:
        nonzero = [p for p in points if norm(p) > 1e-15]
        if not nonzero:
            self._cos, self._sin, self._chir, self._scale = 1.0, 0.0, 1, 1.0
            return
        s = 1.0 / max(norm(p) for p in nonzero)
        best_key = None
        best = (1.0, 0.0, 1)
        for anchor in nonzero:
            n = norm(anchor)
            c, sn = anchor.x / n, anchor.y / n
            for chir in (1, -1):
                key = tuple(sorted(
                    (round(v.x, 9), round(v.y, 9))
                    for v in (self._apply(p, c, sn, chir, s) for p in points)))
                if best_key is None or key < best_key:
                    best_key = key
                    best = (c, sn, chir)
        self._cos, self._sin, self._chir = best
        self._scale = s

    @staticmethod
    def _apply(p: Point2, c: float, sn: float, chir: int, s: float) -> Point2:
        y = -p.y if chir < 0 else p.y
        return Point2((p.x * c + y * sn) * s, (-p.x * sn + y * c) * s)

    def to_canon(self, p: Point2) -> Point2:
        return self._apply(p, self._cos, self._sin, self._chir, self._scale)

    def from_canon(self, p: Point2) -> Point2:
        x, y = p.x / self._scale, p.y / self._scale
        gx = x * self._cos - y * self._sin
        gy = x * self._sin + y * self._cos
        if self._chir < 0:
            gy = -gy
        return Point2(gx, gy)

    def angle(self, p: Point2) -> float:
        q = self.to_canon(p)
        a = math.atan2(q.y, q.x)
        return a + 2 * math.pi if a < 0 else a


def _canonical_sort_key(frame: CanonicalFrame, p: Point2) -> tuple:
    q = frame.to_canon(p)
    return (round(q.x, 9), round(q.y, 9))


def _nearest_point(candidates: Sequence[Point2], frame: CanonicalFrame) -> Point2:
    return min(candidates,
               key=lambda q: (round(norm(q), 12), round(frame.angle(q), 9),
                              _canonical_sort_key(frame, q)))


# --- decision rules ---


def alg_prob_basic(obs: Observation, rng: RandomSource,
                   include_self: bool = False) -> Decision:
    """With probability 1/valence move to a uniformly chosen observed
    location. The default choice set excludes the robot's own location, so
    every successful coin yields an actual move."""
    v = obs.valence
    if v == 1:
        return Decision.stay()
    alpha = 1.0 / v
    if rng.random() >= alpha:
        return Decision.stay()
    frame = CanonicalFrame(obs.points)
    candidates = sorted(obs.points, key=lambda p: _canonical_sort_key(frame, p))
    if not include_self:
        candidates = [p for p in candidates if norm(p) > 1e-15]
    return Decision.move_to(rng.choice(candidates))


def alg_two_robot_det(obs: Observation) -> Decision:
    if obs.valence == 1:
        return Decision.stay()
    if obs.valence != 2:
        raise ValueError("two-robot rule misapplied")
    other = next(p for p in obs.points if norm(p) > 1e-15)
    return Decision.move_to(other)


def alg_barycenter(obs: Observation) -> Decision:
    total = sum(obs.counts)
    x = sum(p.x * c for p, c in zip(obs.points, obs.counts)) / total
    y = sum(p.y * c for p, c in zip(obs.points, obs.counts)) / total
    return Decision.move_to(Point2(x, y))


def alg_nearest_neighbor(obs: Observation) -> Decision:
    candidates = [p for p in obs.points if norm(p) > 1e-15]
    if not candidates:
        return Decision.stay()
    frame = CanonicalFrame(obs.points)
    return Decision.move_to(_nearest_point(candidates, frame))


BLOCKED_RULE_DEFAULT = "strict-between"


def _blocked(obs: Observation, q: Point2, rule: str) -> bool:
    """Decide whether the straight move from the origin to castle q is
    blocked by robots on the segment."""
    mm = obs.mulmax
    d = norm(q)
    eps_seg = 1e-7 * d
    between = 0
    at_q = 0
    for p, c in zip(obs.points, obs.counts):
        if norm(p) <= eps_seg:
            continue
        if dist(p, q) <= eps_seg:
            at_q = c
            continue
        if point_to_segment_distance(p, Point2(0.0, 0.0), q) <= eps_seg:
            between += c
    if rule == "strict-between":
        # blocked when the strictly-between robots can already outnumber the
        # castle being approached; never blocked in distinct configurations
        return between >= max(mm - 1, 1)
    if rule == "listing":
        return not (between + at_q < 2 * mm)
    raise ValueError(f"unknown blocked rule: {rule}")


def side_move_target(p: Point2, q: Point2, obs: Observation,
                     eps: float = EPS_SNAP) -> Point2:
    """Lateral detour target inside the empty clockwise sector, the disc with
    diameter pq, and the Voronoi cell of q over the castle set."""
    if obs.mode is not ObservationMode.WITH_MULTIPLICITY:
        raise ValueError("side move needs multiplicity observations")
    if dist(p, q) <= eps:
        raise GeometryError("side move with p colocated with q")
    frame = CanonicalFrame(obs.points)
    pc = frame.to_canon(p)
    qc = frame.to_canon(q)
    castles = [frame.to_canon(c) for c in obs.maxmult()]
    eps_c = 1e-9
    cell = voronoi_cell(qc, castles, eps_c)
    if not cell.contains(pc, 1e-7):
        raise GeometryError("mover outside the Voronoi cell of its castle")

    u = unit(sub(pc, qc))
    base = math.atan2(u.y, u.x)
    angle_tol = 1e-9

    v_p = ray_region_exit(qc, u, cell)
    if v_p is None:
        alpha = 0.5
    else:
        alpha = min(dist(qc, pc) / dist(qc, v_p), 1.0)
    if alpha <= 0:
        raise GeometryError("degenerate side-move geometry")

    # the detour may stay inside the convex hull of the observed points so the
    # hull never grows; a degenerate (collinear) hull leaves the detour free,
    # since escaping the line is the point of the side move there
    canon_points = [frame.to_canon(r) for r in obs.points]
    hull = convex_hull_region(canon_points)

    def candidate(sign: int) -> tuple[float, Point2]:
        # empty sector on one side: smallest angular offset among cell robots
        theta = math.pi
        for r in obs.points:
            rc = frame.to_canon(r)
            if dist(rc, qc) <= eps_c or dist(rc, pc) <= eps_c:
                continue
            if not cell.contains(rc, eps_c):
                continue
            ang = math.atan2(rc.y - qc.y, rc.x - qc.x)
            phi = (sign * (base - ang)) % (2 * math.pi)
            if phi <= angle_tol or phi >= 2 * math.pi - angle_tol:
                continue
            theta = min(theta, phi)
        theta_plus = theta / 3.0
        floor = eps_c * max(1.0, dist(pc, qc))
        clear = 1e-6 * max(1.0, dist(pc, qc))
        # any angle in (0, theta) keeps the ray inside the empty sector; halve
        # the trisection angle while the ray exits the hull too early, but
        # never accept a detour segment hugging an observed robot
        for _ in range(60):
            d = rotate(u, -sign * theta_plus)
            v_a = ray_region_exit(qc, d, cell)
            len_a = dist(qc, v_a) if v_a is not None else math.inf
            len_b = dist(pc, qc) * math.cos(theta_plus)
            radius = alpha * min(len_a, len_b)
            if hull is not None:
                exit_h = ray_region_exit(qc, d, hull)
                if exit_h is not None:
                    radius = min(radius, dist(qc, exit_h))
            if radius > floor:
                tc = Point2(qc.x + d.x * radius, qc.y + d.y * radius)
                if all(dist(rc, qc) <= eps_c
                       or point_to_segment_distance(rc, qc, tc) > clear
                       for rc in canon_points):
                    return radius, d
            theta_plus /= 2.0
        return 0.0, u

    radius_cw, d_cw = candidate(1)
    radius_ccw, d_ccw = candidate(-1)
    radius, d_a = ((radius_cw, d_cw) if radius_cw >= radius_ccw
                   else (radius_ccw, d_ccw))
    if radius <= eps_c:
        raise GeometryError("side-move detour collapsed to the castle")
    target_c = Point2(qc.x + d_a.x * radius, qc.y + d_a.y * radius)
    return frame.from_canon(target_c)


def side_move_scaled_length(alpha: float, theta_plus: float, m: float) -> float:
    """Scaled detour length preserving the position ratio along the detour ray:
    the minimum of a disc-chord branch and a cell-boundary branch; the second
    branch is dropped when its denominator is non-positive (unbounded case)."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if not 0 < theta_plus < math.pi / 2:
        raise ValueError("theta_plus must be in (0, pi/2)")
    a1 = alpha * alpha * math.cos(theta_plus)
    denom = math.cos(theta_plus) - math.sin(theta_plus) / m
    if denom <= 0:
        return a1
    return min(a1, alpha / denom)


def alg_det_ft(obs: Observation, naive: bool = False,
               blocked_rule: str = BLOCKED_RULE_DEFAULT) -> Decision:
    """Move straight toward the nearest castle unless blocked, in which case
    take a side move; stay when already in a castle and no other castle
    exists. The naive variant always moves straight."""
    if obs.mode is not ObservationMode.WITH_MULTIPLICITY:
        raise ValueError("deterministic crash-tolerant rule needs multiplicity")
    candidates = [q for q in obs.maxmult() if norm(q) > 1e-15]
    if not candidates:
        return Decision.stay()
    frame = CanonicalFrame(obs.points)
    q = _nearest_point(candidates, frame)
    if naive or not _blocked(obs, q, blocked_rule):
        return Decision.move_to(q)
    try:
        return Decision.move_to(side_move_target(Point2(0.0, 0.0), q, obs))
    except GeometryError:
        return Decision.stay()


def alg_prob_ft(obs: Observation, rng: RandomSource,
                blocked_rule: str = BLOCKED_RULE_DEFAULT) -> Decision:
    """Outside every castle: deterministic crash-tolerant move. In the unique
    castle: stay. In one of several castles: move with probability
    min(1/mulmax, 1/2)."""
    if obs.mode is not ObservationMode.WITH_MULTIPLICITY:
        raise ValueError("probabilistic crash-tolerant rule needs multiplicity")
    mm = obs.mulmax
    if obs.origin_count() < mm:
        return alg_det_ft(obs, blocked_rule=blocked_rule)
    if len(obs.maxmult()) == 1:
        return Decision.stay()
    alpha = min(1.0 / mm, 0.5)
    if rng.random() < alpha:
        return alg_det_ft(obs, blocked_rule=blocked_rule)
    return Decision.stay()


ALGORITHM_NAMES = (
    "prob-basic",
    "det-ft",
    "det-ft-naive",
    "prob-ft",
    "two-robot",
    "barycenter",
    "nearest-neighbor",
)


def requires_multiplicity(name: str) -> bool:
    return name in ("det-ft", "det-ft-naive", "prob-ft")


def decide(name: str, obs: Observation, rng: RandomSource,
           blocked_rule: str = BLOCKED_RULE_DEFAULT) -> Decision:
    if name == "prob-basic":
        return alg_prob_basic(obs, rng)
    if name == "det-ft":
        return alg_det_ft(obs, blocked_rule=blocked_rule)
    if name == "det-ft-naive":
        return alg_det_ft(obs, naive=True, blocked_rule=blocked_rule)
    if name == "prob-ft":
        return alg_prob_ft(obs, rng, blocked_rule=blocked_rule)
    if name == "two-robot":
        return alg_two_robot_det(obs)
    if name == "barycenter":
        return alg_barycenter(obs)
    if name == "nearest-neighbor":
        return alg_nearest_neighbor(obs)
    raise ValueError(f"unknown algorithm: {name}")
