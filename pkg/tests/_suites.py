"""Nine randomized invariant suites over engine runs. Each suite raises
AssertionError on the first violated invariant."""

from __future__ import annotations

import math
import random

from gathersim.algorithms import side_move_scaled_length, side_move_target
from gathersim.geometry import Point2, dist, point_in_hull, rotate, voronoi_cell
from gathersim.geometry import robots_on_segment
from gathersim.harness.engine import run
from gathersim.harness.scenario import Scenario
from gathersim.model import Observation, ObservationMode
from gathersim.faults import FaultPlan
from gathersim.schedulers import SchedulerSpec

from _oracles import segments_cross

TOL = 1e-9


def _random_robots(rng: random.Random, n: int, towers: bool,
                   uniform_delta: bool) -> tuple[tuple[Point2, float], ...]:
    locs = [Point2(rng.uniform(-10, 10), rng.uniform(-10, 10))
            for _ in range(n)]
    if towers:
        # collapse a random subset onto earlier locations to create towers
        for i in range(1, n):
            if rng.random() < 0.4:
                locs[i] = locs[rng.randrange(i)]
    if uniform_delta:
        delta = rng.uniform(0.5, 5.0)
        return tuple((p, delta) for p in locs)
    return tuple((p, rng.uniform(0.5, 5.0)) for p in locs)


def _scenario(rng: random.Random, robots, algorithm: str, scheduler: SchedulerSpec,
              steps: int = 3, **overrides) -> Scenario:
    multiplicity = (ObservationMode.WITH_MULTIPLICITY
                    if algorithm in ("det-ft", "det-ft-naive", "prob-ft")
                    or overrides.pop("with_multiplicity", False)
                    else ObservationMode.WITHOUT_MULTIPLICITY)
    return Scenario(
        name="property", robots=robots, algorithm=algorithm,
        scheduler=scheduler, seed=rng.randrange(2**31), max_steps=steps,
        goal="budget", multiplicity=multiplicity, recurrence_check=False,
        **overrides)


def suite_centralized_valence(count: int = 1000, seed: int = 101) -> None:
    """Activating a single robot changes the valence by at most one."""
    rng = random.Random(seed)
    algorithms = ("prob-basic", "nearest-neighbor", "det-ft", "prob-ft",
                  "barycenter")
    for _ in range(count):
        robots = _random_robots(rng, rng.randint(3, 6), towers=True,
                                uniform_delta=False)
        s = _scenario(rng, robots, rng.choice(algorithms),
                      SchedulerSpec("unfair-centralized"), steps=3)
        r = run(s)
        valences = [m.valence for m in r.metrics_series]
        for a, b in zip(valences, valences[1:]):
            assert abs(b - a) <= 1, f"valence jump {a}->{b} in {s.seed}"


def suite_sec_nonincreasing_prob_basic(count: int = 1000, seed: int = 102) -> None:
    """The probabilistic rule only targets occupied locations, so the
    smallest enclosing circle never grows."""
    rng = random.Random(seed)
    for _ in range(count):
        robots = _random_robots(rng, rng.randint(3, 6), towers=rng.random() < 0.5,
                                uniform_delta=False)
        s = _scenario(rng, robots, "prob-basic",
                      SchedulerSpec("fair-arbitrary", window=6), steps=3)
        r = run(s)
        radii = [m.sec.radius for m in r.metrics_series]
        for a, b in zip(radii, radii[1:]):
            assert b <= a + TOL * max(1.0, a), f"SEC grew {a}->{b} in {s.seed}"


def suite_mulmax_nondecreasing_det_ft(count: int = 1000, seed: int = 103) -> None:
    """Castle occupants never abandon the last castle, so the maximal
    multiplicity never drops under a centralized daemon."""
    rng = random.Random(seed)
    for _ in range(count):
        robots = _random_robots(rng, rng.randint(3, 6), towers=True,
                                uniform_delta=False)
        s = _scenario(rng, robots, "det-ft",
                      SchedulerSpec("unfair-centralized"), steps=3)
        r = run(s)
        mm = [m.mulmax for m in r.metrics_series]
        for a, b in zip(mm, mm[1:]):
            assert b >= a, f"mulmax dropped {a}->{b} in {s.seed}"


def suite_min_pair_distance_det_ft(count: int = 1000, seed: int = 104) -> None:
    """Starting from a distinct configuration, the minimum distance over
    robot pairs never grows under the deterministic crash-tolerant rule with a
    fair daemon (uniform reach), for as long as the configuration stays
    distinct."""
    rng = random.Random(seed)
    for _ in range(count):
        robots = _random_robots(rng, rng.randint(3, 6), towers=False,
                                uniform_delta=True)
        s = _scenario(rng, robots, "det-ft",
                      SchedulerSpec("fair-arbitrary", window=6), steps=3)
        r = run(s)
        by_step: dict[int, list[Point2]] = {}
        for rec in r.trace:
            by_step.setdefault(rec.step, []).append(Point2(rec.x, rec.y))
        dists = []
        for t in sorted(by_step):
            pos = by_step[t]
            dists.append(min(dist(a, b) for i, a in enumerate(pos)
                             for b in pos[i + 1:]))
        for a, b in zip(dists, dists[1:]):
            if a <= s.eps_snap:
                break  # a merge happened; the configuration left the scope
            assert b <= a + TOL * max(1.0, a), f"pair dist grew {a}->{b} in {s.seed}"


def suite_hull_containment_prob_ft(count: int = 1000, seed: int = 105) -> None:
    """The convex hull never grows under the probabilistic crash-tolerant
    rule, checked step over step whenever the current hull has positive area.
    (An escape from a degenerate collinear hull is the side move's purpose, so
    those steps are out of scope.)"""
    rng = random.Random(seed)
    for _ in range(count):
        robots = _random_robots(rng, rng.randint(3, 6), towers=rng.random() < 0.5,
                                uniform_delta=False)
        s = _scenario(rng, robots, "prob-ft",
                      SchedulerSpec("fair-arbitrary", window=6), steps=3)
        r = run(s)
        by_step: dict[int, list[Point2]] = {}
        for rec in r.trace:
            by_step.setdefault(rec.step, []).append(Point2(rec.x, rec.y))
        steps = sorted(by_step)
        for t0, t1 in zip(steps, steps[1:]):
            hull = list(r.metrics_series[t0].hull_vertices)
            if len(hull) < 3:
                continue
            for p in by_step[t1]:
                assert point_in_hull(p, hull, 1e-7), (
                    f"hull grew at step {t1} in {s.seed}")


def suite_unique_castle_persistence_prob_ft(count: int = 1000,
                                            seed: int = 106) -> None:
    """A unique castle of multiplicity >= 3 stays the unique castle at the
    same location."""
    rng = random.Random(seed)
    for _ in range(count):
        extra = rng.randint(2, 3)
        castle = Point2(rng.uniform(-10, 10), rng.uniform(-10, 10))
        mult = rng.randint(3, 4)
        locs = [castle] * mult
        while len(locs) < mult + extra:
            p = Point2(rng.uniform(-10, 10), rng.uniform(-10, 10))
            if all(dist(p, q) > 1.0 for q in locs):
                locs.append(p)
        robots = tuple((p, rng.uniform(0.5, 5.0)) for p in locs)
        s = _scenario(rng, robots, "prob-ft",
                      SchedulerSpec("fair-arbitrary", window=len(locs)), steps=3)
        r = run(s)
        for m in r.metrics_series:
            assert len(m.castles) == 1, f"castle no longer unique in {s.seed}"
            assert dist(m.castles[0], castle) <= TOL, (
                f"castle moved in {s.seed}")


def suite_closure(count: int = 1000, seed: int = 107) -> None:
    """Gathered configurations are absorbing: strong gathering persists for
    all three rules, weak gathering (crashed robots elsewhere) persists for
    the crash-tolerant rules."""
    rng = random.Random(seed)
    algorithms = ("prob-basic", "det-ft", "prob-ft")
    for _ in range(count):
        alg = rng.choice(algorithms)
        site = Point2(rng.uniform(-10, 10), rng.uniform(-10, 10))
        n = rng.randint(3, 6)
        weak = alg != "prob-basic" and rng.random() < 0.5
        robots = [(site, rng.uniform(0.5, 5.0)) for _ in range(n)]
        plan = FaultPlan()
        if weak:
            # one crashed robot stranded away from the gathering point
            robots[-1] = (Point2(site.x + rng.uniform(2, 8), site.y),
                          robots[-1][1])
            plan = FaultPlan(crashes=((n - 1, 0),), f=1)
        s = _scenario(rng, tuple(robots), alg,
                      SchedulerSpec("fair-arbitrary", window=n), steps=3,
                      fault_plan=plan)
        r = run(s)
        wanted = ("weak", "strong") if weak else ("strong",)
        for g in r.gathering_series:
            assert g.value in wanted, f"closure broken ({g.value}) in {s.seed}"


def suite_side_move_predicates(count: int = 1000, seed: int = 108) -> None:
    """The side-move target is strictly closer to the castle than the mover,
    lies in the castle's Voronoi cell over the castle set, and its segment to
    the castle is free of blocking robots."""
    rng = random.Random(seed)
    done = 0
    while done < count:
        d = rng.uniform(2.0, 10.0)
        ang = rng.uniform(0.0, 6.28)
        q = rotate(Point2(d, 0.0), ang)
        mult = rng.randint(2, 3)
        points = [Point2(0.0, 0.0), q]
        counts = [1, mult]
        for _ in range(mult - 1):  # blockers strictly between mover and castle
            t = rng.uniform(0.25, 0.75)
            points.append(Point2(q.x * t, q.y * t))
            counts.append(1)
        if rng.random() < 0.6:  # second castle shaping the Voronoi cell
            while True:
                c2 = Point2(rng.uniform(-25, 25), rng.uniform(-25, 25))
                if dist(c2, q) > 1.0 and dist(c2, Point2(0, 0)) > d + 0.5:
                    break
            points.append(c2)
            counts.append(mult)
        for _ in range(rng.randint(0, 2)):  # bystanders off the corridor
            p = Point2(rng.uniform(-25, 25), rng.uniform(-25, 25))
            if min(dist(p, e) for e in points) > 0.5 and abs(
                    rotate(p, -ang).y) > 0.5:
                points.append(p)
                counts.append(1)
        obs = Observation(ObservationMode.WITH_MULTIPLICITY,
                          tuple(points), tuple(counts))
        target = side_move_target(Point2(0.0, 0.0), q, obs)
        castles = obs.maxmult()
        assert dist(target, q) < d, "target not closer to castle"
        assert voronoi_cell(q, castles, 1e-9).contains(target, 1e-7), (
            "target outside castle cell")
        on_seg = robots_on_segment(target, q, list(points), 1e-9 * d,
                                   include_p=False, include_q=True)
        assert on_seg == 1, f"{on_seg} occupied locations on target segment"
        done += 1


def suite_scaled_length(count: int = 1000, seed: int = 109) -> None:
    """The scaled detour length is strictly increasing in the position ratio
    and detour segments for different ratios never cross."""
    rng = random.Random(seed)
    for _ in range(count):
        theta = rng.uniform(0.01, 1.55)
        m = rng.choice([-1, 1]) * rng.uniform(0.1, 100.0)
        a1 = rng.uniform(0.01, 0.99)
        a2 = rng.uniform(a1 + 0.005, 1.0)
        l1 = side_move_scaled_length(a1, theta, m)
        l2 = side_move_scaled_length(a2, theta, m)
        assert l1 < l2, f"not monotone: {l1} >= {l2} at {theta}, {m}"
        ray = Point2(math.cos(theta), -math.sin(theta))
        p1, q1 = Point2(a1, 0.0), Point2(ray.x * l1, ray.y * l1)
        p2, q2 = Point2(a2, 0.0), Point2(ray.x * l2, ray.y * l2)
        assert not segments_cross(p1, q1, p2, q2), (
            f"segments cross at {theta}, {m}, {a1}, {a2}")


ALL_SUITES = {
    "centralized-valence": suite_centralized_valence,
    "sec-nonincreasing": suite_sec_nonincreasing_prob_basic,
    "mulmax-nondecreasing": suite_mulmax_nondecreasing_det_ft,
    "min-pair-distance": suite_min_pair_distance_det_ft,
    "hull-containment": suite_hull_containment_prob_ft,
    "unique-castle-persistence": suite_unique_castle_persistence_prob_ft,
    "closure": suite_closure,
    "side-move-predicates": suite_side_move_predicates,
    "scaled-length": suite_scaled_length,
}
