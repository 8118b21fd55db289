"""Observation frames, atomic move semantics, metrics, gathering predicates,
and recurrence detection."""

from __future__ import annotations

import math
import random

import pytest

from gathersim.geometry import Point2, dist
from gathersim.model import (
    Configuration,
    Gathering,
    ObservationFrame,
    ObservationMode,
    RecurrenceDetector,
    RobotState,
    RobotStatus,
    apply_moves,
    detect_recurrence,
    is_gathered,
    location_groups,
    metrics,
    min_robot_pair_distance,
    observe,
    snap_to_positions,
)


def _config(*positions: tuple[float, float], delta: float = 1.0,
            statuses: tuple[RobotStatus, ...] = ()) -> Configuration:
    robots = []
    for i, (x, y) in enumerate(positions):
        status = statuses[i] if i < len(statuses) else RobotStatus.CORRECT
        robots.append(RobotState(Point2(x, y), delta, status))
    return Configuration(tuple(robots))


def test_frame_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        frame = ObservationFrame(
            Point2(rng.uniform(-5, 5), rng.uniform(-5, 5)),
            rotation=rng.uniform(0, 2 * math.pi),
            scale=10 ** rng.uniform(-1, 1),
            chirality=rng.choice([1, -1]))
        p = Point2(rng.uniform(-5, 5), rng.uniform(-5, 5))
        back = frame.to_global(frame.to_local(p))
        assert dist(back, p) <= 1e-12
        assert dist(frame.to_local(frame.translation), Point2(0, 0)) <= 1e-12


def test_frame_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ObservationFrame(Point2(0, 0), scale=0.0)
    with pytest.raises(ValueError):
        ObservationFrame(Point2(0, 0), chirality=0)


def test_observe_groups_and_multiplicity():
    config = _config((0, 0), (0, 0), (3, 0), (3, 0), (3, 0))
    frame = ObservationFrame(Point2(0, 0), rotation=math.pi / 2, scale=2.0)
    obs = observe(config, 0, frame, ObservationMode.WITH_MULTIPLICITY)
    assert obs.valence == 2
    assert sorted(obs.counts) == [2, 3]
    assert obs.origin_count() == 2
    assert obs.mulmax == 3
    # own group sits at the exact origin regardless of the frame
    origin = next(p for p, c in zip(obs.points, obs.counts) if c == 2)
    assert origin == Point2(0.0, 0.0)

    blind = observe(config, 0, frame, ObservationMode.WITHOUT_MULTIPLICITY)
    assert blind.counts == (1, 1)
    with pytest.raises(ValueError):
        _ = blind.mulmax


def test_observe_refuses_crashed_observer():
    config = _config((0, 0), (1, 0), statuses=(RobotStatus.CRASHED,))
    with pytest.raises(ValueError):
        observe(config, 0, ObservationFrame(Point2(0, 0)),
                ObservationMode.WITH_MULTIPLICITY)


def test_apply_moves_exact_landing_within_reach():
    config = _config((0, 0), (0.5, 0), delta=1.0)
    target = Point2(0.5, 0.0)
    after = apply_moves(config, {0: target})
    assert after.robots[0].position == target  # bit-exact landing
    assert after.step == 1


def test_apply_moves_cuts_at_exact_delta():
    config = _config((0, 0), (10, 0), delta=1.0)
    after = apply_moves(config, {0: Point2(10, 0)})
    assert after.robots[0].position == Point2(1.0, 0.0)


def test_apply_moves_snaps_cut_point_to_occupied_position():
    config = _config((0, 0), (1.0 + 1e-12, 0), (10, 0), delta=1.0)
    after = apply_moves(config, {0: Point2(10, 0)})
    assert after.robots[0].position == config.robots[1].position


def test_apply_moves_rejects_crashed_and_nonfinite():
    config = _config((0, 0), (1, 0), statuses=(RobotStatus.CRASHED,))
    with pytest.raises(ValueError):
        apply_moves(config, {0: Point2(1, 0)})
    config = _config((0, 0))
    with pytest.raises(ValueError):
        apply_moves(config, {0: Point2(math.inf, 0)})


def test_snap_prefers_nearest_position():
    positions = [Point2(0, 0), Point2(1, 0)]
    assert snap_to_positions(Point2(0.9999999999, 0), positions) == Point2(1, 0)
    far = Point2(0.5, 0.5)
    assert snap_to_positions(far, positions) == far


def test_metrics_counts():
    config = _config((0, 0), (0, 0), (0, 0), (4, 0), (4, 0), (9, 0))
    m = metrics(config)
    assert m.valence == 3
    assert m.mulmax == 3
    assert m.castles == (Point2(0, 0),)
    assert set(m.towers) == {Point2(0, 0), Point2(4, 0)}
    assert m.nearest_neighbor_distance == 4.0
    assert abs(m.sec_diameter - 9.0) <= 1e-12
    assert min_robot_pair_distance(config) == 0.0


def test_is_gathered_cases():
    assert is_gathered(_config((1, 1), (1, 1))) is Gathering.STRONG
    # unique castle holding every correct robot, crashed robot elsewhere
    weak = _config((0, 0), (0, 0), (5, 0),
                   statuses=(RobotStatus.CORRECT, RobotStatus.CORRECT,
                             RobotStatus.CRASHED))
    assert is_gathered(weak) is Gathering.WEAK
    # two castles: no unique gathering point
    assert is_gathered(_config((0, 0), (0, 0), (5, 0), (5, 0))) is Gathering.NO
    assert is_gathered(_config((0, 0), (0, 0), (5, 0))) is Gathering.NO


def test_location_groups_eps():
    config = _config((0, 0), (0, 1e-12), (1, 0))
    groups = location_groups(config, 1e-9)
    assert [sorted(m) for _, m in groups] == [[0, 1], [2]]


def test_recurrence_anonymous_ignores_identity():
    a = _config((0, 0), (5, 0))
    b = _config((5, 0), (0, 0))  # same multiset, swapped ids
    assert detect_recurrence([a, b]) == (0, 1)
    assert detect_recurrence([a, b], mode="labeled") is None
    assert detect_recurrence([a, b, a], mode="labeled") == (0, 2)


def test_recurrence_equivalence_mode_matches_shape():
    a = _config((0, 0), (0, 0), (5, 0))
    b = _config((2, 0), (2, 0), (7, 0))  # translated: same partition, same gaps
    c = _config((0, 0), (0, 0), (6, 0))  # different inter-group distance
    assert detect_recurrence([a, b], mode="equivalence") == (0, 1)
    assert detect_recurrence([a, c], mode="equivalence") is None


def test_recurrence_detector_indexing():
    det = RecurrenceDetector()
    a = _config((0, 0), (5, 0))
    c = _config((1, 0), (5, 0))
    assert det.push(a) is None
    assert det.push(c) is None
    assert det.push(a) == (0, 2)
    with pytest.raises(ValueError):
        detect_recurrence([])
