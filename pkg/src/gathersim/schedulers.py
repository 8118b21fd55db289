"""Activation daemons: generators producing legal activation sets per
scheduler class, validators checking a history against a class, and the
scripted/adaptive adversarial schedules used by the impossibility demos."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from gathersim.algorithms import RandomSource
from gathersim.model import Configuration, RobotStatus, location_groups

SCHEDULER_KINDS = (
    "unfair-arbitrary",
    "unfair-centralized",
    "fair-arbitrary",
    "fair-centralized",
    "fair-k-bounded",
    "round-robin",
    "two-bounded-centralized",
    "fully-synchronous",
    "scripted",
    "k2-swap",
    "derandomizer",
)

CENTRALIZED_KINDS = (
    "unfair-centralized",
    "fair-centralized",
    "fair-k-bounded",
    "two-bounded-centralized",
    "k2-swap",
    "derandomizer",
)

DEFAULT_STARVATION_CAP = 10_000


@dataclass(frozen=True)
class SchedulerSpec:
    kind: str
    order: tuple[int, ...] = ()
    window: int = 0
    k: int = 0
    schedule: tuple[frozenset[int], ...] = ()
    cap: int = DEFAULT_STARVATION_CAP

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULER_KINDS:
            raise ValueError(f"unknown scheduler kind: {self.kind}")


def _eligible(config: Configuration) -> list[int]:
    ids = [i for i, r in enumerate(config.robots)
           if r.status is not RobotStatus.CRASHED]
    if not ids:
        raise ValueError("all robots crashed")
    return ids


def _correct(config: Configuration) -> list[int]:
    return [i for i, r in enumerate(config.robots)
            if r.status is RobotStatus.CORRECT]


class Scheduler:
    """Stateful activation generator owned by a single run."""

    def next_activation(self, config: Configuration) -> set[int]:
        raise NotImplementedError

    def notify(self, robot: int, moved: bool) -> None:
        """Feedback after the activation: whether the robot actually moved.
        Only the adaptive derandomizer uses it."""


class FullySynchronous(Scheduler):
    def next_activation(self, config: Configuration) -> set[int]:
        return set(_eligible(config))


class RoundRobin(Scheduler):
    """Fixed rotation; crashed robots stay in the rotation as no-ops so that
    bound accounting is unchanged."""

    def __init__(self, order: tuple[int, ...]) -> None:
        self._order = list(order)
        self._ptr = 0

    def next_activation(self, config: Configuration) -> set[int]:
        robot = self._order[self._ptr]
        self._ptr = (self._ptr + 1) % len(self._order)
        return {robot}


class Scripted(Scheduler):
    def __init__(self, schedule: tuple[frozenset[int], ...], cyclic: bool = True) -> None:
        if not schedule:
            raise ValueError("empty schedule")
        self._schedule = schedule
        self._cyclic = cyclic
        self._ptr = 0

    def next_activation(self, config: Configuration) -> set[int]:
        if self._ptr >= len(self._schedule):
            if not self._cyclic:
                raise ValueError("script exhausted")
            self._ptr = 0
        s = set(self._schedule[self._ptr])
        self._ptr += 1
        return s


class UnfairRandom(Scheduler):
    """Adversarial choice via rng with a starvation cap guaranteeing that
    every correct robot is activated infinitely often in the limit."""

    def __init__(self, rng: RandomSource, centralized: bool,
                 cap: int = DEFAULT_STARVATION_CAP) -> None:
        self._rng = rng
        self._centralized = centralized
        self._cap = cap
        self._last: dict[int, int] = {}
        self._step = 0

    def next_activation(self, config: Configuration) -> set[int]:
        ids = _eligible(config)
        due = [i for i in _correct(config)
               if self._step - self._last.get(i, -1) >= self._cap]
        if self._centralized:
            chosen = {due[0] if due else ids[self._rng.randrange(len(ids))]}
        else:
            mask = self._rng.randrange((1 << len(ids)) - 1) + 1
            chosen = {i for b, i in enumerate(ids) if mask >> b & 1}
            chosen.update(due)
        for i in chosen:
            self._last[i] = self._step
        self._step += 1
        return chosen


class FairArbitrary(Scheduler):
    def __init__(self, rng: RandomSource, window: int) -> None:
        if window < 1:
            raise ValueError("fairness window must be >= 1")
        self._rng = rng
        self._window = window
        self._last: dict[int, int] = {}
        self._step = 0

    def next_activation(self, config: Configuration) -> set[int]:
        ids = _eligible(config)
        mask = self._rng.randrange((1 << len(ids)) - 1) + 1
        chosen = {i for b, i in enumerate(ids) if mask >> b & 1}
        chosen.update(i for i in _correct(config)
                      if self._step - self._last.get(i, -1) >= self._window)
        for i in chosen:
            self._last[i] = self._step
        self._step += 1
        return chosen


class FairCentralized(Scheduler):
    def __init__(self, rng: RandomSource, window: int, n: int) -> None:
        if window < n:
            raise ValueError("fairness window must be >= number of robots")
        self._rng = rng
        self._window = window
        self._last: dict[int, int] = {}
        self._step = 0
        self._n = n

    def next_activation(self, config: Configuration) -> set[int]:
        ids = _eligible(config)
        correct = _correct(config)

        def starvation(i: int) -> int:
            # stagger virtual initial activations so forced picks are ordered
            return self._step - self._last.get(i, -1 - i)

        forced = [i for i in correct
                  if starvation(i) >= self._window - self._n + 1]
        if forced:
            robot = max(forced, key=starvation)
        else:
            robot = ids[self._rng.randrange(len(ids))]
        self._last[robot] = self._step
        self._step += 1
        return {robot}


class FairKBounded(Scheduler):
    """Centralized k-bounded generator: activates a uniformly random robot
    among those whose activation keeps every between-activations count at or
    below k. The least recently activated robot is always legal, so the
    generator never deadlocks, and the k-bound itself enforces fairness."""

    def __init__(self, rng: RandomSource, k: int, n: int) -> None:
        if k < 1:
            raise ValueError("k must be >= 1")
        self._rng = rng
        self._k = k
        # counts[s][r]: activations of r since the last activation of s
        self._counts = [[0] * n for _ in range(n)]

    def next_activation(self, config: Configuration) -> set[int]:
        ids = _eligible(config)
        legal = [r for r in ids
                 if all(self._counts[s][r] + 1 <= self._k
                        for s in ids if s != r)]
        if not legal:
            raise AssertionError("k-bounded generator deadlock")
        robot = legal[self._rng.randrange(len(legal))]
        for s in range(len(self._counts)):
            self._counts[s][robot] += 1
        self._counts[robot] = [0] * len(self._counts)
        return {robot}


class K2Swap(Scheduler):
    """Round-robin adversary that, upon reaching a 1-bivalent configuration
    with the distinct robot next in the rotation, swaps it with the robot two
    positions before the end of the upcoming pass. The swap delays each robot
    at most once, so the history stays 2-bounded."""

    def __init__(self, order: tuple[int, ...]) -> None:
        self._order = list(order)
        self._ptr = 0
        self._swapped = False

    def next_activation(self, config: Configuration) -> set[int]:
        n = len(self._order)
        if not self._swapped:
            groups = location_groups(config)
            if len(groups) == 2 and config.n >= 3:
                singles = [m for _, m in groups if len(m) == 1]
                if len(singles) == 1 and self._order[self._ptr] == singles[0][0]:
                    j = (self._ptr + n - 2) % n
                    self._order[self._ptr], self._order[j] = (
                        self._order[j], self._order[self._ptr])
                    self._swapped = True
        robot = self._order[self._ptr]
        self._ptr = (self._ptr + 1) % n
        return {robot}


class Derandomizer(Scheduler):
    """Re-activates the same robot until its decision is an actual move, then
    advances round-robin. Fair, albeit unbounded."""

    def __init__(self, order: tuple[int, ...]) -> None:
        self._order = list(order)
        self._idx = 0
        self._current: Optional[int] = None

    def next_activation(self, config: Configuration) -> set[int]:
        for _ in range(len(self._order)):
            robot = self._order[self._idx]
            if config.robots[robot].status is not RobotStatus.CRASHED:
                break
            self._idx = (self._idx + 1) % len(self._order)
        else:
            raise ValueError("all robots crashed")
        self._current = robot
        return {robot}

    def notify(self, robot: int, moved: bool) -> None:
        if robot == self._current and moved:
            self._idx = (self._idx + 1) % len(self._order)
            self._current = None


def make_scheduler(spec: SchedulerSpec, n: int, rng: RandomSource) -> Scheduler:
    order = spec.order if spec.order else tuple(range(n))
    kind = spec.kind
    if kind == "fully-synchronous":
        return FullySynchronous()
    if kind == "round-robin":
        return RoundRobin(order)
    if kind == "scripted":
        return Scripted(spec.schedule)
    if kind == "unfair-arbitrary":
        return UnfairRandom(rng, centralized=False, cap=spec.cap)
    if kind == "unfair-centralized":
        return UnfairRandom(rng, centralized=True, cap=spec.cap)
    if kind == "fair-arbitrary":
        return FairArbitrary(rng, spec.window or n)
    if kind == "fair-centralized":
        return FairCentralized(rng, spec.window or n, n)
    if kind == "fair-k-bounded":
        return FairKBounded(rng, spec.k or 1, n)
    if kind == "two-bounded-centralized":
        return FairKBounded(rng, 2, n)
    if kind == "k2-swap":
        return K2Swap(order)
    if kind == "derandomizer":
        return Derandomizer(order)
    raise ValueError(f"unknown scheduler kind: {kind}")


# --- history validation ---


def validate_history(spec: SchedulerSpec, history: list[set[int]], n: int,
                     eligible_per_step: Optional[list[set[int]]] = None) -> list[str]:
    """Check every constraint of the scheduler class on a finite history.
    Returns a list of violations; empty means the history is legal."""
    violations: list[str] = []
    for t, s in enumerate(history):
        if not s:
            violations.append(f"step {t}: empty activation set")
        if any(i < 0 or i >= n for i in s):
            violations.append(f"step {t}: robot id out of range")

    kind = spec.kind
    if kind in CENTRALIZED_KINDS:
        for t, s in enumerate(history):
            if len(s) != 1:
                violations.append(f"step {t}: centralized set of size {len(s)}")

    if kind == "fully-synchronous":
        for t, s in enumerate(history):
            expected = (eligible_per_step[t] if eligible_per_step is not None
                        else set(range(n)))
            if s != expected:
                violations.append(f"step {t}: not all eligible robots active")

    if kind == "round-robin":
        order = spec.order if spec.order else tuple(range(n))
        for t, s in enumerate(history):
            expected = {order[t % len(order)]}
            if s != expected:
                violations.append(f"step {t}: expected {expected}, got {s}")

    k = {"fair-k-bounded": spec.k, "two-bounded-centralized": 2,
         "k2-swap": 2}.get(kind, 0)
    if k:
        violations.extend(_check_k_bound(history, n, k))

    window = 0
    if kind in ("fair-arbitrary", "fair-centralized"):
        window = spec.window
    elif kind in ("fair-k-bounded", "two-bounded-centralized"):
        # between consecutive activations of a robot the others fire at most
        # k times each, so the legal gap is k*(n-1) + 1 steps
        window = (spec.k if kind == "fair-k-bounded" else 2) * max(n - 1, 1) + 1
    if window:
        exempt: set[int] = set()
        if eligible_per_step is not None and history:
            exempt = set(range(n)) - set.union(*[set(e) for e in eligible_per_step])
        violations.extend(_check_window(history, n, window, exempt))
    return violations


def _check_k_bound(history: list[set[int]], n: int, k: int) -> list[str]:
    violations: list[str] = []
    steps: dict[int, list[int]] = {r: [] for r in range(n)}
    for t, s in enumerate(history):
        for r in s:
            steps[r].append(t)
    for r in range(n):
        marks = steps[r]
        for a, b in zip(marks, marks[1:]):
            counts: dict[int, int] = {}
            for t in range(a + 1, b):
                for other in history[t]:
                    if other != r:
                        counts[other] = counts.get(other, 0) + 1
            for other, c in counts.items():
                if c > k:
                    violations.append(
                        f"robot {other} activated {c} > {k} times between "
                        f"activations of robot {r} at steps {a} and {b}")
    return violations


def _check_window(history: list[set[int]], n: int, window: int,
                  exempt: set[int]) -> list[str]:
    violations: list[str] = []
    activated_at: dict[int, list[int]] = {r: [] for r in range(n)}
    for t, s in enumerate(history):
        for r in s:
            activated_at[r].append(t)
    for r in range(n):
        if r in exempt:
            continue
        marks = activated_at[r]
        prev = -1
        for t in marks:
            if t - prev > window:
                violations.append(
                    f"robot {r} not activated for {t - prev} > {window} steps")
            prev = t
        if not marks and len(history) > window:
            violations.append(f"robot {r} never activated in {len(history)} steps")
    return violations


def scripted_cycle_schedule(n: int, grouped: bool = True) -> tuple[frozenset[int], ...]:
    """Periodic adversarial schedule for the 1-bivalent cycle demo: first all
    robots of the big tower except one, then the distinct robot, then the held
    back tower robot. Grouped mode emits the tower robots as one simultaneous
    set; otherwise each activation is a singleton (round-robin form)."""
    if n < 3:
        raise ValueError("cycle schedule needs n >= 3")
    tower = list(range(2, n))
    if grouped:
        return (frozenset(tower), frozenset({0}), frozenset({1}))
    return tuple(frozenset({r}) for r in tower + [0, 1])
