"""Built-in scenario catalog: the cycle, schedule-swap, crash-corridor,
Byzantine-blocking, lure, and two-robot demos."""

from __future__ import annotations

from gathersim.faults import ByzantineSpec, FaultPlan
from gathersim.geometry import Point2
from gathersim.harness.scenario import Scenario
from gathersim.model import ObservationMode
from gathersim.schedulers import SchedulerSpec, scripted_cycle_schedule


def _singletons(*ids: int) -> tuple[frozenset[int], ...]:
    return tuple(frozenset({i}) for i in ids)


def _fig2_cycle() -> Scenario:
    # one robot apart from a tower of four; the grouped periodic schedule
    # makes the nearest-location rule cycle with period one pass
    robots = tuple([(Point2(0.0, 0.0), 10.0)]
                   + [(Point2(1.0, 0.0), 10.0) for _ in range(4)])
    return Scenario(
        name="fig2-cycle",
        robots=robots,
        algorithm="nearest-neighbor",
        scheduler=SchedulerSpec("scripted",
                                schedule=scripted_cycle_schedule(5, grouped=True)),
        goal="recurrence",
        recurrence_mode="equivalence",
        max_steps=50,
        expect="recurrence first=0 period=3",
    )


def _k2_swap() -> Scenario:
    # the adaptive round-robin adversary swaps two activations once to trap
    # the nearest-location rule in a cycle while staying 2-bounded
    robots = ((Point2(0.0, 0.0), 100.0), (Point2(10.0, 0.0), 100.0),
              (Point2(1.0, 0.0), 100.0))
    return Scenario(
        name="k2-swap",
        robots=robots,
        algorithm="nearest-neighbor",
        scheduler=SchedulerSpec("k2-swap", order=(0, 1, 2)),
        goal="recurrence",
        max_steps=50,
        expect="recurrence first=1 period=2",
    )


def _appendix_a1() -> Scenario:
    # two correct robots shuttle between two two-robot crash towers flanked by
    # far three-robot crash towers; the naive straight-line rule cycles while
    # the blocking-aware rule escapes sideways and gathers weakly
    robots: list[tuple[Point2, float]] = []
    robots += [(Point2(-10.0, 0.0), 1.0)] * 3   # ids 0-2: far left tower
    robots += [(Point2(-2.0, 0.0), 1.0)] * 3    # ids 3-4 crash, 5 correct
    robots += [(Point2(2.0, 0.0), 1.0)] * 3     # ids 6-7 crash, 8 correct
    robots += [(Point2(10.0, 0.0), 1.0)] * 3    # ids 9-11: far right tower
    crashed = (0, 1, 2, 3, 4, 6, 7, 9, 10, 11)
    return Scenario(
        name="appendix-a1",
        robots=tuple(robots),
        algorithm="det-ft-naive",
        scheduler=SchedulerSpec("scripted", schedule=_singletons(8, 5)),
        goal="recurrence",
        max_steps=50,
        multiplicity=ObservationMode.WITH_MULTIPLICITY,
        fault_plan=FaultPlan(crashes=tuple((r, 0) for r in crashed),
                             f=len(crashed)),
        expect="recurrence first=0 period=4",
    )


def _byz_balancer() -> Scenario:
    # even split 2+2 with one Byzantine counterweight; the 3-bounded schedule
    # keeps the fault-tolerant rule oscillating forever
    robots = tuple([(Point2(0.0, 0.0), 2.0)] * 2 + [(Point2(1.0, 0.0), 2.0)] * 2)
    return Scenario(
        name="byz-balancer",
        robots=robots,
        algorithm="det-ft",
        scheduler=SchedulerSpec("scripted",
                                schedule=_singletons(0, 3, 2, 3, 1, 3)),
        goal="recurrence",
        max_steps=100,
        multiplicity=ObservationMode.WITH_MULTIPLICITY,
        fault_plan=FaultPlan(byzantine=((3, ByzantineSpec("balancer")),), f=1),
        expect="recurrence first=0 period=2",
    )


def _byz_switch() -> Scenario:
    # odd split 2+3 with two Byzantine counterweights taking turns; the
    # 3-bounded schedule again blocks weak gathering
    robots = tuple([(Point2(0.0, 0.0), 2.0)] * 2 + [(Point2(1.0, 0.0), 2.0)] * 3)
    byz = ((3, ByzantineSpec("switch", designated=4)),
           (4, ByzantineSpec("switch", designated=4)))
    return Scenario(
        name="byz-switch",
        robots=robots,
        algorithm="det-ft",
        scheduler=SchedulerSpec("scripted",
                                schedule=_singletons(0, 3, 4, 1, 0, 3, 4, 2)),
        goal="recurrence",
        max_steps=100,
        multiplicity=ObservationMode.WITH_MULTIPLICITY,
        fault_plan=FaultPlan(byzantine=byz, f=2),
        expect="recurrence first=0 period=2",
    )


def _byz_attractor() -> Scenario:
    # a Byzantine lure repeatedly re-baits its victim, dragging it away from
    # the other correct robot without ever letting the pursuit end
    robots = ((Point2(0.0, 0.0), 100.0), (Point2(10.0, 0.0), 100.0),
              (Point2(1.0, 0.0), 100.0))
    return Scenario(
        name="byz-attractor",
        robots=robots,
        algorithm="nearest-neighbor",
        scheduler=SchedulerSpec("scripted", schedule=_singletons(0, 2)),
        goal="budget",
        max_steps=40,
        fault_plan=FaultPlan(byzantine=((2, ByzantineSpec("attractor")),), f=1),
        expect="budget-exhausted",
    )


def _lemma10_n2() -> Scenario:
    # two robots with the probabilistic rule under an unfair adversary
    robots = ((Point2(0.0, 0.0), 1.0), (Point2(10.0, 0.0), 1.0))
    return Scenario(
        name="lemma10-n2",
        robots=robots,
        algorithm="prob-basic",
        scheduler=SchedulerSpec("unfair-arbitrary"),
        goal="strong",
        max_steps=10_000,
        expect="strong-gathered",
    )


def build_catalog() -> dict[str, Scenario]:
    scenarios = (_fig2_cycle(), _k2_swap(), _appendix_a1(), _byz_balancer(),
                 _byz_switch(), _byz_attractor(), _lemma10_n2())
    return {s.name: s for s in scenarios}


def catalog_scenario(name: str) -> Scenario:
    catalog = build_catalog()
    if name not in catalog:
        known = ", ".join(sorted(catalog))
        raise KeyError(f"unknown catalog scenario {name!r}; known: {known}")
    return catalog[name]
