"""Command line interface: run scenarios, aggregate Monte Carlo statistics,
validate traces against scheduler classes, evaluate analytic formulas, and
list the built-in catalog."""

from __future__ import annotations

import argparse
import os
import sys

from gathersim.harness.analytic import (
    balance_probability,
    increase_probability,
    markov_absorption,
)
from gathersim.harness.catalog import build_catalog, catalog_scenario
from gathersim.harness.engine import RunResult, monte_carlo, run
from gathersim.harness.report import (
    history_from_trace,
    read_trace_csv,
    summary_text,
    write_report,
)
from gathersim.harness.scenario import Scenario, ScenarioError, load_scenario
from gathersim.schedulers import SCHEDULER_KINDS, SchedulerSpec, validate_history


def _load(ref: str) -> Scenario:
    if ref.startswith("catalog:"):
        return catalog_scenario(ref.split(":", 1)[1])
    return load_scenario(ref)


def _outcome_line(result: RunResult) -> str:
    o = result.outcome
    if o.kind == "recurrence":
        return f"Recurrence period {o.period} groups (first at step {o.first})"
    if o.kind == "strong-gathered":
        return f"StrongGathered at step {o.step}"
    if o.kind == "weak-gathered":
        return f"WeakGathered at step {o.step}"
    return f"BudgetExhausted after {result.steps_executed} steps"


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_overrides(seed=args.seed)
    if args.max_steps is not None:
        scenario = scenario.with_overrides(max_steps=args.max_steps)
    result = run(scenario)
    print(_outcome_line(result))
    sys.stdout.write(summary_text(result))
    out = args.out or os.environ.get("GATHERSIM_OUT")
    if out:
        artifacts = write_report(out, result, figures=not args.no_figures)
        for name, path in sorted(artifacts.items()):
            print(f"{name}: {path}")
    if args.check:
        if scenario.expect is None:
            print("assert: scenario declares no expectation", file=sys.stderr)
            return 2
        if scenario.expect not in (result.outcome.describe(), result.outcome.kind):
            print(f"assert: expected {scenario.expect!r}, "
                  f"got {result.outcome.describe()!r}", file=sys.stderr)
            return 2
        print(f"assert: ok ({scenario.expect})")
    return 0


def _cmd_montecarlo(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_overrides(seed=args.seed)
    stats = monte_carlo(scenario, args.repeats, args.stride)
    print(f"runs = {stats.runs}")
    print(f"successes = {stats.successes}")
    print(f"success_rate = {stats.success_rate!r}")
    print(f"mean_steps = {stats.mean_steps!r}")
    print(f"stddev = {stats.stddev!r}")
    print(f"ci95_half_width = {stats.ci95_half_width!r}")
    if stats.small_sample:
        print("note = normal-approximation CI unreliable below 30 runs")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    trace = read_trace_csv(args.trace)
    history, n = history_from_trace(trace)
    spec = SchedulerSpec(
        kind=args.scheduler,
        order=tuple(args.order) if args.order else (),
        window=args.window,
        k=args.k,
    )
    violations = validate_history(spec, history, n)
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return 2 if args.check else 0
    print(f"ok: {len(history)} steps legal for {args.scheduler}")
    return 0


def _cmd_analytic(args: argparse.Namespace) -> int:
    if args.formula == "balance":
        print(f"balance = {balance_probability(args.i, args.o, args.M)!r}")
    elif args.formula == "increase":
        print(f"increase = {increase_probability(args.i, args.o, args.x, args.M)!r}")
    else:
        res = markov_absorption(args.n, args.p)
        print(f"absorption_probability = {res.absorption_probability!r}")
        print(f"expected_steps = {res.expected_steps!r}")
    return 0


def _cmd_catalog(_: argparse.Namespace) -> int:
    for name, scenario in sorted(build_catalog().items()):
        print(f"{name}: n={scenario.n} algorithm={scenario.algorithm} "
              f"scheduler={scenario.scheduler.kind} goal={scenario.goal}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gathersim",
        description="Deterministic-replay simulator for mobile-robot gathering")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario")
    p_run.add_argument("scenario",
                       help="scenario file path or catalog:<name>")
    p_run.add_argument("--out", default=None,
                       help="directory for trace CSV, summary, and figures "
                            "(default: $GATHERSIM_OUT if set)")
    p_run.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--max-steps", type=int, default=None)
    p_run.add_argument("--assert", dest="check", action="store_true",
                       help="exit 2 unless the outcome matches the scenario's "
                            "expect field")
    p_run.set_defaults(fn=_cmd_run)

    p_mc = sub.add_parser("montecarlo", help="aggregate repeated seeded runs")
    p_mc.add_argument("scenario")
    p_mc.add_argument("--repeats", type=int, required=True)
    p_mc.add_argument("--stride", type=int, default=1)
    p_mc.add_argument("--seed", type=int, default=None)
    p_mc.set_defaults(fn=_cmd_montecarlo)

    p_val = sub.add_parser("validate",
                           help="check a trace CSV against a scheduler class")
    p_val.add_argument("trace")
    p_val.add_argument("--scheduler", required=True, choices=SCHEDULER_KINDS)
    p_val.add_argument("--k", type=int, default=0)
    p_val.add_argument("--window", type=int, default=0)
    p_val.add_argument("--order", type=int, nargs="*", default=None)
    p_val.add_argument("--assert", dest="check", action="store_true",
                       help="exit 2 on violations")
    p_val.set_defaults(fn=_cmd_validate)

    p_an = sub.add_parser("analytic", help="evaluate a closed-form quantity")
    an_sub = p_an.add_subparsers(dest="formula", required=True)
    p_bal = an_sub.add_parser("balance")
    p_bal.add_argument("--i", type=int, required=True)
    p_bal.add_argument("--o", type=int, required=True)
    p_bal.add_argument("--M", type=int, required=True)
    p_inc = an_sub.add_parser("increase")
    p_inc.add_argument("--i", type=int, required=True)
    p_inc.add_argument("--o", type=int, required=True)
    p_inc.add_argument("--x", type=int, required=True)
    p_inc.add_argument("--M", type=int, required=True)
    p_mk = an_sub.add_parser("markov")
    p_mk.add_argument("--n", type=int, required=True)
    p_mk.add_argument("--p", type=float, required=True)
    p_an.set_defaults(fn=_cmd_analytic)

    p_cat = sub.add_parser("catalog", help="list built-in scenarios")
    p_cat.set_defaults(fn=_cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
