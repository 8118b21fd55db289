"""Scenario loading, execution engine, built-in scenario catalog, Monte Carlo
statistics, analytic Markov-chain helpers, reporting, and the CLI."""

from gathersim.harness.scenario import Scenario, load_scenario, parse_scenario
from gathersim.harness.engine import RunResult, run, monte_carlo

__all__ = ["Scenario", "load_scenario", "parse_scenario", "RunResult", "run",
           "monte_carlo"]
