"""Deterministic-replay simulator for mobile-robot gathering.

Plane geometry, robot/configuration model, gathering decision rules,
activation schedulers, fault injection, and an execution harness with
Monte Carlo statistics and analytic Markov-chain helpers.
"""

from gathersim.geometry import Point2, Circle, HalfPlane, Region

__all__ = ["Point2", "Circle", "HalfPlane", "Region"]

__version__ = "0.1.0"
