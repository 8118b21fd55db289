"""Run reports: trace CSV, key-value summary, and rendered figures."""

from __future__ import annotations

import csv
from pathlib import Path

from gathersim.geometry import Point2
from gathersim.harness.engine import RunResult, TraceRecord

TRACE_COLUMNS = ("step", "robot", "x", "y", "status", "activated",
                 "decision_kind", "target_x", "target_y")


def write_trace_csv(path: str | Path, trace: list[TraceRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace:
            writer.writerow([
                rec.step, rec.robot, repr(rec.x), repr(rec.y), rec.status,
                int(rec.activated), rec.decision_kind,
                "" if rec.target_x is None else repr(rec.target_x),
                "" if rec.target_y is None else repr(rec.target_y),
            ])


def read_trace_csv(path: str | Path) -> list[TraceRecord]:
    records: list[TraceRecord] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace columns: {reader.fieldnames}")
        for row in reader:
            records.append(TraceRecord(
                int(row["step"]), int(row["robot"]), float(row["x"]),
                float(row["y"]), row["status"], bool(int(row["activated"])),
                row["decision_kind"],
                float(row["target_x"]) if row["target_x"] else None,
                float(row["target_y"]) if row["target_y"] else None,
            ))
    return records


def history_from_trace(trace: list[TraceRecord]) -> tuple[list[set[int]], int]:
    """Reconstruct per-step activation sets (steps >= 1) and the robot count
    from a trace."""
    n = max(rec.robot for rec in trace) + 1
    steps = sorted({rec.step for rec in trace if rec.step >= 1})
    history = [set() for _ in steps]
    index = {s: i for i, s in enumerate(steps)}
    for rec in trace:
        if rec.step >= 1 and rec.activated:
            history[index[rec.step]].add(rec.robot)
    return history, n


def summary_text(result: RunResult) -> str:
    final = result.metrics_series[-1]
    lines = [
        f"outcome = {result.outcome.describe()}",
        f"steps = {result.steps_executed}",
        f"valence = {final.valence}",
        f"mulmax = {final.mulmax}",
        f"castles = {len(final.castles)}",
        f"gathering = {result.gathering_series[-1].value}",
        f"sec_diameter = {final.sec_diameter!r}",
    ]
    return "\n".join(lines) + "\n"


def render_figures(out_dir: str | Path, result: RunResult) -> list[Path]:
    """Render the trajectory figure and the metrics-series figure next to the
    trace output. Uses a non-interactive backend."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    paths: list[Path] = []

    by_robot: dict[int, list[Point2]] = {}
    for rec in result.trace:
        by_robot.setdefault(rec.robot, []).append(Point2(rec.x, rec.y))

    fig, ax = plt.subplots(figsize=(6, 6))
    for robot, pts in sorted(by_robot.items()):
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        ax.plot(xs, ys, marker=".", markersize=3, linewidth=0.8,
                label=f"robot {robot}")
        ax.plot(xs[0], ys[0], marker="o", color="black", markersize=4)
        ax.plot(xs[-1], ys[-1], marker="x", color="red", markersize=6)
    sec = result.metrics_series[-1].sec
    if sec.radius > 0:
        circle = plt.Circle((sec.center.x, sec.center.y), sec.radius,
                            fill=False, linestyle="--", color="gray")
        ax.add_patch(circle)
    hull = result.metrics_series[-1].hull_vertices
    if len(hull) >= 2:
        loop = list(hull) + [hull[0]]
        ax.plot([p.x for p in loop], [p.y for p in loop],
                linestyle=":", color="green", linewidth=1.0)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"trajectories ({result.outcome.describe()})")
    if len(by_robot) <= 12:
        ax.legend(fontsize=7)
    traj_path = out / "trajectories.png"
    fig.savefig(traj_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(traj_path)

    steps = list(range(len(result.metrics_series)))
    fig, axes = plt.subplots(3, 1, figsize=(6, 7), sharex=True)
    axes[0].plot(steps, [m.valence for m in result.metrics_series],
                 drawstyle="steps-post")
    axes[0].set_ylabel("valence")
    axes[1].plot(steps, [m.mulmax for m in result.metrics_series],
                 drawstyle="steps-post")
    axes[1].set_ylabel("mulmax")
    axes[2].plot(steps, [m.sec_diameter for m in result.metrics_series])
    axes[2].set_ylabel("SEC diameter")
    axes[2].set_xlabel("step")
    fig.suptitle("configuration metrics")
    metrics_path = out / "metrics.png"
    fig.savefig(metrics_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(metrics_path)
    return paths


def write_report(out_dir: str | Path, result: RunResult,
                 figures: bool = True) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, Path] = {}
    trace_path = out / "trace.csv"
    write_trace_csv(trace_path, result.trace)
    artifacts["trace"] = trace_path
    summary_path = out / "summary.txt"
    summary_path.write_text(summary_text(result))
    artifacts["summary"] = summary_path
    if figures:
        for p in render_figures(out, result):
            artifacts[p.stem] = p
    return artifacts
