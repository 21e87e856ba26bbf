"""Running several scenarios and collecting their results in order."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Iterable

from .metrics import Metrics, compute_metrics
from .scenario import CONTROLLERS, RunLog, Scenario, run_scenario


def controller_variants(s: Scenario, controllers: Iterable[str] = CONTROLLERS) -> list[Scenario]:
    """Copies of ``s`` that differ only in the controller (named ``<name>/<controller>``)."""
    return [replace(s, name=f"{s.name}/{c}", controller=c) for c in controllers]


def _run_one(args: tuple[Scenario, int | None]) -> tuple[RunLog, Metrics]:
    s, seed = args
    run = run_scenario(s, seed)
    return run, compute_metrics(run)


def run_batch(
    scenarios: Iterable[Scenario], seed: int | None = 0, workers: int = 1
) -> list[tuple[RunLog, Metrics]]:
    """Run every scenario; results come back in declaration order.

    Each run owns all of its state, so with ``workers > 1`` they are spread
    over processes without changing any result.
    """
    jobs = [(s, seed) for s in scenarios]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))
