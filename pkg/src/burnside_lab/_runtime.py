"""Resource budgets and deterministic sharding shared by the enumerators."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "BURNSIDE_LAB_BUDGET"


class BudgetExceeded(RuntimeError):
    """An enumeration visited more nodes than its budget allows."""

    def __init__(self, used: int, limit: int):
        super().__init__(f"node budget exceeded: {used} > {limit}")
        self.used = used
        self.limit = limit


class RegimeError(ValueError):
    """A group-level question was asked outside the low-rank regime."""


class HypothesisViolation(RuntimeError):
    """Raised in strict mode when a checked hypothesis fails."""


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        return int(float(raw))
    return DEFAULT_BUDGET


def resolve_budget(budget: int | None) -> int:
    return default_budget() if budget is None else int(budget)


class Counter:
    """Node counter that raises once ``limit`` is passed."""

    __slots__ = ("used", "limit")

    def __init__(self, limit: int):
        self.used = 0
        self.limit = limit

    def tick(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.limit:
            raise BudgetExceeded(self.used, self.limit)


def shard_map(fn: Callable[[T], R], items: Sequence[T], jobs: int | None = 1) -> list[R]:
    """Map ``fn`` over ``items`` with up to ``jobs`` processes; output order is input order."""
    items = list(items)
    if jobs is None or jobs <= 0:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def merge_counts(parts: Iterable[tuple[int, int]], limit: int) -> tuple[int, int]:
    """Sum ``(count, nodes)`` shard results and re-check the global budget."""
    count = nodes = 0
    for c, n in parts:
        count += c
        nodes += n
    if nodes > limit:
        raise BudgetExceeded(nodes, limit)
    return count, nodes
