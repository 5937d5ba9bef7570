"""Exhaustive grid evaluation, serial or across worker processes.

Combinations are cut into chunks in enumeration order. Workers return chunk results
in submission order and the reduction walks them in that order with a strict ``<``,
so the winner never depends on the worker count.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

import structlog

from synergyopt.config.logging import active_logging, setup_logging
from synergyopt.constants import DEFAULT_CHUNK_SIZE

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from synergyopt.optimizer.grid import Combo, ParameterGrid

logger = structlog.get_logger(__name__)


class ComboEvaluator(Protocol):
    """Per-sample stability metrics for one combination (``inf`` marks infeasible)."""

    def __call__(self, combo: Combo) -> tuple[float, ...]: ...


def weighted_norm(qs: Sequence[float], weights: Sequence[float]) -> float:
    """Q = √(Σ wᵢ² qᵢ²); any infeasible sample with nonzero weight disqualifies."""
    total = 0.0
    for q, w in zip(qs, weights, strict=True):
        if w == 0.0:
            continue
        if math.isinf(q):
            return math.inf
        total += (w * q) ** 2
    return math.sqrt(total)


@dataclass(frozen=True)
class Evaluation:
    index: int
    combo: Combo
    q: float
    per_sample: tuple[float, ...]

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.q)


@dataclass
class SearchOutcome:
    best: Evaluation | None = None
    evaluated: int = 0
    infeasible: int = 0
    # sample index -> number of combinations it made infeasible
    blocked_by: Counter[int] = field(default_factory=Counter)
    trace: list[Evaluation] = field(default_factory=list)


def _evaluate_chunk(
    evaluator: ComboEvaluator,
    weights: Sequence[float],
    start: int,
    combos: Sequence[Combo],
) -> list[Evaluation]:
    results = []
    for offset, combo in enumerate(combos):
        per_sample = evaluator(combo)
        results.append(
            Evaluation(start + offset, combo, weighted_norm(per_sample, weights), per_sample)
        )
    return results


# Worker-process state, installed once per process by the pool initializer.
_worker_state: tuple[ComboEvaluator, tuple[float, ...]] | None = None


def _init_worker(
    evaluator: ComboEvaluator,
    weights: tuple[float, ...],
    log_config: tuple[str, bool] | None,
) -> None:
    global _worker_state  # noqa: PLW0603
    _worker_state = (evaluator, weights)
    if log_config is not None:
        setup_logging(*log_config)


def _run_chunk(job: tuple[int, list[Combo]]) -> list[Evaluation]:
    if _worker_state is None:
        msg = "search worker used before initialization"
        raise RuntimeError(msg)
    evaluator, weights = _worker_state
    return _evaluate_chunk(evaluator, weights, job[0], job[1])


def _chunks(grid: ParameterGrid, chunk_size: int) -> Iterator[tuple[int, list[Combo]]]:
    combos = grid.combos()
    start = 0
    while chunk := list(itertools.islice(combos, chunk_size)):
        yield start, chunk
        start += len(chunk)


def _reduce(outcome: SearchOutcome, results: list[Evaluation], keep_trace: bool) -> None:
    for ev in results:
        outcome.evaluated += 1
        if keep_trace:
            outcome.trace.append(ev)
        if not ev.feasible:
            outcome.infeasible += 1
            outcome.blocked_by.update(i for i, q in enumerate(ev.per_sample) if math.isinf(q))
            continue
        if outcome.best is None or ev.q < outcome.best.q:
            outcome.best = ev


def run_search(
    evaluator: ComboEvaluator,
    grid: ParameterGrid,
    weights: Sequence[float],
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    trace: bool = False,
) -> SearchOutcome:
    """Evaluate every combination of ``grid``; ties keep the smallest combo index."""
    outcome = SearchOutcome()
    weights = tuple(float(w) for w in weights)
    chunk_size = max(1, chunk_size)
    workers = min(max(1, threads), math.ceil(grid.size / chunk_size))

    if workers <= 1:
        for start, chunk in _chunks(grid, chunk_size):
            _reduce(outcome, _evaluate_chunk(evaluator, weights, start, chunk), trace)
    else:
        logger.debug("search_pool_started", workers=workers, combos=grid.size)
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(evaluator, weights, active_logging()),
        ) as pool:
            for results in pool.map(_run_chunk, _chunks(grid, chunk_size)):
                _reduce(outcome, results, trace)

    logger.debug(
        "search_complete",
        combos=outcome.evaluated,
        infeasible=outcome.infeasible,
        best_q=None if outcome.best is None else outcome.best.q,
    )
    return outcome
