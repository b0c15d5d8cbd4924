"""Exhaustive and sampled verification that a strategy wins.

The index space [0, prod h) is cut into contiguous chunks, decoded into
per-vertex color arrays (mixed radix, first vertex least significant)
and pushed through the strategies' vectorized path.  Chunks are handed
to a thread pool; numpy releases the GIL inside the kernels, so workers
scale on real cores while sharing only a cancellation flag and a
lowest-counterexample accumulator.  The reported counterexample is
always the lowest-index one regardless of scheduling.

Sampled verification draws colors with the Philox counter-based
generator so reports are reproducible: sample s of vertex i consumes the
two 64-bit words at stream positions 2*(s*V + i) and 2*(s*V + i) + 1,
and the color is their 128-bit value reduced modulo the hatness.  A
counterexample found by sampling disproves the strategy; a clean run is
evidence only, never a proof.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .core import Assignment, CapacityError, ContractError, Game
from .strategy import Strategy

DEFAULT_LIMIT = 2 ** 64
CHUNK = 1 << 16
SAMPLE_BLOCK = 1 << 14


@dataclass
class VerifyReport:
    mode: str  # "exhaustive" or "sampled"
    checked: int
    counterexample: Optional[Assignment]
    min_correct: int
    seconds: float

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "min_correct": self.min_correct,
            "seconds": round(self.seconds, 6),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        env = os.environ.get("HATS_JOBS")
        if env:
            jobs = int(env)
        else:
            jobs = os.cpu_count() or 1
    return max(1, int(jobs))


def _check_pair(game: Game, strategy: Strategy) -> None:
    if strategy.game != game:
        raise ContractError("strategy was built for a different game")


def _decode_chunk(game: Game, lo: int, hi: int) -> dict[str, np.ndarray]:
    idx = np.arange(lo, hi, dtype=np.uint64)
    colors = {}
    place = 1
    for v, h in zip(game.graph.vertices, game.hat_tuple):
        colors[v] = (idx // np.uint64(place)) % np.uint64(h)
        place *= h
    return colors


def _correct_counts(game: Game, strategy: Strategy,
                    colors: Mapping[str, np.ndarray]) -> np.ndarray:
    guesses = strategy.guesses_batch(colors)
    counts = None
    for v in game.graph.vertices:
        eq = guesses[v] == colors[v]
        counts = eq.astype(np.int32) if counts is None else counts + eq
    return counts


class _Accumulator:
    """Shared state between sweep workers: cancellation plus the lowest
    counterexample seen, its assignment, and the running minimum count."""

    def __init__(self):
        self.lock = threading.Lock()
        self.cancel = False
        self.best_index: Optional[int] = None
        self.best_assignment: Optional[Assignment] = None
        self.min_correct: Optional[int] = None
        self.checked = 0

    def merge(self, lo: int, size: int, counts: np.ndarray,
              assignment_of) -> None:
        zero = np.nonzero(counts == 0)[0]
        with self.lock:
            self.checked += size
            local_min = int(counts.min()) if size else None
            if local_min is not None and (self.min_correct is None or local_min < self.min_correct):
                self.min_correct = local_min
            if zero.size:
                index = lo + int(zero[0])
                if self.best_index is None or index < self.best_index:
                    self.best_index = index
                    self.best_assignment = assignment_of(int(zero[0]))
                self.cancel = True

    def skippable(self, lo: int) -> bool:
        with self.lock:
            return self.cancel and self.best_index is not None and lo > self.best_index


def _run_chunks(chunks, worker, jobs: int) -> None:
    if jobs == 1:
        for chunk in chunks:
            worker(chunk)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        list(pool.map(worker, chunks))


def verify_exhaustive(game: Game, strategy: Strategy, *,
                      limit: int = DEFAULT_LIMIT,
                      jobs: Optional[int] = None,
                      chunk: int = CHUNK) -> VerifyReport:
    """Sweep every assignment; report the lowest-index counterexample.

    Raises CapacityError when the color space exceeds ``limit``.  With no
    counterexample the report's ``checked`` equals the full color space
    and ``min_correct`` is the exact minimum number of simultaneously
    correct guesses over all assignments.
    """
    _check_pair(game, strategy)
    total = game.color_space
    if total > limit:
        raise CapacityError(
            f"too large for exhaustive verification: {total} assignments exceeds limit {limit}",
            total,
        )
    jobs = resolve_jobs(jobs)
    start = time.perf_counter()
    acc = _Accumulator()

    def worker(bounds):
        lo, hi = bounds
        if acc.skippable(lo):
            return
        colors = _decode_chunk(game, lo, hi)
        counts = _correct_counts(game, strategy, colors)
        acc.merge(lo, hi - lo, counts,
                  lambda row: {v: int(colors[v][row]) for v in game.graph.vertices})

    _run_chunks([(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)], worker, jobs)

    found = acc.best_assignment is not None
    return VerifyReport(
        mode="exhaustive",
        checked=total if not found else acc.checked,
        counterexample=acc.best_assignment,
        min_correct=0 if found else (acc.min_correct or 0),
        seconds=time.perf_counter() - start,
    )


def _sample_block(game: Game, seed: int, lo: int, size: int) -> dict[str, np.ndarray]:
    """Colors for samples [lo, lo+size) of the seeded Philox stream.

    Block starts must keep the word offset divisible by four (Philox
    advances in four-word counter steps); SAMPLE_BLOCK guarantees that.
    """
    nverts = len(game.graph.vertices)
    word_offset = 2 * nverts * lo
    bits = np.random.Philox(key=seed)
    if word_offset:
        bits.advance(word_offset // 4)
    raw = bits.random_raw(2 * nverts * size).reshape(size, nverts, 2)
    colors = {}
    for i, (v, h) in enumerate(zip(game.graph.vertices, game.hat_tuple)):
        hu = np.uint64(h)
        carry = np.uint64((2 ** 64) % h)
        colors[v] = ((raw[:, i, 0] % hu) * carry + raw[:, i, 1] % hu) % hu
    return colors


def verify_sampled(game: Game, strategy: Strategy, samples: int, seed: int, *,
                   jobs: Optional[int] = None) -> VerifyReport:
    """Check uniformly sampled assignments; deterministic given the seed.

    Sampling digit by digit is the same distribution as drawing a uniform
    index and decoding it, but works for games whose color space exceeds
    any integer width.  A counterexample is a definitive disproof; zero
    counterexamples leaves the verdict unknown.
    """
    _check_pair(game, strategy)
    if samples < 1:
        raise ContractError("need at least one sample")
    jobs = resolve_jobs(jobs)
    start = time.perf_counter()
    acc = _Accumulator()

    def worker(bounds):
        lo, hi = bounds
        if acc.skippable(lo):
            return
        colors = _sample_block(game, seed, lo, hi - lo)
        counts = _correct_counts(game, strategy, colors)
        acc.merge(lo, hi - lo, counts,
                  lambda row: {v: int(colors[v][row]) for v in game.graph.vertices})

    blocks = [(lo, min(lo + SAMPLE_BLOCK, samples)) for lo in range(0, samples, SAMPLE_BLOCK)]
    _run_chunks(blocks, worker, jobs)

    found = acc.best_assignment is not None
    return VerifyReport(
        mode="sampled",
        checked=samples if not found else acc.checked,
        counterexample=acc.best_assignment,
        min_correct=0 if found else (acc.min_correct or 0),
        seconds=time.perf_counter() - start,
    )


def win_histogram(game: Game, strategy: Strategy, *,
                  limit: int = DEFAULT_LIMIT,
                  jobs: Optional[int] = None,
                  chunk: int = CHUNK) -> dict[int, int]:
    """Distribution of the number of correct guesses over all assignments.

    Bucket 0 is empty exactly when the strategy wins.
    """
    _check_pair(game, strategy)
    total = game.color_space
    if total > limit:
        raise CapacityError(
            f"too large for a win histogram: {total} assignments exceeds limit {limit}",
            total,
        )
    jobs = resolve_jobs(jobs)
    lock = threading.Lock()
    buckets = np.zeros(len(game.graph.vertices) + 1, dtype=np.int64)

    def worker(bounds):
        lo, hi = bounds
        counts = _correct_counts(game, strategy, _decode_chunk(game, lo, hi))
        local = np.bincount(counts, minlength=len(buckets))
        with lock:
            buckets[: len(local)] += local

    _run_chunks([(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)], worker, jobs)
    return {count: int(freq) for count, freq in enumerate(buckets) if freq}
