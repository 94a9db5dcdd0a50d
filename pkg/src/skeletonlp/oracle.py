"""Brute-force reference solvers for tiny instances.

These never touch the difference systems or the greedy assignments; they
search the raw problem definitions and share only the verifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterator

from .errors import SizeGuard
from .sched_equal import EqualInstance, EqualSchedule, verify_equal
from .sched_tallsmall import TallSmallInstance, TallSmallSchedule, verify_tallsmall
from .prefetch import Fetch, PrefetchInstance, simulate

MAX_EQUAL_JOBS = 6


@dataclass(frozen=True)
class OracleResult:
    status: str                 # "optimal" | "infeasible"
    objective: int | None = None
    witness: Any = None

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


# ------------------------------------------------------------ equal length

def _fits(starts: list[int], length: int, machines: int) -> bool:
    """No instant is covered by more than ``machines`` of the runs."""
    ordered = sorted(starts)
    for i, a in enumerate(ordered):
        covering = sum(1 for b in ordered[i:] if b < a + length)
        if covering > machines:
            return False
    return True


def _machines_for(starts: list[int], length: int) -> list[int]:
    """Interval colouring: each run goes to the lowest-numbered idle machine."""
    free_at: list[int] = []
    out = [0] * len(starts)
    for j in sorted(range(len(starts)), key=lambda j: (starts[j], j)):
        for mach, t in enumerate(free_at):
            if t <= starts[j]:
                free_at[mach] = starts[j] + length
                out[j] = mach + 1
                break
        else:
            free_at.append(starts[j] + length)
            out[j] = len(free_at)
    return out


def equal_start_vectors(inst: EqualInstance) -> Iterator[tuple[int, ...]]:
    """Every feasible vector of integer start times (one per job)."""
    if inst.n > MAX_EQUAL_JOBS:
        raise SizeGuard(f"brute_equal handles at most {MAX_EQUAL_JOBS} jobs")
    p, m = inst.length, inst.machines
    jobs = inst.jobs
    chosen: list[int] = []

    def rec(j: int) -> Iterator[tuple[int, ...]]:
        if j == len(jobs):
            yield tuple(chosen)
            return
        r, d = jobs[j]
        for s in range(r, d - p + 1):
            near = [x for x in chosen if abs(x - s) < p] + [s]
            if _fits(near, p, m):
                chosen.append(s)
                yield from rec(j + 1)
                chosen.pop()

    yield from rec(0)


def brute_equal(inst: EqualInstance) -> OracleResult:
    best = None
    for starts in equal_start_vectors(inst):
        total = sum(starts) + inst.n * inst.length
        if best is None or total < best[0]:
            best = (total, starts)
    if best is None:
        return OracleResult("infeasible")
    total, starts = best
    machines = _machines_for(list(starts), inst.length)
    sched = EqualSchedule(tuple(zip(machines, starts)))
    verify_equal(inst, sched)
    return OracleResult("optimal", total, sched)


# ------------------------------------------------------------- tall / small

MAX_TS_JOBS = 6
MAX_TS_SLOTS = 8


def _small_fit(small, blocked: set[int], machines: int) -> list[tuple[int, int]] | None:
    """Exhaustive placement of small jobs into open slots, or None."""
    load: dict[int, int] = {}
    placed: list[tuple[int, int] | None] = [None] * len(small)

    def rec(j: int) -> bool:
        if j == len(small):
            return True
        r, d = small[j]
        for t in range(r, d):
            if t in blocked or load.get(t, 0) >= machines:
                continue
            load[t] = load.get(t, 0) + 1
            placed[j] = (load[t], t)
            if rec(j + 1):
                return True
            load[t] -= 1
        return False

    return list(placed) if rec(0) else None


def brute_tallsmall(inst: TallSmallInstance) -> OracleResult:
    jobs = inst.small + inst.tall
    if len(jobs) > MAX_TS_JOBS:
        raise SizeGuard(f"brute_tallsmall handles at most {MAX_TS_JOBS} jobs")
    if jobs and max(d for _, d in jobs) - min(r for r, _ in jobs) > MAX_TS_SLOTS:
        raise SizeGuard(f"brute_tallsmall handles at most {MAX_TS_SLOTS} slots")
    best = None
    slots: list[int] = []

    def rec(j: int) -> None:
        nonlocal best
        if j == len(inst.tall):
            total = sum(t + 1 for t in slots)
            if best is not None and total >= best[0]:
                return
            small = _small_fit(inst.small, set(slots), inst.machines)
            if small is not None:
                best = (total, tuple(slots), tuple(small))
            return
        r, d = inst.tall[j]
        for t in range(r, d):
            if t not in slots:
                slots.append(t)
                rec(j + 1)
                slots.pop()

    rec(0)
    if best is None:
        return OracleResult("infeasible")
    total, tall, small = best
    sched = TallSmallSchedule(tall, small)
    verify_tallsmall(inst, sched)
    return OracleResult("optimal", total, sched)


# ---------------------------------------------------------------- prefetch

MAX_PREFETCH_REQUESTS = 8
MAX_PREFETCH_CACHE = 3
MAX_PREFETCH_PAGES = 5


def brute_prefetch(inst: PrefetchInstance) -> OracleResult:
    """Exhaustive search over every fetch sequence, memoized on the state.

    At each time point the disk may finish its pending fetch, then start and
    possibly finish further fetches (at most ``k + 1`` starts per time point,
    more only cycles pages); afterwards the request must be cached.
    """
    n, k, F = inst.n, inst.cache_size, inst.fetch_duration
    pages = inst.pages()
    if n > MAX_PREFETCH_REQUESTS or k > MAX_PREFETCH_CACHE or len(pages) > MAX_PREFETCH_PAGES:
        raise SizeGuard("instance too large for brute_prefetch")
    reqs = inst.requests
    INF = float("inf")

    @lru_cache(maxsize=None)
    def best(t: int, cache: frozenset, pending, starts_left: int):
        # options at time t with the given in-progress state; returns (cost, fetches)
        options = []
        if pending is None or (t - pending[0] < F and t < n):
            if reqs[t - 1] in cache:
                if t == n:
                    options.append((0, ()))
                else:
                    cost, rest = best(t + 1, cache, pending, k + 1)
                    options.append((cost, rest))
        if pending is not None and t - pending[0] <= F:
            s, y = pending
            for z in pages:
                if z not in cache:
                    cost, rest = best(t, cache | {z}, None, starts_left)
                    options.append((cost + F - (t - s), (Fetch(s, y, t, z),) + rest))
        if pending is None and starts_left > 0:
            for y in sorted(cache):
                cost, rest = best(t, cache - {y}, (t, y), starts_left - 1)
                options.append((cost, rest))
        if not options:
            return INF, ()
        return min(options, key=lambda o: (o[0], len(o[1])))

    if reqs[0] not in inst.initial_cache:
        return OracleResult("infeasible")
    start = frozenset(inst.initial_cache)
    if n == 1:
        return OracleResult("optimal", 0, [])
    cost, fetches = best(2, start, None, k + 1)
    if cost == INF:
        return OracleResult("infeasible")
    fetches = sorted(fetches, key=lambda f: (f.start, f.end))
    stall = simulate(inst, fetches)
    assert stall == cost
    return OracleResult("optimal", int(cost), fetches)
