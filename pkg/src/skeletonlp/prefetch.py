"""Offline single-disk prefetching and caching with minimum stall time.

Time points are ``1..n``.  ``I[t]`` / ``O[t]`` count the pages that entered /
left the cache up to and including time ``t``; nothing moves at time 1, so
both are pinned to the root of the difference system.  The LP over these
counts is solved exactly through its min-cost flow dual and the fetch
intervals are read off the optimal counts.  Pages are then chosen greedily:
evict the cached page requested furthest in the future, fetch the missing
page requested soonest.

Event order at a single time point: a completing fetch inserts its page
before a starting fetch evicts, and requests are checked after both.  So a
page evicted at ``t`` is already gone for the request at ``t``.

The LP is bounded below but not above (shifting every count up keeps it
feasible and only costs more), so among the optimal profiles the
componentwise-minimal one is returned; it never contains a superfluous
zero-stall fetch.

A caller-supplied initial cache that differs from the first ``k`` distinct
requests is handled by the lower bounds ``I[t] >= |{x_1..x_t} - C_1|``,
which coincide with the ``s = 1`` serve constraints in the default case.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .errors import AssignmentFailure, InstanceError, MalformedProfile, Violations
from .graphlp import DiffSystem, Infeasible, solve_difference_lp


@dataclass(frozen=True)
class PrefetchInstance:
    requests: tuple[str, ...]
    cache_size: int
    fetch_duration: int
    initial_cache: tuple[str, ...] | None = None

    def __post_init__(self):
        reqs = tuple(self.requests)
        object.__setattr__(self, "requests", reqs)
        k, f = self.cache_size, self.fetch_duration
        if type(k) is not int or k < 1:
            raise InstanceError("cache_size must be a positive integer")
        if type(f) is not int or f < 1:
            raise InstanceError("fetch_duration must be a positive integer")
        if not reqs:
            raise InstanceError("the request sequence is empty")
        if not all(isinstance(x, str) for x in reqs):
            raise InstanceError("page ids must be strings")
        distinct = list(dict.fromkeys(reqs))
        if len(distinct) < k:
            raise InstanceError(f"requests contain {len(distinct)} distinct pages, fewer than cache_size {k}")
        if self.initial_cache is None:
            object.__setattr__(self, "initial_cache", tuple(distinct[:k]))
        else:
            cache = tuple(self.initial_cache)
            if len(set(cache)) != len(cache) or len(cache) != k:
                raise InstanceError(f"initial_cache must hold exactly {k} distinct pages")
            if reqs[0] not in cache:
                raise InstanceError("the first request must be in the initial cache")
            object.__setattr__(self, "initial_cache", cache)

    @property
    def n(self) -> int:
        return len(self.requests)

    def pages(self) -> list[str]:
        return sorted(set(self.requests) | set(self.initial_cache))

    @classmethod
    def from_json(cls, data: dict) -> "PrefetchInstance":
        if data.get("format", 1) != 1:
            raise InstanceError("unsupported format version")
        try:
            init = data.get("initial_cache")
            return cls(tuple(data["requests"]), data["cache_size"], data["fetch_duration"],
                       tuple(init) if init is not None else None)
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed prefetch instance: {exc!r}") from None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "cache_size": self.cache_size,
            "fetch_duration": self.fetch_duration,
            "requests": list(self.requests),
            "initial_cache": list(self.initial_cache),
        }


@dataclass(frozen=True)
class CacheProfile:
    I: tuple[int, ...]   # index t-1 holds I_t
    O: tuple[int, ...]


@dataclass(frozen=True)
class Fetch:
    start: int
    evict: str
    end: int
    fetch: str


def fetch_stall(fetches, duration: int) -> int:
    return sum(duration - (f.end - f.start) for f in fetches)


def distinct_counts(requests) -> list[list[int]]:
    """``d[s][t]`` distinct pages among ``x_s..x_t`` (1-based, zero elsewhere)."""
    n = len(requests)
    last: dict = {}
    prev = [0] * (n + 1)
    for t, x in enumerate(requests, 1):
        prev[t] = last.get(x, 0)
        last[x] = t
    d = [[0] * (n + 1) for _ in range(n + 1)]
    for s in range(1, n + 1):
        row = d[s]
        for t in range(s, n + 1):
            row[t] = row[t - 1] + (1 if prev[t] < s else 0)
    return d


class _Nodes:
    """Node ids: root 0 holds I_1 = O_1; I_t -> t-1; O_t -> n+t-2."""

    def __init__(self, n: int):
        self.n = n
        self.count = 2 * n - 1

    def I(self, t: int) -> int:
        return 0 if t == 1 else t - 1

    def O(self, t: int) -> int:
        return 0 if t == 1 else self.n + t - 2

    def labels(self) -> list[str]:
        out = ["I1=O1"] + [f"I{t}" for t in range(2, self.n + 1)] + [f"O{t}" for t in range(2, self.n + 1)]
        return out


def build_lp(inst: PrefetchInstance) -> tuple[DiffSystem, list[int]]:
    n, k, F = inst.n, inst.cache_size, inst.fetch_duration
    nd = _Nodes(n)
    I, O = nd.I, nd.O
    d = distinct_counts(inst.requests)
    cons = []
    for t in range(2, n + 1):
        cons.append((O(t - 1), O(t), 0))             # order
        cons.append((I(t - 1), I(t), 0))
    for t in range(1, n + 1):
        cons.append((I(t), O(t), 0))                 # no overflow
        cons.append((O(t), I(t), 1))                 # one fetch at a time
        cons.append((O(t), I(min(t + F, n)), 0))     # fetch length at most F
    for s in range(1, n + 1):
        row = d[s]
        for t in range(s, n + 1):
            cons.append((O(s), I(t), k - row[t]))    # enough fetches
    cached = set(inst.initial_cache)
    missing = set()
    for t, x in enumerate(inst.requests, 1):
        if x not in cached:
            missing.add(x)
        if t > 1:
            cons.append((0, I(t), -len(missing)))
    system = DiffSystem.build(nd.count, 0, cons, labels=nd.labels())

    coeffs = [0] * nd.count
    if n >= 2:
        for t in range(2, n):
            coeffs[O(t)] -= 1
            coeffs[I(t)] += 1
        coeffs[O(n)] += F - 1
        coeffs[I(n)] += 1
    return system, coeffs


def solve_profile(inst: PrefetchInstance) -> tuple[CacheProfile, int]:
    """Minimal optimal ``(I, O)`` counts and the minimum total stall."""
    system, coeffs = build_lp(inst)
    try:
        values, stall = solve_difference_lp(system, coeffs, extreme="min")
    except Infeasible as exc:
        raise RuntimeError(f"prefetch LP infeasible on a valid instance: {exc}") from None
    nd = _Nodes(inst.n)
    t_range = range(1, inst.n + 1)
    profile = CacheProfile(tuple(values[nd.I(t)] for t in t_range),
                           tuple(values[nd.O(t)] for t in t_range))
    return profile, stall


def extract_intervals(profile: CacheProfile, duration: int | None = None) -> list[tuple[int, int]]:
    """``s_j = min{t : O_t >= j}``, ``e_j = min{t : I_t >= j}`` for ``j = 1..O_n``."""
    I, O = profile.I, profile.O
    if not I or I[0] != 0 or O[0] != 0:
        raise MalformedProfile("I_1 and O_1 must be 0")
    if I[-1] != O[-1]:
        raise MalformedProfile(f"I_n = {I[-1]} differs from O_n = {O[-1]}")
    for seq in (I, O):
        if any(b < a for a, b in zip(seq, seq[1:])):
            raise MalformedProfile("counts must be non-decreasing")
    out = []
    for j in range(1, O[-1] + 1):
        s = bisect_left(O, j) + 1
        e = bisect_left(I, j) + 1
        out.append((s, e))
    for j, (s, e) in enumerate(out):
        if e < s:
            raise MalformedProfile(f"interval {j + 1} ends at {e} before it starts at {s}")
        if duration is not None and e > s + duration:
            raise MalformedProfile(f"interval {j + 1} longer than {duration}")
        if j + 1 < len(out) and e > out[j + 1][0]:
            raise MalformedProfile(f"intervals {j + 1} and {j + 2} overlap")
    return out


class _NextUse:
    def __init__(self, requests):
        self.n = len(requests)
        self.pos: dict[str, list[int]] = {}
        for t, x in enumerate(requests, 1):
            self.pos.setdefault(x, []).append(t)

    def __call__(self, page: str, t: int) -> int:
        """First request of ``page`` at time ``>= t``; ``n + 1`` if none."""
        seq = self.pos.get(page, ())
        i = bisect_left(seq, t)
        return seq[i] if i < len(seq) else self.n + 1


def greedy_pages(inst: PrefetchInstance, intervals) -> list[Fetch]:
    nxt = _NextUse(inst.requests)
    universe = inst.pages()
    cache = set(inst.initial_cache)
    fetches = []
    for s, e in intervals:
        # furthest next request, ties to the smallest page id
        y = min(cache, key=lambda pg: (-nxt(pg, s), pg))
        cache.discard(y)
        candidates = [pg for pg in universe if pg not in cache]
        z = min(candidates, key=lambda pg: (nxt(pg, e), pg))
        cache.add(z)
        fetches.append(Fetch(s, y, e, z))
    problems = find_violations(inst, fetches)
    if problems:
        raise AssignmentFailure(problems[0])
    return fetches


def _replay(inst: PrefetchInstance, fetches):
    """Yield ``(t, cache_after_moves, problem_or_None)`` for t = 1..n."""
    events: dict[int, list[tuple[str, str]]] = {}
    for f in fetches:
        events.setdefault(f.start, []).append(("evict", f.evict))
        events.setdefault(f.end, []).append(("fetch", f.fetch))
    cache = set(inst.initial_cache)
    for t, x in enumerate(inst.requests, 1):
        problem = None
        for kind, page in events.get(t, ()):
            if kind == "evict":
                if page not in cache:
                    problem = f"time {t}: evicted page {page} is not cached"
                    break
                cache.discard(page)
            else:
                if page in cache:
                    problem = f"time {t}: fetched page {page} is already cached"
                    break
                cache.add(page)
        if problem is None and len(cache) > inst.cache_size:
            problem = f"time {t}: cache holds {len(cache)} pages"
        if problem is None and x not in cache:
            problem = f"time {t}: request {x} not in cache"
        yield t, frozenset(cache), problem
        if problem is not None:
            return


def find_violations(inst: PrefetchInstance, fetches) -> list[str]:
    n, F = inst.n, inst.fetch_duration
    problems = []
    for j, f in enumerate(fetches):
        if f.start < 2:
            problems.append(f"fetch {j}: no page may move at time 1")
        if not f.start <= f.end <= min(f.start + F, n):
            problems.append(f"fetch {j}: interval [{f.start}, {f.end}] invalid")
        if j + 1 < len(fetches) and f.end > fetches[j + 1].start:
            problems.append(f"fetches {j} and {j + 1} overlap")
    if problems:
        return problems
    for _, _, problem in _replay(inst, fetches):
        if problem is not None:
            return [problem]
    return []


def simulate(inst: PrefetchInstance, fetches) -> int:
    """Total stall of a valid fetch sequence; raises :class:`Violations`."""
    problems = find_violations(inst, fetches)
    if problems:
        raise Violations(problems)
    return fetch_stall(fetches, inst.fetch_duration)


def cache_states(inst: PrefetchInstance, fetches) -> list[frozenset]:
    """``C_t`` after all moves at ``t``, for t = 1..n (index t-1)."""
    return [cache for _, cache, _ in _replay(inst, fetches)]


def invariant_check(inst: PrefetchInstance, profile: CacheProfile, fetches) -> list[tuple[int, int]]:
    """Pairs ``(s, t)`` where ``I_t - I_s < |{x_s..x_t} - C_s|``."""
    states = cache_states(inst, fetches)
    I = profile.I
    bad = []
    for s in range(1, len(states) + 1):
        cs = states[s - 1]
        outside: set[str] = set()
        for t in range(s, inst.n + 1):
            x = inst.requests[t - 1]
            if x not in cs:
                outside.add(x)
            if I[t - 1] - I[s - 1] < len(outside):
                bad.append((s, t))
    return bad


def solve(inst: PrefetchInstance) -> tuple[list[Fetch], int, CacheProfile]:
    profile, stall = solve_profile(inst)
    intervals = extract_intervals(profile, inst.fetch_duration)
    fetches = greedy_pages(inst, intervals)
    if fetch_stall(fetches, inst.fetch_duration) != stall:
        raise RuntimeError("interval stall differs from the LP optimum")
    return fetches, stall, profile


def solution_json(fetches, stall: int) -> dict:
    return {
        "format": 1,
        "status": "optimal",
        "stall": stall,
        "fetches": [{"start": f.start, "evict": f.evict, "end": f.end, "fetch": f.fetch}
                    for f in fetches],
    }
