"""Seeded random instances for the three problems."""

from __future__ import annotations

import random

from .prefetch import PrefetchInstance
from .sched_equal import EqualInstance
from .sched_tallsmall import TallSmallInstance

DEFAULTS = {
    "equal": {"n": 5, "machines": 2, "length": 2, "release_max": 6, "slack": 4},
    "tallsmall": {"n": 6, "machines": 2, "horizon": 6, "tall_fraction": 0.4},
    "prefetch": {"n": 6, "cache_size": 2, "fetch_duration": 2, "alphabet": 4},
}


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def gen_equal(rng: random.Random, n: int, machines: int, length: int,
              release_max: int, slack: int) -> EqualInstance:
    _check(n >= 1 and machines >= 1 and length >= 1, "n, machines and length must be >= 1")
    _check(release_max >= 0 and slack >= 0, "release_max and slack must be >= 0")
    jobs = []
    for _ in range(n):
        r = rng.randint(0, release_max)
        jobs.append((r, r + length + rng.randint(0, slack)))
    return EqualInstance(machines, length, tuple(jobs))


def gen_tallsmall(rng: random.Random, n: int, machines: int, horizon: int,
                  tall_fraction: float) -> TallSmallInstance:
    _check(n >= 0 and machines >= 1, "n must be >= 0 and machines >= 1")
    _check(horizon >= 2, "horizon must be >= 2")
    _check(0.0 <= tall_fraction <= 1.0, "tall_fraction must lie in [0, 1]")
    small, tall = [], []
    for _ in range(n):
        r = rng.randint(1, horizon - 1)
        d = rng.randint(r + 1, horizon)
        (tall if rng.random() < tall_fraction else small).append((r, d))
    return TallSmallInstance(machines, tuple(small), tuple(tall))


def gen_prefetch(rng: random.Random, n: int, cache_size: int, fetch_duration: int,
                 alphabet: int) -> PrefetchInstance:
    _check(n >= 1 and cache_size >= 1 and fetch_duration >= 1, "n, cache_size and fetch_duration must be >= 1")
    _check(cache_size <= alphabet, "alphabet must be at least cache_size")
    _check(cache_size <= n, "n must be at least cache_size")
    pages = [f"p{i}" for i in range(alphabet)]
    while True:
        reqs = [rng.choice(pages) for _ in range(n)]
        if len(set(reqs)) >= cache_size:
            return PrefetchInstance(tuple(reqs), cache_size, fetch_duration)


GENERATORS = {"equal": gen_equal, "tallsmall": gen_tallsmall, "prefetch": gen_prefetch}


def generate(kind: str, seed: int, **params):
    """Instance of ``kind``; identical ``(kind, seed, params)`` give identical output."""
    if kind not in GENERATORS:
        raise ValueError(f"unknown instance kind {kind!r}")
    unknown = set(params) - set(DEFAULTS[kind])
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    merged = {**DEFAULTS[kind], **{k: v for k, v in params.items() if v is not None}}
    return GENERATORS[kind](random.Random(seed), **merged)
