"""Acceptance criteria, one test per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import json
import random
import time
from functools import lru_cache
from pathlib import Path

import pytest

from skeletonlp import oracle, prefetch, sched_equal, sched_tallsmall
from skeletonlp.cli import solve_document
from skeletonlp.errors import AssignmentFailure
from skeletonlp.generate import generate
from skeletonlp.graphlp import DiffSystem, Infeasible

GOLDEN = Path(__file__).parent / "golden"


# ------------------------------------------------------- instance corpora

@lru_cache(maxsize=None)
def equal_corpus():
    out = []
    for seed in range(1000):
        rng = random.Random(seed)
        out.append(generate("equal", seed, n=rng.randint(1, 5), machines=rng.randint(1, 3),
                            length=rng.randint(1, 3), release_max=6, slack=rng.randint(0, 4)))
    return tuple(out)


@lru_cache(maxsize=None)
def tallsmall_corpus():
    out = []
    for seed in range(1000):
        rng = random.Random(10_000 + seed)
        out.append(generate("tallsmall", seed, n=rng.randint(0, 6), machines=rng.randint(1, 3),
                            horizon=rng.randint(2, 6), tall_fraction=rng.choice([0.2, 0.4, 0.6])))
    return tuple(out)


@lru_cache(maxsize=None)
def prefetch_corpus():
    out = []
    for seed in range(500):
        rng = random.Random(20_000 + seed)
        k = rng.randint(1, 3)
        out.append(generate("prefetch", seed, n=rng.randint(k, 6), cache_size=k,
                            fetch_duration=rng.randint(1, 4), alphabet=rng.randint(k, 4)))
    return tuple(out)


def _systems():
    for inst in equal_corpus():
        yield sched_equal.build_system(inst)
    for inst in tallsmall_corpus():
        for part in sched_tallsmall.normalize(inst):
            yield sched_tallsmall.build_system(part.instance)
    for inst in prefetch_corpus():
        yield prefetch.build_lp(inst)[0]


# ------------------------------------------------------------- criteria

@pytest.mark.acceptance(1, "equal-length solver agrees with brute force on 1000 instances")
def test_equal_oracle_equivalence(record):
    t0 = time.perf_counter()
    mismatches, infeasible = [], 0
    for i, inst in enumerate(equal_corpus()):
        ref = oracle.brute_equal(inst)
        try:
            got = sched_equal.verify_equal(inst, sched_equal.solve(inst))
        except Infeasible:
            got = None
            infeasible += 1
        if got != ref.objective:
            mismatches.append(i)
    elapsed = time.perf_counter() - t0
    record(f"{len(mismatches)} mismatches, {infeasible} infeasible, {elapsed:.1f}s")
    assert mismatches == []
    assert elapsed < 60


@pytest.mark.acceptance(2, "tall/small solver agrees with brute force on 1000 instances")
def test_tallsmall_oracle_equivalence(record):
    mismatches, infeasible = [], 0
    for i, inst in enumerate(tallsmall_corpus()):
        assert inst.horizon <= 6 and len(inst.small) + len(inst.tall) <= 6 and inst.machines <= 3
        ref = oracle.brute_tallsmall(inst)
        try:
            got = sched_tallsmall.verify_tallsmall(inst, sched_tallsmall.solve(inst))
        except Infeasible:
            got = None
            infeasible += 1
        if got != ref.objective:
            mismatches.append(i)
    record(f"{len(mismatches)} mismatches, {infeasible} infeasible")
    assert mismatches == []


@pytest.mark.acceptance(3, "prefetch stall, greedy pages and cache invariant on 500 instances")
def test_prefetch_oracle_equivalence(record):
    mismatches, failures, broken = [], 0, 0
    for i, inst in enumerate(prefetch_corpus()):
        ref = oracle.brute_prefetch(inst)
        try:
            fetches, stall, profile = prefetch.solve(inst)
        except AssignmentFailure:
            failures += 1
            continue
        if prefetch.simulate(inst, fetches) != stall or stall != ref.objective:
            mismatches.append(i)
        if prefetch.invariant_check(inst, profile, fetches):
            broken += 1
    record(f"{len(mismatches)} stall mismatches, {failures} assignment failures, "
           f"{broken} invariant violations")
    assert (mismatches, failures, broken) == ([], 0, 0)


def _all_ints(obj) -> bool:
    if isinstance(obj, (tuple, list)):
        return all(_all_ints(x) for x in obj)
    if isinstance(obj, prefetch.Fetch):
        return _all_ints((obj.start, obj.end))
    return type(obj) is int


@pytest.mark.acceptance(4, "difference rows only, integer values in every public result")
def test_structural_unimodularity(record):
    rows = 0
    for system in _systems():
        assert isinstance(system, DiffSystem)
        for u, v, b in system.constraints:
            assert u != v and type(u) is int and type(v) is int and type(b) is int
            rows += 1
    for inst in equal_corpus():
        try:
            prof = sched_equal.solve_skeleton(inst)
        except Infeasible as exc:
            assert type(exc.weight) is int
            continue
        assert _all_ints(prof.y) and _all_ints(prof.times)
        assert _all_ints(sched_equal.edd_assign(inst, prof).assignments)
    for inst in tallsmall_corpus():
        try:
            sched = sched_tallsmall.solve(inst)
        except Infeasible:
            continue
        assert _all_ints(sched.tall) and _all_ints(sched.small) and _all_ints(sched.idle_tall_slots)
    for inst in prefetch_corpus():
        fetches, stall, profile = prefetch.solve(inst)
        assert type(stall) is int and _all_ints(profile.I) and _all_ints(profile.O)
        assert _all_ints(fetches)
    record(f"{rows} constraint rows checked")


@pytest.mark.acceptance(5, "objective identities")
def test_objective_identities(record):
    for inst in prefetch_corpus():
        _, stall, profile = prefetch.solve(inst)
        intervals = prefetch.extract_intervals(profile, inst.fetch_duration)
        assert stall == sum(inst.fetch_duration - (e - s) for s, e in intervals)
    compared = 0
    for inst in equal_corpus():
        try:
            prof = sched_equal.solve_skeleton(inst)
        except Infeasible:
            continue
        best = prof.objective(inst.length)
        for starts in oracle.equal_start_vectors(inst):
            assert best <= sum(starts) + inst.n * inst.length
            compared += 1
    record(f"prefetch LP = interval stall on {len(prefetch_corpus())} instances; "
           f"{compared} equal-length profiles dominated")


GOLDEN_CASES = [
    ("equal", "equal_three_jobs", 0),
    ("tallsmall", "tallsmall_two_machines", 0),
    ("tallsmall", "tallsmall_one_machine", 2),
    ("prefetch", "prefetch_abac", 0),
    ("prefetch", "prefetch_aabb", 0),
]


@pytest.mark.acceptance(6, "worked fixtures reproduce golden JSON byte for byte")
def test_golden_fixtures(record):
    for command, name, code in GOLDEN_CASES:
        got_code, text = solve_document(command, (GOLDEN / f"{name}.json").read_text(),
                                        verify=True, oracle_check=True)
        assert got_code == code, name
        assert text == (GOLDEN / f"{name}.expected.json").read_text(), name
    # the headline numbers, independently of the stored bytes
    objectives = {name: json.loads((GOLDEN / f"{name}.expected.json").read_text()).get("objective")
                  for _, name, _ in GOLDEN_CASES}
    assert objectives == {"equal_three_jobs": 12, "tallsmall_two_machines": 2,
                          "tallsmall_one_machine": None, "prefetch_abac": 1, "prefetch_aabb": 2}
    record(f"{len(GOLDEN_CASES)} fixtures")


@pytest.mark.acceptance(7, "scale smoke: equal n=200, tall/small n=H=300, prefetch n=200")
def test_scale_smoke(record):
    timings = []

    inst = generate("equal", 1, n=200, machines=3, length=3, release_max=200, slack=30)
    t0 = time.perf_counter()
    sched_equal.verify_equal(inst, sched_equal.solve(inst))
    timings.append(("equal", time.perf_counter() - t0, 30))

    inst = generate("tallsmall", 1, n=300, machines=3, horizon=300, tall_fraction=0.3)
    t0 = time.perf_counter()
    sched_tallsmall.verify_tallsmall(inst, sched_tallsmall.solve(inst))  # seed 1 is feasible
    timings.append(("tallsmall", time.perf_counter() - t0, 30))

    for F in (3, 50, 200):
        inst = generate("prefetch", 1, n=200, cache_size=4, fetch_duration=F, alphabet=12)
        t0 = time.perf_counter()
        fetches, stall, _ = prefetch.solve(inst)
        assert prefetch.simulate(inst, fetches) == stall
        timings.append((f"prefetch F={F}", time.perf_counter() - t0, 60))

    record(", ".join(f"{name} {t:.1f}s" for name, t, _ in timings))
    for name, t, limit in timings:
        assert t < limit, name
