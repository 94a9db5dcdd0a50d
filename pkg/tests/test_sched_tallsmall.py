import pytest
from hypothesis import given, settings, strategies as st

from skeletonlp import oracle
from skeletonlp.errors import AssignmentFailure, InstanceError, Violations, WindowTooShort
from skeletonlp.graphlp import Infeasible, check_valuation
from skeletonlp.sched_tallsmall import (
    TallProfile,
    TallSmallInstance,
    TallSmallSchedule,
    assign_jobs,
    build_system,
    demand_counts,
    find_violations,
    normalize,
    solution_json,
    solve,
    solve_skeleton,
    verify_tallsmall,
)

FEASIBLE = TallSmallInstance(2, small=((1, 3), (1, 3)), tall=((1, 2),))
INFEASIBLE = TallSmallInstance(1, small=((1, 2),), tall=((1, 2),))


@st.composite
def ts_instances(draw, horizon=6):
    m = draw(st.integers(1, 3))
    small, tall = [], []
    for _ in range(draw(st.integers(0, 6))):
        r = draw(st.integers(1, horizon - 1))
        d = draw(st.integers(r + 1, horizon))
        (tall if draw(st.booleans()) else small).append((r, d))
    return TallSmallInstance(m, tuple(small), tuple(tall))


# ---------------------------------------------------------------- instance

def test_empty_window_rejected():
    with pytest.raises(WindowTooShort):
        TallSmallInstance(1, small=((3, 3),))


def test_bad_machines():
    with pytest.raises(InstanceError):
        TallSmallInstance(0)


def test_json_round_trip():
    assert TallSmallInstance.from_json(FEASIBLE.to_json()) == FEASIBLE


# --------------------------------------------------------------- normalize

def test_dead_slot_splits_parts():
    parts = normalize(TallSmallInstance(1, small=((1, 2), (5, 6))))
    assert len(parts) == 2
    assert parts[1].offset == 4
    assert parts[1].instance.small == ((1, 2),)


def test_single_part_unchanged():
    inst = TallSmallInstance(1, small=((1, 3), (2, 3)), tall=((1, 2),))
    (part,) = normalize(inst)
    assert part.offset == 0
    assert part.instance == inst


def test_shifted_part():
    (part,) = normalize(TallSmallInstance(1, small=((4, 6), (5, 7))))
    assert part.offset == 3
    assert part.instance.small == ((1, 3), (2, 4))


# ----------------------------------------------------------------- demand

def test_tall_window_count():
    _, l = demand_counts(TallSmallInstance(1, tall=((1, 2),)))
    assert l[1][2] == 1
    assert l[2][2] == 0


def test_small_window_count():
    k, _ = demand_counts(TallSmallInstance(1, small=((1, 3), (1, 3))))
    assert k[1][3] == 2
    assert k[1][2] == 0


@settings(max_examples=100, deadline=None)
@given(ts_instances())
def test_demand_counts_match_double_loop(inst):
    k, l = demand_counts(inst)
    h = inst.horizon
    for s in range(1, h + 1):
        for t in range(s, h + 1):
            assert k[s][t] == sum(1 for r, d in inst.small if s <= r and d <= t)
            assert l[s][t] == sum(1 for r, d in inst.tall if s <= r and d <= t)


# ------------------------------------------------------------ build_system

def test_contradiction_on_one_machine():
    cons = {(u, v): b for u, v, b in build_system(INFEASIBLE).constraints}
    assert cons[(0, 1)] == -1     # x_1 - x_0 >= 1
    assert cons[(1, 0)] == 0      # x_1 - x_0 <= 0


def test_no_jobs_is_feasible():
    inst = TallSmallInstance(1, small=(), tall=())
    assert solve(inst) == TallSmallSchedule((), (), ())


def test_small_demand_bound():
    cons = {(u, v): b for u, v, b in build_system(FEASIBLE).constraints}
    assert cons[(2, 0)] == 1      # x_2 - x_0 <= 1 from ceil(2/2) small slots in [1, 3]


# ---------------------------------------------------------- solve_skeleton

def test_feasible_profile():
    # the cap on the total keeps the profile from reserving an idle slot 3
    assert solve_skeleton(FEASIBLE).x == (0, 1, 1, 1)


def test_single_tall_profile():
    assert solve_skeleton(TallSmallInstance(1, tall=((1, 3),))).x == (0, 1, 1, 1)


def test_infeasible_skeleton():
    with pytest.raises(Infeasible) as info:
        solve_skeleton(INFEASIBLE)
    assert info.value.weight < 0


@settings(max_examples=150, deadline=None)
@given(ts_instances())
def test_profile_is_valid_and_pinned_to_tall_count(inst):
    try:
        sched = solve(inst)
    except Infeasible:
        assert not oracle.brute_tallsmall(inst).feasible
        return
    for part in normalize(inst):
        x = solve_skeleton(part.instance).x
        assert check_valuation(build_system(part.instance), list(x)) == []
        assert x[-1] == len(part.instance.tall)
    verify_tallsmall(inst, sched)


# ------------------------------------------------------------- assignment

def test_feasible_assignment():
    sched = solve(FEASIBLE)
    assert sched.tall == (1,)
    assert sched.small == ((1, 2), (2, 2))
    assert sched.idle_tall_slots == ()
    assert sched.tall_completion() == 2


def test_idle_tall_slot_reported():
    sched = assign_jobs(FEASIBLE, TallProfile((0, 1, 1, 2)))
    assert sched.idle_tall_slots == (3,)
    assert sched.small == ((1, 2), (2, 2))


def test_only_tall_jobs():
    sched = solve(TallSmallInstance(3, tall=((1, 3), (1, 2))))
    assert sched.small == ()
    assert sched.tall == (2, 1)


def test_too_few_tall_slots():
    with pytest.raises(AssignmentFailure):
        assign_jobs(TallSmallInstance(1, tall=((1, 3), (1, 3))), TallProfile((0, 1, 1, 1)))


def test_offset_parts_map_back():
    inst = TallSmallInstance(1, small=((2, 3),), tall=((6, 8),))
    sched = solve(inst)
    assert sched.small == ((1, 2),)
    assert sched.tall == (6,)


# ------------------------------------------------------------------ verify

def test_verify_feasible():
    assert verify_tallsmall(FEASIBLE, solve(FEASIBLE)) == 2


def test_small_in_tall_slot():
    problems = find_violations(FEASIBLE, TallSmallSchedule((1,), ((1, 1), (2, 2))))
    assert any("taken by tall" in p for p in problems)


def test_duplicate_machine_slot():
    with pytest.raises(Violations) as info:
        verify_tallsmall(FEASIBLE, TallSmallSchedule((1,), ((1, 2), (1, 2))))
    assert any("share machine" in p for p in info.value.problems)


@settings(max_examples=200, deadline=None)
@given(ts_instances())
def test_solver_matches_oracle(inst):
    ref = oracle.brute_tallsmall(inst)
    try:
        sched = solve(inst)
    except Infeasible:
        assert not ref.feasible
        return
    assert ref.feasible
    assert verify_tallsmall(inst, sched) == ref.objective


def test_solution_json_shapes():
    doc = solution_json(solve(FEASIBLE))
    assert doc["tall_assignments"] == [{"job": 0, "slot": 1}]
    assert doc["small_assignments"][1] == {"job": 1, "machine": 2, "slot": 2}
    assert solution_json(None, [1, 0, 1])["certificate"] == [1, 0, 1]
