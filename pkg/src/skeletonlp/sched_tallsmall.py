"""Unit jobs on ``m`` machines where tall jobs occupy every machine at once.

Slot ``t`` is the unit interval ``[t, t+1)``; a job with window ``[r, D]``
may run in slots ``r .. D-1``.  ``x[t]`` counts the slots ``1..t`` reserved
for tall jobs.  Besides the four families of difference constraints
(monotone, one tall job per slot, enough slots for the tall windows, enough
free slots for the small windows) the total is capped at the number of tall
jobs.  The tall-window constraint over the whole horizon then pins
``x[H] = n_tall``, and the tall jobs' total completion becomes a constant
minus ``sum(x)``: the componentwise-maximal profile is the cheapest one.

Without the cap the maximal profile reserves slots before any tall job is
released; those slots block the small jobs and push tall jobs later.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import AssignmentFailure, InstanceError, Violations, WindowTooShort
from .graphlp import DiffSystem, Infeasible, solve_max


@dataclass(frozen=True)
class TallSmallInstance:
    machines: int
    small: tuple[tuple[int, int], ...] = ()
    tall: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "small", tuple((r, d) for r, d in self.small))
        object.__setattr__(self, "tall", tuple((r, d) for r, d in self.tall))
        if type(self.machines) is not int or self.machines < 1:
            raise InstanceError("machines must be a positive integer")
        for kind, jobs in (("small", self.small), ("tall", self.tall)):
            for j, (r, d) in enumerate(jobs):
                if type(r) is not int or type(d) is not int:
                    raise InstanceError(f"{kind} job {j}: release and deadline must be integers")
                if d < r + 1:
                    raise WindowTooShort(f"{kind} job {j}: window [{r}, {d}] holds no slot")

    @property
    def horizon(self) -> int:
        return max((d for _, d in self.small + self.tall), default=0)

    @classmethod
    def from_json(cls, data: dict) -> "TallSmallInstance":
        if data.get("format", 1) != 1:
            raise InstanceError("unsupported format version")
        try:
            small = tuple((j["release"], j["deadline"]) for j in data.get("small", []))
            tall = tuple((j["release"], j["deadline"]) for j in data.get("tall", []))
            return cls(data["machines"], small, tall)
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed tall/small instance: {exc!r}") from None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "machines": self.machines,
            "small": [{"release": r, "deadline": d} for r, d in self.small],
            "tall": [{"release": r, "deadline": d} for r, d in self.tall],
        }


@dataclass(frozen=True)
class Part:
    """An independent piece of an instance, shifted so its first slot is 1."""

    instance: TallSmallInstance
    offset: int
    small_ids: tuple[int, ...]
    tall_ids: tuple[int, ...]


@dataclass(frozen=True)
class TallProfile:
    x: tuple[int, ...]

    def tall_slots(self) -> list[int]:
        return [t for t in range(1, len(self.x)) if self.x[t] - self.x[t - 1] == 1]


@dataclass(frozen=True)
class TallSmallSchedule:
    tall: tuple[int, ...]                      # slot per tall job
    small: tuple[tuple[int, int], ...]         # (machine, slot) per small job
    idle_tall_slots: tuple[int, ...] = ()

    def tall_completion(self) -> int:
        return sum(t + 1 for t in self.tall)


def normalize(inst: TallSmallInstance) -> list[Part]:
    """Split at dead slots and shift every part to start at slot 1."""
    live = set()
    for r, d in inst.small + inst.tall:
        live.update(range(r, d))
    runs: list[tuple[int, int]] = []
    for t in sorted(live):
        if runs and runs[-1][1] == t - 1:
            runs[-1] = (runs[-1][0], t)
        else:
            runs.append((t, t))
    parts = []
    for lo, hi in runs:
        offset = lo - 1
        small_ids = tuple(j for j, (r, _) in enumerate(inst.small) if lo <= r <= hi)
        tall_ids = tuple(j for j, (r, _) in enumerate(inst.tall) if lo <= r <= hi)
        part = TallSmallInstance(
            inst.machines,
            tuple((inst.small[j][0] - offset, inst.small[j][1] - offset) for j in small_ids),
            tuple((inst.tall[j][0] - offset, inst.tall[j][1] - offset) for j in tall_ids),
        )
        parts.append(Part(part, offset, small_ids, tall_ids))
    return parts


def _window_counts(jobs, horizon: int) -> list[list[int]]:
    # cnt[s][t] = #{j : s <= r_j and D_j <= t}
    cnt = [[0] * (horizon + 2) for _ in range(horizon + 2)]
    for r, d in jobs:
        cnt[r][d] += 1
    for s in range(horizon, 0, -1):
        row, below = cnt[s], cnt[s + 1]
        acc = 0
        for t in range(1, horizon + 1):
            acc += row[t]
            row[t] = acc + below[t]
    return cnt


def demand_counts(inst: TallSmallInstance) -> tuple[list[list[int]], list[list[int]]]:
    """``(k, l)`` with ``k[s][t]`` small and ``l[s][t]`` tall windows inside ``[s, t]``."""
    h = inst.horizon
    return _window_counts(inst.small, h), _window_counts(inst.tall, h)


def build_system(inst: TallSmallInstance) -> DiffSystem:
    """Nodes ``x_0 .. x_H`` with root ``x_0``; ``inst`` must be normalized."""
    h, m = inst.horizon, inst.machines
    k, l = demand_counts(inst)
    cons = [(h, 0, len(inst.tall))]       # exactly one reserved slot per tall job
    for t in range(1, h + 1):
        cons.append((t - 1, t, 0))        # order
        cons.append((t, t - 1, 1))        # one tall job per slot
    for s in range(1, h + 1):
        for t in range(s + 1, h + 1):
            cons.append((s - 1, t - 1, -l[s][t]))                    # tall demand
            cons.append((t - 1, s - 1, (t - s) - -(-k[s][t] // m)))  # small demand
    return DiffSystem.build(h + 1, 0, cons, labels=range(h + 1))


def solve_skeleton(inst: TallSmallInstance) -> TallProfile:
    return TallProfile(tuple(solve_max(build_system(inst))))


def assign_jobs(inst: TallSmallInstance, profile: TallProfile) -> TallSmallSchedule:
    m = inst.machines
    tall_slots = profile.tall_slots()
    blocked = set(tall_slots)

    tall: list[int | None] = [None] * len(inst.tall)
    idle = []
    order = sorted(range(len(inst.tall)), key=lambda j: inst.tall[j])
    pending: list[tuple[int, int]] = []
    i = 0
    for t in tall_slots:
        while i < len(order) and inst.tall[order[i]][0] <= t:
            heapq.heappush(pending, (inst.tall[order[i]][1], order[i]))
            i += 1
        if not pending:
            idle.append(t)
            continue
        d, j = heapq.heappop(pending)
        if t + 1 > d:
            raise AssignmentFailure(f"tall job {j} misses its deadline at slot {t}")
        tall[j] = t
    if pending or i < len(order):
        raise AssignmentFailure("tall jobs left without a slot")

    small: list[tuple[int, int] | None] = [None] * len(inst.small)
    order = sorted(range(len(inst.small)), key=lambda j: inst.small[j])
    pending = []
    i = 0
    for t in range(1, inst.horizon + 1):
        while i < len(order) and inst.small[order[i]][0] <= t:
            heapq.heappush(pending, (inst.small[order[i]][1], order[i]))
            i += 1
        if t in blocked:
            continue
        for machine in range(1, m + 1):
            if not pending:
                break
            d, j = heapq.heappop(pending)
            if t + 1 > d:
                raise AssignmentFailure(f"small job {j} misses its deadline at slot {t}")
            small[j] = (machine, t)
    if pending or i < len(order):
        raise AssignmentFailure("small jobs left without a slot")
    return TallSmallSchedule(tuple(tall), tuple(small), tuple(idle))


def solve(inst: TallSmallInstance) -> TallSmallSchedule:
    """Solve every part and map slots back to the original time axis.

    Raises :class:`Infeasible` with the cycle given as original ``x`` indices.
    """
    tall = [0] * len(inst.tall)
    small = [(0, 0)] * len(inst.small)
    idle = []
    for part in normalize(inst):
        system = build_system(part.instance)
        try:
            x = solve_max(system)
        except Infeasible as exc:
            raise Infeasible([v + part.offset for v in exc.cycle], exc.weight) from None
        sched = assign_jobs(part.instance, TallProfile(tuple(x)))
        for j, t in zip(part.tall_ids, sched.tall):
            tall[j] = t + part.offset
        for j, (mach, t) in zip(part.small_ids, sched.small):
            small[j] = (mach, t + part.offset)
        idle.extend(t + part.offset for t in sched.idle_tall_slots)
    return TallSmallSchedule(tuple(tall), tuple(small), tuple(idle))


def find_violations(inst: TallSmallInstance, sched: TallSmallSchedule) -> list[str]:
    problems = []
    if len(sched.tall) != len(inst.tall) or len(sched.small) != len(inst.small):
        return ["assignment count does not match job count"]
    for j, ((r, d), t) in enumerate(zip(inst.tall, sched.tall)):
        if not r <= t <= d - 1:
            problems.append(f"tall job {j}: slot {t} outside window [{r}, {d}]")
    seen: dict[int, int] = {}
    for j, t in enumerate(sched.tall):
        if t in seen:
            problems.append(f"tall jobs {seen[t]} and {j} share slot {t}")
        seen.setdefault(t, j)
    used: dict[tuple[int, int], int] = {}
    for j, ((r, d), (mach, t)) in enumerate(zip(inst.small, sched.small)):
        if not r <= t <= d - 1:
            problems.append(f"small job {j}: slot {t} outside window [{r}, {d}]")
        if not 1 <= mach <= inst.machines:
            problems.append(f"small job {j}: machine {mach} does not exist")
        if t in seen:
            problems.append(f"small job {j} runs in slot {t} taken by tall job {seen[t]}")
        if (mach, t) in used:
            problems.append(f"small jobs {used[(mach, t)]} and {j} share machine {mach} at slot {t}")
        used.setdefault((mach, t), j)
    return problems


def verify_tallsmall(inst: TallSmallInstance, sched: TallSmallSchedule) -> int:
    """Tall-job total completion of a valid schedule; raises :class:`Violations`."""
    problems = find_violations(inst, sched)
    if problems:
        raise Violations(problems)
    return sched.tall_completion()


def solution_json(sched: TallSmallSchedule | None, cycle: list[int] | None = None) -> dict:
    if sched is None:
        return {"format": 1, "status": "infeasible", "certificate": cycle}
    return {
        "format": 1,
        "status": "optimal",
        "tall_completion": sched.tall_completion(),
        "tall_assignments": [{"job": j, "slot": t} for j, t in enumerate(sched.tall)],
        "small_assignments": [{"job": j, "machine": mach, "slot": t}
                              for j, (mach, t) in enumerate(sched.small)],
        "idle_tall_slots": list(sched.idle_tall_slots),
    }
