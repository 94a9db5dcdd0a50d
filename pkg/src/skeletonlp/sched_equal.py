"""Equal-length jobs on parallel machines, P|r_j; p_j=p; D_j|sum C_j.

The slot skeleton is the cumulative count ``y[t]`` of slots starting at or
before each candidate time point.  It is the componentwise-maximal solution
of a difference system over the time points; with ``y[max]`` pinned to ``n``
the total completion time equals a constant minus a non-negative combination
of the ``y[t]``, so the maximal profile is also the cheapest.  Jobs are then
placed on the slots in earliest-due-date order.

Time-point conventions: ``round(t)`` is the largest point ``<= t`` and
``prec(t)`` the largest point ``< t``, both taken over the points plus the
sentinel ``t0 = min(points) - 1``.  A load constraint whose target would fall
past the last point is clamped by ``round`` to the last point.

Load is bounded on both ``(s, s+p]`` and ``[s, s+p)`` for every point ``s``.
The second family is what makes the bound exact: every set of mutually
overlapping slots starts inside ``[s, s+p)`` for its leftmost start ``s``.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .errors import AssignmentFailure, InstanceError, Violations, WindowTooShort
from .graphlp import DiffSystem, Infeasible, solve_max


@dataclass(frozen=True)
class EqualInstance:
    machines: int
    length: int
    jobs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        jobs = tuple((r, d) for r, d in self.jobs)
        object.__setattr__(self, "jobs", jobs)
        for name in ("machines", "length"):
            val = getattr(self, name)
            if type(val) is not int or val < 1:
                raise InstanceError(f"{name} must be a positive integer")
        if not jobs:
            raise InstanceError("at least one job is required")
        for j, (r, d) in enumerate(jobs):
            if type(r) is not int or type(d) is not int:
                raise InstanceError(f"job {j}: release and deadline must be integers")
            if d - r < self.length:
                raise WindowTooShort(f"job {j}: window [{r}, {d}] shorter than length {self.length}")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @classmethod
    def from_json(cls, data: dict) -> "EqualInstance":
        if data.get("format", 1) != 1:
            raise InstanceError("unsupported format version")
        try:
            jobs = tuple((job["release"], job["deadline"]) for job in data["jobs"])
            return cls(data["machines"], data["length"], jobs)
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed equal-length instance: {exc!r}") from None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "machines": self.machines,
            "length": self.length,
            "jobs": [{"release": r, "deadline": d} for r, d in self.jobs],
        }


@dataclass(frozen=True)
class TimePoints:
    t0: int
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "_all", (self.t0,) + tuple(self.points))

    @property
    def all(self) -> tuple[int, ...]:
        """The points preceded by the sentinel."""
        return self._all

    def round(self, t: int) -> int:
        pts = self.all
        i = bisect_right(pts, t) - 1
        if i < 0:
            raise ValueError(f"{t} precedes the sentinel")
        return pts[i]

    def prec(self, t: int) -> int:
        pts = self.all
        i = bisect_left(pts, t) - 1
        if i < 0:
            raise ValueError(f"nothing precedes {t}")
        return pts[i]


@dataclass(frozen=True)
class SlotProfile:
    times: tuple[int, ...]   # sentinel first, then the points
    y: tuple[int, ...]

    def counts(self) -> list[tuple[int, int]]:
        """(time, number of slots starting there) for every point."""
        return [(t, self.y[i] - self.y[i - 1]) for i, t in enumerate(self.times) if i > 0]

    def starts(self) -> list[int]:
        out = []
        for t, c in self.counts():
            out.extend([t] * c)
        return out

    def objective(self, length: int) -> int:
        return sum((t + length) * c for t, c in self.counts())


@dataclass(frozen=True)
class EqualSchedule:
    assignments: tuple[tuple[int, int], ...]   # per job: (machine, start)

    def total_completion(self, length: int) -> int:
        return sum(start + length for _, start in self.assignments)


def time_points(inst: EqualInstance) -> TimePoints:
    n, p = inst.n, inst.length
    pts = sorted({r + a * p for r, _ in inst.jobs for a in range(n)})
    return TimePoints(pts[0] - 1, tuple(pts))


def release_order(inst: EqualInstance) -> list[int]:
    """Job indices sorted by (release, deadline, index)."""
    return sorted(range(inst.n), key=lambda j: (inst.jobs[j][0], inst.jobs[j][1], j))


def inclusion_counts(inst: EqualInstance) -> list[list[int]]:
    """``c[i][j]`` over jobs in :func:`release_order`.

    ``c[i][j]`` counts jobs ``k >= i`` (in that order) with ``D_k <= D_j``.
    For the first job of each release-tie group this is exactly the number of
    windows inside ``[r_i, D_j]``; later members undercount, which only
    weakens a constraint already implied by the group's first member.
    """
    order = release_order(inst)
    dl = [inst.jobs[j][1] for j in order]
    n = inst.n
    c = [[0] * n for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        di = dl[i]
        nxt, row = c[i + 1], c[i]
        for j in range(n):
            row[j] = nxt[j] + (1 if di <= dl[j] else 0)
    return c[:n]


def build_system(inst: EqualInstance) -> DiffSystem:
    """Difference system over ``y`` indexed by sentinel + points (node 0 = sentinel)."""
    n, m, p = inst.n, inst.machines, inst.length
    tp = time_points(inst)
    times = tp.all
    node = {t: i for i, t in enumerate(times)}
    last = len(times) - 1
    cons = [(last, 0, n)]
    for i in range(1, len(times)):
        cons.append((i - 1, i, 0))                         # order
    for s in tp.points:
        t = tp.round(s + p)
        if t != s:
            cons.append((node[t], node[s], m))             # load over (s, s+p]
        # load over [s, s+p): the windows above miss cliques whose leftmost
        # start has no point exactly p before it
        t = tp.prec(s + p)
        cons.append((node[t], node[tp.prec(s)], m))
    order = release_order(inst)
    c = inclusion_counts(inst)
    for a, i in enumerate(order):
        s = tp.prec(inst.jobs[i][0])
        for b, j in enumerate(order):
            t = tp.round(inst.jobs[j][1] - p)
            if s <= t:
                cons.append((node[s], node[t], -c[a][b]))  # inclusion
    return DiffSystem.build(len(times), 0, cons, labels=times)


def solve_skeleton(inst: EqualInstance) -> SlotProfile:
    """Maximal slot profile; raises :class:`Infeasible` (cycle given as time points)."""
    system = build_system(inst)
    try:
        y = solve_max(system)
    except Infeasible as exc:
        raise Infeasible([system.label(v) for v in exc.cycle], exc.weight) from None
    return SlotProfile(system.labels, tuple(y))


def edd_assign(inst: EqualInstance, profile: SlotProfile) -> EqualSchedule:
    m, p = inst.machines, inst.length
    starts = profile.starts()
    if len(starts) != inst.n:
        raise AssignmentFailure(f"profile has {len(starts)} slots for {inst.n} jobs")
    order = release_order(inst)
    pending: list[tuple[int, int]] = []
    out: list[tuple[int, int] | None] = [None] * inst.n
    k = 0
    for idx, start in enumerate(starts):
        while k < len(order) and inst.jobs[order[k]][0] <= start:
            j = order[k]
            heapq.heappush(pending, (inst.jobs[j][1], j))
            k += 1
        if not pending:
            raise AssignmentFailure(f"no released job for the slot at {start}")
        deadline, j = heapq.heappop(pending)
        if start + p > deadline:
            raise AssignmentFailure(f"job {j} misses its deadline in the slot at {start}")
        out[j] = (idx % m + 1, start)
    return EqualSchedule(tuple(out))


def solve(inst: EqualInstance) -> EqualSchedule:
    return edd_assign(inst, solve_skeleton(inst))


def find_violations(inst: EqualInstance, sched: EqualSchedule) -> list[str]:
    p = inst.length
    problems = []
    if len(sched.assignments) != inst.n:
        return [f"{len(sched.assignments)} assignments for {inst.n} jobs"]
    by_machine: dict[int, list[tuple[int, int]]] = {}
    for j, ((r, d), (machine, start)) in enumerate(zip(inst.jobs, sched.assignments)):
        if not 1 <= machine <= inst.machines:
            problems.append(f"job {j}: machine {machine} does not exist")
        if start < r:
            problems.append(f"job {j}: starts at {start} before release {r}")
        if start + p > d:
            problems.append(f"job {j}: completes at {start + p} after deadline {d}")
        by_machine.setdefault(machine, []).append((start, j))
    for machine, runs in sorted(by_machine.items()):
        runs.sort()
        for (s1, j1), (s2, j2) in zip(runs, runs[1:]):
            if s2 < s1 + p:
                problems.append(f"jobs {j1} and {j2} overlap on machine {machine}")
    return problems


def verify_equal(inst: EqualInstance, sched: EqualSchedule) -> int:
    """Total completion time of a valid schedule; raises :class:`Violations`."""
    problems = find_violations(inst, sched)
    if problems:
        raise Violations(problems)
    return sched.total_completion(inst.length)


def solution_json(sched: EqualSchedule | None, length: int,
                  cycle: list[int] | None = None) -> dict:
    if sched is None:
        return {"format": 1, "status": "infeasible", "certificate": cycle}
    return {
        "format": 1,
        "status": "optimal",
        "total_completion": sched.total_completion(length),
        "assignments": [{"job": j, "machine": mach, "start": start}
                        for j, (mach, start) in enumerate(sched.assignments)],
    }
