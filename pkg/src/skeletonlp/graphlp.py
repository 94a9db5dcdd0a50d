"""Exact solvers for systems of difference constraints.

A constraint ``(u, v, b)`` reads ``value[u] - value[v] <= b``.  For shortest
paths it becomes the arc ``v -> u`` with weight ``b``; the distances from the
pinned root are then the componentwise-maximal feasible valuation.

Linear objectives over such systems are solved through the dual min-cost flow.
Sign convention of the dual network (frozen, guarded by the brute-force tests):

* every constraint ``(u, v, b)`` is a flow arc ``v -> u`` of cost ``b`` with
  unbounded capacity;
* the excess (supply) of node ``w`` is ``coeffs[w]``; the root takes
  ``-sum(coeffs)`` so that excesses balance;
* ``min sum(coeffs * values) == -(min flow cost)``.

An optimal valuation is read off the residual graph: the flow-carrying arcs
are tight, so adding the reversed constraint ``(v, u, -b)`` for each of them
and solving by shortest paths yields the extreme point of the optimal face.

Everything here works on Python ints only.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "DiffSystem",
    "FlowNetwork",
    "Flow",
    "Infeasible",
    "InfeasibleFlow",
    "UnboundedFlow",
    "Unbounded",
    "solve_max",
    "solve_min",
    "find_negative_cycle",
    "check_valuation",
    "solve_min_cost_flow",
    "flow_potentials",
    "dual_network",
    "solve_difference_lp",
    "objective_value",
]

UNBOUNDED = None  # capacity marker for uncapacitated arcs


class Infeasible(Exception):
    """The difference system has no solution.

    ``cycle`` lists nodes ``c0, c1, ..., c0`` such that every consecutive pair
    ``(a, b)`` is an arc of the shortest-path graph (i.e. there is a
    constraint ``value[b] - value[a] <= w``) and the weights sum to
    ``weight < 0``.
    """

    def __init__(self, cycle: list[int], weight: int):
        super().__init__(f"negative cycle of weight {weight}: {cycle}")
        self.cycle = cycle
        self.weight = weight


class Unbounded(Exception):
    """The objective is unbounded below over the feasible valuations."""


class InfeasibleFlow(Exception):
    """Supplies cannot be routed to demands."""


class UnboundedFlow(Exception):
    """A negative-cost cycle of unbounded capacity exists."""

    def __init__(self, cycle: list[int]):
        super().__init__(f"negative-cost uncapacitated cycle: {cycle}")
        self.cycle = cycle


@dataclass(frozen=True)
class DiffSystem:
    node_count: int
    root: int
    constraints: tuple[tuple[int, int, int], ...]
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        if not 0 <= self.root < self.node_count:
            raise ValueError("root out of range")
        cons = tuple(tuple(c) for c in self.constraints)
        for u, v, b in cons:
            # one +1 and one -1 per row: two distinct variables, integer bound
            if type(u) is not int or type(v) is not int or type(b) is not int:
                raise TypeError(f"constraint {(u, v, b)} must be all ints")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"constraint {(u, v, b)} references unknown node")
            if u == v:
                raise ValueError(f"constraint {(u, v, b)} has a single variable")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def build(cls, node_count: int, root: int, constraints: Iterable[tuple[int, int, int]],
              labels: Sequence | None = None) -> "DiffSystem":
        """Deduplicate constraints keeping the tightest bound per (u, v).

        Self-loops ``(u, u, b)`` with ``b >= 0`` are dropped; with ``b < 0``
        they are contradictions and are rejected.
        """
        tight: dict[tuple[int, int], int] = {}
        for u, v, b in constraints:
            if u == v:
                if b < 0:
                    raise ValueError(f"contradictory self-constraint on node {u}")
                continue
            key = (u, v)
            if key not in tight or b < tight[key]:
                tight[key] = b
        cons = tuple((u, v, b) for (u, v), b in tight.items())
        return cls(node_count, root, cons, tuple(labels) if labels is not None else None)

    def label(self, node: int):
        return self.labels[node] if self.labels is not None else node

    def reversed(self) -> "DiffSystem":
        """System over the negated variables: ``(u, v, b)`` becomes ``(v, u, b)``."""
        return DiffSystem(self.node_count, self.root,
                          tuple((v, u, b) for u, v, b in self.constraints), self.labels)

    def dump(self) -> str:
        """Line-oriented text form, one constraint per line."""
        lines = [f"nodes {self.node_count} root {self.root}"]
        lines += [f"{u} {v} {b}" for u, v, b in self.constraints]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "DiffSystem":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        head = rows[0]
        if head[0] != "nodes" or head[2] != "root":
            raise ValueError("bad header")
        return cls(int(head[1]), int(head[3]), tuple((int(a), int(b), int(c)) for a, b, c in rows[1:]))


def _adjacency(n: int, constraints: Iterable[tuple[int, int, int]]) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, b in constraints:
        adj[v].append((u, b))
    for row in adj:
        row.sort()
    return adj


def _extract_cycle(pred: list[int], start: int) -> list[int] | None:
    """Cycle of the predecessor graph reachable backwards from ``start``."""
    seen: dict[int, int] = {}
    walk = []
    node = start
    while node != -1 and node not in seen:
        seen[node] = len(walk)
        walk.append(node)
        node = pred[node]
    if node == -1:
        return None
    cycle = walk[seen[node]:] + [node]
    cycle.reverse()
    return cycle


def _pred_graph_cycle(pred: list[int]) -> list[int] | None:
    """Any cycle of the predecessor graph, scanning nodes in id order."""
    state = [0] * len(pred)   # 0 unseen, 1 on the current walk, 2 finished
    for start in range(len(pred)):
        if state[start]:
            continue
        walk = []
        node = start
        while node != -1 and state[node] == 0:
            state[node] = 1
            walk.append(node)
            node = pred[node]
        if node != -1 and state[node] == 1:
            return _extract_cycle(pred, node)
        for v in walk:
            state[v] = 2
    return None


def _bellman_ford(n: int, adj: list[list[tuple[int, int]]], sources: Sequence[int],
                  init: Sequence[int] | None = None):
    """Queue-based Bellman-Ford.  Returns (dist, None) or (None, cycle).

    ``dist[v]`` is ``None`` for nodes not reachable from ``sources``.
    Nodes are scanned in FIFO order and arcs in increasing target id, so the
    predecessor tree (and any cycle witness) is deterministic.  Every ``n``
    relaxations the predecessor graph is searched for a cycle; such a cycle
    always has negative weight.
    """
    dist: list[int | None] = [None] * n
    pred = [-1] * n
    hops = [0] * n
    in_queue = [False] * n
    queue: deque[int] = deque()
    for i, s in enumerate(sources):
        dist[s] = 0 if init is None else init[i]
        queue.append(s)
        in_queue[s] = True
    budget = n
    while queue:
        v = queue.popleft()
        in_queue[v] = False
        dv = dist[v]
        for u, w in adj[v]:
            cand = dv + w
            du = dist[u]
            if du is None or cand < du:
                dist[u] = cand
                pred[u] = v
                hops[u] = hops[v] + 1
                if hops[u] >= n:
                    cycle = _extract_cycle(pred, u)
                    if cycle is not None:
                        return None, cycle
                budget -= 1
                if budget == 0:
                    budget = n
                    cycle = _pred_graph_cycle(pred)
                    if cycle is not None:
                        return None, cycle
                if not in_queue[u]:
                    queue.append(u)
                    in_queue[u] = True
    return dist, None


def _cycle_weight(system: DiffSystem, cycle: list[int]) -> int:
    bound = {(u, v): b for u, v, b in system.constraints}
    return sum(bound[(b, a)] for a, b in zip(cycle, cycle[1:]))


def find_negative_cycle(system: DiffSystem) -> list[int] | None:
    """Negative cycle anywhere in the system, ignoring reachability from root."""
    n = system.node_count
    adj = _adjacency(n, system.constraints)
    _, cycle = _bellman_ford(n, adj, range(n))
    return cycle


def solve_max(system: DiffSystem) -> list[int]:
    """Componentwise-maximal valuation with ``value[root] == 0``.

    Raises :class:`Infeasible` with a cycle witness if the system has a
    negative cycle, and ``ValueError`` if some node has no upper bound
    relative to the root (not reachable in the shortest-path graph).
    """
    n = system.node_count
    adj = _adjacency(n, system.constraints)
    dist, cycle = _bellman_ford(n, adj, [system.root])
    if cycle is not None:
        raise Infeasible(cycle, _cycle_weight(system, cycle))
    missing = [v for v in range(n) if dist[v] is None]
    if missing:
        # an unreachable part may still hide a negative cycle
        cycle = find_negative_cycle(system)
        if cycle is not None:
            raise Infeasible(cycle, _cycle_weight(system, cycle))
        raise ValueError(f"nodes {missing[:5]} are unbounded above relative to the root")
    return dist


def solve_min(system: DiffSystem) -> list[int]:
    """Componentwise-minimal valuation with ``value[root] == 0``."""
    try:
        neg = solve_max(system.reversed())
    except Infeasible as exc:
        cycle = exc.cycle[::-1]
        raise Infeasible(cycle, exc.weight) from None
    return [-x for x in neg]


def check_valuation(system: DiffSystem, values: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """Violated constraints as ``(u, v, bound, actual)``.

    A nonzero root value is reported as ``(root, root, 0, value[root])``.
    """
    if len(values) != system.node_count:
        raise ValueError("valuation length does not match node_count")
    out = []
    if values[system.root] != 0:
        out.append((system.root, system.root, 0, values[system.root]))
    for u, v, b in system.constraints:
        diff = values[u] - values[v]
        if diff > b:
            out.append((u, v, b, diff))
    return out


def objective_value(coeffs: Sequence[int], values: Sequence[int]) -> int:
    return sum(c * x for c, x in zip(coeffs, values))


# ---------------------------------------------------------------- min cost flow

@dataclass(frozen=True)
class FlowNetwork:
    """Arcs are ``(tail, head, cost, capacity)``; capacity ``None`` is unbounded."""

    node_count: int
    arcs: tuple[tuple[int, int, int, int | None], ...]
    excess: tuple[int, ...]

    def __post_init__(self):
        arcs = tuple(tuple(a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "excess", tuple(self.excess))
        if len(self.excess) != self.node_count:
            raise ValueError("excess length does not match node_count")
        if sum(self.excess) != 0:
            raise ValueError("excesses must sum to zero")
        for a, b, c, cap in arcs:
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise ValueError(f"arc {(a, b)} references unknown node")
            if cap is not None and cap <= 0:
                raise ValueError("capacities must be positive")

    def dump(self) -> str:
        lines = [f"nodes {self.node_count}", "excess " + " ".join(map(str, self.excess))]
        for a, b, c, cap in self.arcs:
            lines.append(f"{a} {b} {c} {'inf' if cap is None else cap}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Flow:
    flows: tuple[int, ...]
    total_cost: int
    potentials: tuple[int, ...]


class _Residual:
    """Paired forward/backward residual edges stored in flat lists."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cost: list[int] = []
        self.cap: list[int] = []
        self.out: list[list[int]] = [[] for _ in range(n)]

    def add(self, a: int, b: int, cost: int, cap: int) -> int:
        e = len(self.head)
        self.head += [b, a]
        self.cost += [cost, -cost]
        self.cap += [cap, 0]
        self.out[a].append(e)
        self.out[b].append(e + 1)
        return e


def solve_min_cost_flow(net: FlowNetwork) -> Flow:
    """Integer min-cost flow by successive shortest paths with potentials.

    Conservation: for every node, outflow - inflow == excess.  Negative-cost
    capacitated arcs are pre-saturated, one Bellman-Ford pass seeds the
    potentials, and Dijkstra on reduced costs drives the augmentations.
    """
    n = net.node_count
    excess = list(net.excess)
    for a, b, c, cap in net.arcs:
        if cap is not None and c < 0:
            excess[a] -= cap
            excess[b] += cap
    supply = sum(x for x in excess if x > 0)
    big = supply + sum(cap for _, _, c, cap in net.arcs if cap is not None and c < 0) + 1

    res = _Residual(n)
    arc_edge = []
    for a, b, c, cap in net.arcs:
        if cap is not None and c < 0:
            # saturated: only the reverse edge carries residual capacity
            e = res.add(a, b, c, 0)
            res.cap[e + 1] = cap
        else:
            e = res.add(a, b, c, big if cap is None else cap)
        arc_edge.append(e)

    # initial potentials: shortest distances from a virtual source over live edges
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    edge_of: dict[tuple[int, int], int] = {}
    for e, b in enumerate(res.head):
        if res.cap[e] > 0:
            a = res.head[e ^ 1]
            adj[a].append((b, res.cost[e]))
            key = (a, b)
            if key not in edge_of or res.cost[e] < res.cost[edge_of[key]]:
                edge_of[key] = e
    for row in adj:
        row.sort()
    dist, cycle = _bellman_ford(n, adj, range(n))
    if cycle is not None:
        for a, b in zip(cycle, cycle[1:]):
            e = edge_of[(a, b)]
            if e % 2 or net.arcs[arc_edge.index(e)][3] is not None:
                raise ValueError("negative-cost cycle through capacitated arcs is not supported")
        raise UnboundedFlow(cycle)
    pot = list(dist)

    head, cost, cap, out = res.head, res.cost, res.cap, res.out
    while True:
        sources = [v for v in range(n) if excess[v] > 0]
        if not sources:
            break
        d: list[int | None] = [None] * n
        via = [-1] * n
        heap = []
        for s in sources:
            d[s] = -pot[s]
            heap.append((-pot[s], s))
        heapq.heapify(heap)
        done = [False] * n
        while heap:
            dv, v = heapq.heappop(heap)
            if done[v]:
                continue
            done[v] = True
            pv = pot[v]
            for e in out[v]:
                if cap[e] <= 0:
                    continue
                u = head[e]
                nd = dv + cost[e] + pv - pot[u]
                du = d[u]
                if du is None or nd < du:
                    d[u] = nd
                    via[u] = e
                    heapq.heappush(heap, (nd, u))
        best = None
        for t in range(n):
            if excess[t] < 0 and d[t] is not None:
                key = d[t] + pot[t]
                if best is None or key < best[0]:
                    best = (key, t)
        if best is None:
            raise InfeasibleFlow(f"{sum(x for x in excess if x > 0)} units of supply cannot reach any demand")
        t = best[1]
        path = []
        v = t
        while via[v] != -1:
            e = via[v]
            path.append(e)
            v = head[e ^ 1]
        s = v
        amount = min(excess[s], -excess[t], min((cap[e] for e in path), default=excess[s]))
        for e in path:
            cap[e] -= amount
            cap[e ^ 1] += amount
        excess[s] -= amount
        excess[t] += amount
        top = max(x for x in d if x is not None)
        for v in range(n):
            pot[v] += d[v] if d[v] is not None else top
    if any(excess):
        raise InfeasibleFlow("demand left unmet")

    # the reverse edge's residual capacity is the flow, saturated arcs included
    flows = [cap[e + 1] for e in arc_edge]
    total = sum(f * arc[2] for f, arc in zip(flows, net.arcs))
    return Flow(tuple(flows), total, tuple(pot))


def flow_potentials(net: FlowNetwork, flow: Flow) -> list[int]:
    """Node potentials certifying optimality of ``flow``.

    Shortest distances in the residual graph from a virtual source joined to
    every node; reduced costs ``cost + p[tail] - p[head]`` are then
    non-negative on every residual arc.
    """
    n = net.node_count
    cons = []
    for (a, b, c, cap), f in zip(net.arcs, flow.flows):
        if cap is None or f < cap:
            cons.append((b, a, c))
        if f > 0:
            cons.append((a, b, -c))
    adj = _adjacency(n, cons)
    dist, cycle = _bellman_ford(n, adj, range(n))
    if cycle is not None:
        raise ValueError("flow is not optimal: residual graph has a negative cycle")
    return dist


# -------------------------------------------------------- linear objectives

def dual_network(system: DiffSystem, coeffs: Sequence[int]) -> FlowNetwork:
    """Min-cost flow dual of ``min coeffs . values`` over ``system``."""
    if len(coeffs) != system.node_count:
        raise ValueError("coefficient length does not match node_count")
    if coeffs[system.root] != 0:
        raise ValueError("the root coefficient must be 0")
    excess = list(coeffs)
    excess[system.root] = -sum(coeffs)
    arcs = tuple((v, u, b, UNBOUNDED) for u, v, b in system.constraints)
    return FlowNetwork(system.node_count, arcs, tuple(excess))


def solve_difference_lp(system: DiffSystem, coeffs: Sequence[int],
                        extreme: str = "max") -> tuple[list[int], int]:
    """Integer valuation minimizing ``sum(coeffs[i] * values[i])``.

    Among the optimal valuations the componentwise-maximal one is returned
    (``extreme="max"``, shortest paths from the root in the residual graph),
    or the componentwise-minimal one (``extreme="min"``) for systems that are
    only bounded below.

    Raises :class:`Infeasible` on a negative cycle and :class:`Unbounded` if
    the objective has no finite minimum.
    """
    if extreme not in ("max", "min"):
        raise ValueError("extreme must be 'max' or 'min'")
    cycle = find_negative_cycle(system)
    if cycle is not None:
        raise Infeasible(cycle, _cycle_weight(system, cycle))
    net = dual_network(system, coeffs)
    try:
        flow = solve_min_cost_flow(net)
    except InfeasibleFlow as exc:
        raise Unbounded(str(exc)) from None
    tight = [(v, u, -b) for (u, v, b), f in zip(system.constraints, flow.flows) if f > 0]
    optimal_face = DiffSystem.build(system.node_count, system.root,
                                    list(system.constraints) + tight, system.labels)
    values = solve_max(optimal_face) if extreme == "max" else solve_min(optimal_face)
    value = objective_value(coeffs, values)
    if value != -flow.total_cost:
        raise RuntimeError(f"duality gap: primal {value} vs dual {-flow.total_cost}")
    return values, value
