"""End-to-end capacity computation on bounded graphs.

Single-path capacity is the widest-path bottleneck between the end users;
flooding capacity is the undirected max flow, equal to the minimum cut. Both
are evaluated on either the lower or the upper edge annotation. Exhaustive
enumeration oracles for small graphs live here too; the fast algorithms are
gated against them in the tests.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import DomainError, SizeError
from .network import BoundedGraph, Cut, check_selector, min_neighbourhood_capacity

# Residual capacities at or below this are treated as saturated.
RESIDUAL_TOL = 1e-12

# Hard cap for the exhaustive bipartition scan (2^(n-2) cuts).
BRUTE_FORCE_MAX_NODES = 22


@dataclass(frozen=True)
class PathResult:
    """Widest-path outcome: bottleneck value and the node sequence used."""

    value: float
    path: tuple[str, ...]


@dataclass(frozen=True)
class FlowResult:
    """Max-flow outcome: value, a minimum cut, and a feasible flow.

    ``flows`` maps a directed node pair to the non-negative flow routed that
    way; each undirected edge appears at most once, oriented with its net flow.
    """

    value: float
    mincut: Cut
    flows: dict

    def check_feasible(self, bg: BoundedGraph, selector: str, tol: float = 1e-9) -> None:
        """Raise if the flow violates capacities or conservation."""
        net = {n: 0.0 for n in bg.nodes}
        caps = {}
        for e in bg.edges:
            caps[e.key()] = e.value(selector)
        for (u, v), f in self.flows.items():
            if f < -tol:
                raise DomainError(f"negative flow on {u}->{v}")
            key = (u, v) if u <= v else (v, u)
            if f > caps[key] + tol:
                raise DomainError(f"flow {f} exceeds capacity {caps[key]} on {u}-{v}")
            net[u] -= f
            net[v] += f
        alpha, beta = bg.users
        for n in bg.nodes:
            if n in (alpha, beta):
                continue
            if abs(net[n]) > tol:
                raise DomainError(f"flow not conserved at {n}: {net[n]}")
        if abs(net[beta] - self.value) > tol or abs(net[alpha] + self.value) > tol:
            raise DomainError("flow into users does not match the reported value")


def _adjacency(bg: BoundedGraph, selector: str):
    adj: dict[str, list[tuple[str, float]]] = {n: [] for n in bg.nodes}
    for e in bg.edges:
        value = e.value(selector)
        adj[e.a].append((e.b, value))
        adj[e.b].append((e.a, value))
    return adj


def widest_path(bg: BoundedGraph, selector: str) -> PathResult:
    """Maximize the bottleneck edge value over all end-to-end paths.

    Greedy best-first relaxation (max-min analogue of shortest path); ties in
    width resolve toward lexicographically smaller node ids. Disconnected
    users give value 0 and an empty path.
    """
    check_selector(selector)
    alpha, beta = bg.users
    if alpha not in bg.nodes or beta not in bg.nodes:
        raise DomainError(f"end users {bg.users} must be graph nodes")
    adj = _adjacency(bg, selector)
    width = {alpha: math.inf}
    pred: dict[str, str] = {}
    done = set()
    heap: list[tuple[float, str]] = [(-math.inf, alpha)]
    while heap:
        neg_w, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == beta:
            break
        for v, value in adj[u]:
            if v in done:
                continue
            w = min(width[u], value)
            if w > width.get(v, -1.0):
                width[v] = w
                pred[v] = u
                heapq.heappush(heap, (-w, v))
    if beta not in done:
        return PathResult(0.0, ())
    path = [beta]
    while path[-1] != alpha:
        path.append(pred[path[-1]])
    path.reverse()
    bottleneck = width[beta]
    if bottleneck == math.inf:
        # Single-node path cannot happen (alpha != beta), so a finite graph
        # only reaches here when every edge on the path is infinite.
        return PathResult(math.inf, tuple(path))
    return PathResult(bottleneck, tuple(path))


class _Dinic:
    """Level-graph blocking-flow max flow over paired opposing arcs."""

    def __init__(self):
        self.index: dict[str, int] = {}
        self.adj: list[list[int]] = []
        self.to: list[int] = []
        self.cap: list[float] = []

    def node(self, name: str) -> int:
        if name not in self.index:
            self.index[name] = len(self.adj)
            self.adj.append([])
        return self.index[name]

    def add_undirected(self, a: str, b: str, capacity: float) -> int:
        """Both directions share the capacity; returns the arc id for a->b."""
        u, v = self.node(a), self.node(b)
        arc = len(self.to)
        self.to.extend((v, u))
        self.cap.extend((capacity, capacity))
        self.adj[u].append(arc)
        self.adj[v].append(arc + 1)
        return arc

    def _bfs(self, s: int, t: int) -> list[int] | None:
        level = [-1] * len(self.adj)
        level[s] = 0
        queue = [s]
        for u in queue:
            for arc in self.adj[u]:
                v = self.to[arc]
                if level[v] < 0 and self.cap[arc] > RESIDUAL_TOL:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u: int, t: int, pushed: float, level, it) -> float:
        if u == t:
            return pushed
        while it[u] < len(self.adj[u]):
            arc = self.adj[u][it[u]]
            v = self.to[arc]
            if self.cap[arc] > RESIDUAL_TOL and level[v] == level[u] + 1:
                got = self._dfs(v, t, min(pushed, self.cap[arc]), level, it)
                if got > 0.0:
                    self.cap[arc] -= got
                    self.cap[arc ^ 1] += got
                    return got
            it[u] += 1
        return 0.0

    def run(self, s: int, t: int) -> float:
        total = 0.0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * len(self.adj)
            while True:
                pushed = self._dfs(s, t, math.inf, level, it)
                if pushed <= 0.0:
                    break
                total += pushed

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = [s]
        for u in queue:
            for arc in self.adj[u]:
                v = self.to[arc]
                if v not in seen and self.cap[arc] > RESIDUAL_TOL:
                    seen.add(v)
                    queue.append(v)
        return seen


def max_flow(bg: BoundedGraph, selector: str) -> FlowResult:
    """Undirected max flow between the end users, with its minimum cut.

    The reported cut is the set reachable from the first user in the final
    residual graph (deterministic). Edge values must be finite.
    """
    check_selector(selector)
    alpha, beta = bg.users
    solver = _Dinic()
    s = solver.node(alpha)
    t = solver.node(beta)
    for n in bg.nodes:
        solver.node(n)
    arcs = []
    for e in bg.edges:
        value = e.value(selector)
        if not math.isfinite(value):
            raise DomainError(f"edge {e.a}-{e.b} has non-finite value {value}")
        arcs.append(solver.add_undirected(e.a, e.b, value))
    value = solver.run(s, t)
    reach = solver.reachable(s)
    names = {idx: name for name, idx in solver.index.items()}
    a_side = frozenset(names[i] for i in reach)
    b_side = frozenset(bg.nodes) - a_side
    cut_edges = tuple(
        sorted(e.key() for e in bg.edges if (e.a in a_side) != (e.b in a_side))
    )
    flows = {}
    for e, arc in zip(bg.edges, arcs):
        net = e.value(selector) - solver.cap[arc]
        if abs(net) <= RESIDUAL_TOL:
            continue
        if net >= 0.0:
            flows[(e.a, e.b)] = net
        else:
            flows[(e.b, e.a)] = -net
    return FlowResult(value, Cut(a_side, b_side, cut_edges), flows)


def cut_value(bg: BoundedGraph, selector: str, a_side) -> float:
    """Sum of edge values crossing a bipartition."""
    check_selector(selector)
    a_side = frozenset(a_side)
    return sum(
        e.value(selector) for e in bg.edges if (e.a in a_side) != (e.b in a_side)
    )


def brute_force_min_cut(bg: BoundedGraph, selector: str) -> tuple[float, Cut]:
    """Exhaustively scan all 2^(n-2) user-separating bipartitions."""
    check_selector(selector)
    if len(bg.nodes) > BRUTE_FORCE_MAX_NODES:
        raise SizeError(f"{len(bg.nodes)} nodes exceeds the cap of {BRUTE_FORCE_MAX_NODES}")
    alpha, beta = bg.users
    others = sorted(n for n in bg.nodes if n not in (alpha, beta))
    best_value = math.inf
    best_side: frozenset | None = None
    for mask in range(2 ** len(others)):
        a_side = {alpha}
        for i, n in enumerate(others):
            if mask >> i & 1:
                a_side.add(n)
        value = cut_value(bg, selector, a_side)
        if value < best_value:
            best_value = value
            best_side = frozenset(a_side)
    cut_edges = tuple(
        sorted(e.key() for e in bg.edges if (e.a in best_side) != (e.b in best_side))
    )
    return best_value, Cut(best_side, frozenset(bg.nodes) - best_side, cut_edges)


def brute_force_widest_path(bg: BoundedGraph, selector: str) -> float:
    """Best bottleneck over every simple path, by exhaustive DFS."""
    check_selector(selector)
    if len(bg.nodes) > BRUTE_FORCE_MAX_NODES:
        raise SizeError(f"{len(bg.nodes)} nodes exceeds the cap of {BRUTE_FORCE_MAX_NODES}")
    alpha, beta = bg.users
    adj = _adjacency(bg, selector)
    best = 0.0
    on_path = {alpha}

    def go(u: str, width: float):
        nonlocal best
        if u == beta:
            best = max(best, width)
            return
        for v, value in adj[u]:
            if v not in on_path:
                on_path.add(v)
                go(v, min(width, value))
                on_path.remove(v)

    go(alpha, math.inf)
    return best


@dataclass(frozen=True)
class CapacityReport:
    """The six end-to-end numbers for one bounded graph."""

    single_path_lower: float
    single_path_upper: float
    flooding_lower: float
    flooding_upper: float
    min_neighbourhood_lower: float
    min_neighbourhood_upper: float

    def as_dict(self) -> dict:
        return {
            "single_path": {"lower": self.single_path_lower, "upper": self.single_path_upper},
            "flooding": {"lower": self.flooding_lower, "upper": self.flooding_upper},
            "min_neighbourhood": {
                "lower": self.min_neighbourhood_lower,
                "upper": self.min_neighbourhood_upper,
            },
        }


def capacity_report(bg: BoundedGraph) -> CapacityReport:
    return CapacityReport(
        single_path_lower=widest_path(bg, "lower").value,
        single_path_upper=widest_path(bg, "upper").value,
        flooding_lower=max_flow(bg, "lower").value,
        flooding_upper=max_flow(bg, "upper").value,
        min_neighbourhood_lower=min_neighbourhood_capacity(bg, "lower"),
        min_neighbourhood_upper=min_neighbourhood_capacity(bg, "upper"),
    )


def cut_to_json(cut: Cut) -> dict:
    return {
        "A": sorted(cut.a_side),
        "B": sorted(cut.b_side),
        "edges": [list(pair) for pair in cut.edges],
    }


def flow_result_to_json(result: FlowResult) -> dict:
    return {"value": result.value, "mincut": cut_to_json(result.mincut)}
