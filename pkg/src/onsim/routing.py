"""Multi-hop routing inside an ON.

Two representatives: a reactive protocol that discovers routes on demand and
repairs them after a detected break, and a proactive one that rebuilds
next-hop tables at every topology interval. Control traffic is not simulated
packet by packet; discovery is charged as latency and counted as overhead.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Optional


class NoRoute(LookupError):
    pass


class Protocol(str, enum.Enum):
    REACTIVE = "reactive"
    PROACTIVE = "proactive"


# sweep labels accepted on the command line; the named protocols map onto the
# two implemented families
PROTOCOL_ALIASES = {
    "reactive": Protocol.REACTIVE,
    "aodv": Protocol.REACTIVE,
    "proactive": Protocol.PROACTIVE,
    "olsr": Protocol.PROACTIVE,
}


def parse_protocol(name: str) -> Protocol:
    try:
        return PROTOCOL_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown routing protocol {name!r}") from None


@dataclass
class RoutingTimers:
    hello_interval_s: float = 1.0
    topology_interval_s: float = 2.0
    discovery_rtt_s_per_hop: float = 0.030
    break_detect_s: float = 0.200
    per_hop_overhead_s: float = 0.0005

    def __post_init__(self):
        for name, v in vars(self).items():
            if v <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Route:
    nodes: tuple
    established_at: float
    protocol: Protocol

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def src(self):
        return self.nodes[0]

    @property
    def dst(self):
        return self.nodes[-1]


Graph = dict  # node -> sorted list of neighbours


def build_graph(nodes: Iterable[str], feasible: Callable[[str, str], bool]) -> Graph:
    nodes = sorted(nodes)
    g = {n: [] for n in nodes}
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if feasible(a, b):
                g[a].append(b)
                g[b].append(a)
    for n in g:
        g[n].sort()
    return g


def bfs_distances(g: Graph, root) -> dict:
    dist = {root: 0}
    q = deque([root])
    while q:
        u = q.popleft()
        for v in g.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def shortest_path(g: Graph, src, dst) -> tuple:
    """Minimum-hop path; among equal-hop paths the lexicographically smallest
    node-id sequence."""
    if src not in g or dst not in g:
        raise NoRoute(f"{src} -> {dst}")
    dist = bfs_distances(g, dst)
    if src not in dist:
        raise NoRoute(f"{src} -> {dst}")
    path = [src]
    u = src
    while u != dst:
        u = min(v for v in g[u] if dist.get(v) == dist[u] - 1)
        path.append(u)
    return tuple(path)


def next_hop_table(g: Graph, node) -> dict:
    """dst -> next hop for every destination reachable from ``node``."""
    table = {}
    for dst in g:
        if dst == node:
            continue
        try:
            p = shortest_path(g, node, dst)
        except NoRoute:
            continue
        table[dst] = p[1]
    return table


class ReactiveRouter:
    """On-demand discovery with a per-(src, dst) route cache."""

    protocol = Protocol.REACTIVE

    def __init__(self, timers: RoutingTimers):
        self.timers = timers
        self.cache: dict = {}
        self.discoveries = 0
        self.overhead_msgs = 0

    def discover_route(self, g: Graph, src, dst, t: float) -> tuple[Route, float]:
        """Returns the route and the discovery latency charged before data flows."""
        if src == dst:
            raise ValueError("source and destination coincide")
        self.discoveries += 1
        # request flood reaches every node in the component, reply walks back
        self.overhead_msgs += len(bfs_distances(g, src)) if src in g else 1
        path = shortest_path(g, src, dst)
        self.overhead_msgs += len(path) - 1
        route = Route(path, t, Protocol.REACTIVE)
        return route, route.hops * self.timers.discovery_rtt_s_per_hop

    def cached(self, src, dst) -> Optional[tuple[Route, float]]:
        return self.cache.get((src, dst))

    def install(self, route: Route, ready_at: float) -> None:
        self.cache[(route.src, route.dst)] = (route, ready_at)

    def invalidate(self, src=None, dst=None, node=None) -> None:
        for key in list(self.cache):
            route = self.cache[key][0]
            if (src is None or key[0] == src) and (dst is None or key[1] == dst) \
                    and (node is None or node in route.nodes):
                del self.cache[key]


class ProactiveRouter:
    """Periodic table recomputation; routes may be stale by up to one topology
    interval."""

    protocol = Protocol.PROACTIVE

    def __init__(self, timers: RoutingTimers):
        self.timers = timers
        self.tables: dict = {}
        self.last_tick: Optional[float] = None
        self.overhead_msgs = 0

    def proactive_tick(self, g: Graph, t: float, replace: bool = True) -> dict:
        if replace:
            self.tables = {}
        for n in g:
            self.tables[n] = next_hop_table(g, n)
        # one topology-control message per node per interval
        self.overhead_msgs += len(g)
        self.last_tick = t
        return self.tables

    def next_hop(self, node, dst):
        return self.tables.get(node, {}).get(dst)

    def route(self, src, dst, t: float, limit: int = 64) -> Route:
        """Follows the tables from src; NoRoute if they do not lead to dst."""
        path = [src]
        u = src
        while u != dst:
            u = self.next_hop(u, dst)
            if u is None or u in path or len(path) > limit:
                raise NoRoute(f"{src} -> {dst}")
            path.append(u)
        return Route(tuple(path), t, Protocol.PROACTIVE)


def make_router(protocol: Protocol, timers: RoutingTimers):
    return ReactiveRouter(timers) if protocol is Protocol.REACTIVE else ProactiveRouter(timers)
