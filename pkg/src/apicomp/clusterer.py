"""Overlapping method clustering via weighted star subgraphs.

A star (center vertex plus its neighbors as satellites) is the clustering
unit. Clustering runs in two phases:

1. Cover the graph greedily with stars. Vertices are ranked once by
   relative quality, the average of relative density (share of satellites
   not yet covered, 1.0 before anything is covered) and relative
   compactness (share of satellites whose own stars score worse). Scanning
   in rank order, a vertex becomes a center when it is uncovered or still
   has an uncovered satellite.

2. Refine the cover. Centers are visited by decreasing degree; a center u
   found among the satellites of the current star is dissolved when it is
   redundant (it lies inside another chosen star and more than half of its
   satellites are already covered by the other stars), and its satellites
   are absorbed into the current star. Every surviving center emits one
   cluster: the center plus its satellites.

Clusters may overlap and always cover every vertex. Ties are broken by
higher degree and then by method name, so results are deterministic.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .graph_builder import ApiGraph
from .trace_model import MethodRef

RC_COMPARISONS = ("prose", "caption")


@dataclass(frozen=True)
class ClusterConfig:
    """rc_comparison picks how relative compactness counts satellites:
    "prose" (default) counts satellites with strictly worse star quality,
    "caption" counts satellites with strictly better star quality."""

    rc_comparison: str = "prose"

    def __post_init__(self) -> None:
        if self.rc_comparison not in RC_COMPARISONS:
            raise ValueError(f"rc_comparison must be one of {RC_COMPARISONS}")


@dataclass(frozen=True)
class WsGraph:
    """A weighted star subgraph: a center and its satellite vertices."""

    center: MethodRef
    satellites: frozenset[MethodRef]

    def __post_init__(self) -> None:
        if self.center in self.satellites:
            raise ValueError("a star's center cannot be its own satellite")

    @property
    def members(self) -> frozenset[MethodRef]:
        return self.satellites | {self.center}


@dataclass
class CoverState:
    """Chosen centers (in selection order) and the vertices they cover."""

    centers: list[MethodRef]
    covered: set[MethodRef]


@dataclass(frozen=True)
class Cluster:
    """One output cluster: a final star's center and full member set."""

    center: MethodRef
    members: frozenset[MethodRef]


def star(graph: ApiGraph, v: MethodRef) -> WsGraph:
    return WsGraph(v, frozenset(graph.neighbors(v)))


def ws_quality(ws: WsGraph, graph: ApiGraph) -> float:
    """Average edge weight over all vertex pairs of the star, missing
    edges counting as 0; a satellite-less star scores 0."""
    members = sorted(ws.members)
    if len(members) < 2:
        return 0.0
    pairs = list(itertools.combinations(members, 2))
    return sum(graph.edge_weight(a, b) for a, b in pairs) / len(pairs)


def relative_density(v: MethodRef, state: CoverState, graph: ApiGraph) -> float:
    """Share of v's satellites not covered yet; 0 for isolated vertices."""
    satellites = graph.neighbors(v)
    if not satellites:
        return 0.0
    uncovered = sum(1 for s in satellites if s not in state.covered)
    return uncovered / len(satellites)


def relative_compactness(v: MethodRef, graph: ApiGraph,
                         config: ClusterConfig | None = None) -> float:
    """Share of v's satellites whose own stars compare worse (or better,
    under the "caption" switch) than v's star; 0 for isolated vertices."""
    config = config or ClusterConfig()
    satellites = graph.neighbors(v)
    if not satellites:
        return 0.0
    own = ws_quality(star(graph, v), graph)
    if config.rc_comparison == "prose":
        count = sum(1 for s in satellites if ws_quality(star(graph, s), graph) < own)
    else:
        count = sum(1 for s in satellites if ws_quality(star(graph, s), graph) > own)
    return count / len(satellites)


def _star_qualities(graph: ApiGraph) -> dict[MethodRef, float]:
    return {v: ws_quality(star(graph, v), graph) for v in graph.vertices}


def initial_clusters(graph: ApiGraph,
                     config: ClusterConfig | None = None) -> CoverState:
    """Greedy star cover of the graph.

    The ranking is computed once up front, against the empty cover, so
    relative density contributes 1.0 for every non-isolated vertex and the
    order is effectively decided by relative compactness. Isolated vertices
    rank last and become their own centers.
    """
    config = config or ClusterConfig()
    qualities = _star_qualities(graph)
    prose = config.rc_comparison == "prose"
    rq: dict[MethodRef, float] = {}
    for v in graph.vertices:
        satellites = graph.neighbors(v)
        if not satellites:
            rq[v] = 0.0
            continue
        own = qualities[v]
        if prose:
            count = sum(1 for s in satellites if qualities[s] < own)
        else:
            count = sum(1 for s in satellites if qualities[s] > own)
        rq[v] = (1.0 + count / len(satellites)) / 2.0
    order = sorted(graph.vertices, key=lambda v: (-rq[v], -graph.degree(v), v))

    state = CoverState([], set())
    for v in order:
        satellites = graph.neighbors(v)
        if v not in state.covered or any(s not in state.covered for s in satellites):
            state.centers.append(v)
            state.covered.add(v)
            state.covered.update(satellites)
    return state


def refine_clusters(graph: ApiGraph, state: CoverState,
                    config: ClusterConfig | None = None) -> list[Cluster]:
    """Dissolve redundant stars and emit the final clusters.

    A chosen star is redundant when its center sits inside another chosen
    star and more than half of its satellites lie in the other stars.
    Satellite sets start as the cover-phase snapshots; absorbing a star
    only ever mutates the star currently being emitted. A dissolved center
    stays a member of the absorbing cluster, so the cover is preserved
    while the cluster count can only shrink.
    """
    satellites = {c: set(graph.neighbors(c)) for c in state.centers}
    order = sorted(state.centers, key=lambda v: (-graph.degree(v), v))
    alive = set(state.centers)
    visited: set[MethodRef] = set()
    clusters: list[Cluster] = []

    # How many alive stars ({center} + satellites) contain each vertex.
    # A vertex x inside star(u) is also inside some other star iff its
    # count is >= 2, which keeps the redundancy test O(|satellites|).
    containing = Counter()
    for center in state.centers:
        containing[center] += 1
        containing.update(satellites[center])

    def is_useless(u: MethodRef) -> bool:
        own = satellites[u]
        if not own:
            return False
        if containing[u] < 2:  # not a satellite of any other chosen star
            return False
        shared = sum(1 for s in own if containing[s] >= 2)
        return 2 * shared > len(own)

    for v in order:
        if v not in alive:
            continue
        for u in sorted(satellites[v]):
            if u not in alive or u in visited or u == v:
                continue
            if is_useless(u):
                containing.subtract(satellites[u])
                containing[u] -= 1
                absorbed = (satellites[u] | {u}) - {v} - satellites[v]
                satellites[v] |= absorbed
                containing.update(absorbed)
                alive.discard(u)
            else:
                visited.add(u)
        clusters.append(Cluster(v, frozenset(satellites[v] | {v})))
        visited.add(v)
    return clusters


def cluster(graph: ApiGraph, config: ClusterConfig | None = None) -> list[Cluster]:
    """Run both phases; an empty graph yields no clusters."""
    if len(graph) == 0:
        return []
    config = config or ClusterConfig()
    return refine_clusters(graph, initial_clusters(graph, config), config)


def render_clusters(clusters: list[Cluster]) -> str:
    """One cluster per line, center first then sorted satellites, lines
    sorted; the text format consumed by downstream tooling."""
    lines = []
    for c in clusters:
        rest = sorted(m.qualified for m in c.members if m != c.center)
        lines.append(",".join([c.center.qualified, *rest]))
    lines.sort()
    return "\n".join(lines) + ("\n" if lines else "")
