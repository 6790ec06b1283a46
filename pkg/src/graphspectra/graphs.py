"""Immutable metric-graph data model, validation, and canonical builders.

A metric graph is a combinatorial graph whose edges carry positive lengths.
Edge t between vertices (u, v) owns two directed slots: slot 2t runs u -> v
and slot 2t+1 runs v -> u, so the slot order is (e_1, rev e_1, e_2, rev e_2,
...).  Loops are allowed and contribute both slots (and degree 2) at their
vertex.  All types are frozen and hashable on their defining fields; derived
slot tables are precomputed and excluded from comparison.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DanglingEndpoint,
    DisconnectedGraph,
    NonPositiveLength,
)


@dataclass(frozen=True)
class MetricGraph:
    """Connected metric graph with directed-slot indexing.

    Fields
        num_vertices: vertex ids are the dense integers 0..num_vertices-1.
        edges: tuple of (u, v, length) triples, length > 0.

    Derived (not part of equality/hash)
        total_length, degrees, and the per-slot tables slot_origin,
        slot_terminus, slot_edge, slot_reversal, slot_length.
    """

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...]
    total_length: float = field(init=False, compare=False, repr=False)
    degrees: np.ndarray = field(init=False, compare=False, repr=False)
    slot_origin: np.ndarray = field(init=False, compare=False, repr=False)
    slot_terminus: np.ndarray = field(init=False, compare=False, repr=False)
    slot_edge: np.ndarray = field(init=False, compare=False, repr=False)
    slot_reversal: np.ndarray = field(init=False, compare=False, repr=False)
    slot_length: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        edges = tuple((int(u), int(v), float(length)) for u, v, length in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "num_vertices", int(self.num_vertices))
        if not edges:
            raise ValueError("a metric graph needs at least one edge")
        if self.num_vertices < 1:
            raise ValueError("num_vertices must be positive")

        for u, v, length in edges:
            if not (0 <= u < self.num_vertices) or not (0 <= v < self.num_vertices):
                raise DanglingEndpoint(
                    f"edge ({u}, {v}) references a vertex outside 0..{self.num_vertices - 1}"
                )
            if not math.isfinite(length) or length <= 0.0:
                raise NonPositiveLength(f"edge ({u}, {v}) has invalid length {length}")

        m = len(edges)
        origin = np.empty(2 * m, dtype=np.intp)
        terminus = np.empty(2 * m, dtype=np.intp)
        slot_edge = np.repeat(np.arange(m, dtype=np.intp), 2)
        lengths = np.empty(2 * m)
        for t, (u, v, length) in enumerate(edges):
            origin[2 * t], terminus[2 * t] = u, v
            origin[2 * t + 1], terminus[2 * t + 1] = v, u
            lengths[2 * t] = lengths[2 * t + 1] = length
        reversal = np.arange(2 * m, dtype=np.intp)
        reversal[0::2] += 1
        reversal[1::2] -= 1

        degrees = np.bincount(origin, minlength=self.num_vertices)
        if np.any(degrees == 0):
            lonely = int(np.argmin(degrees))
            raise DisconnectedGraph(f"vertex {lonely} has no incident edge")

        # union-find connectivity over edge endpoints
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in edges:
            parent[find(u)] = find(v)
        roots = {find(x) for x in range(self.num_vertices)}
        if len(roots) > 1:
            raise DisconnectedGraph(
                f"graph has {len(roots)} components; expected a connected graph"
            )

        object.__setattr__(self, "total_length", float(lengths[0::2].sum()))
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "slot_origin", origin)
        object.__setattr__(self, "slot_terminus", terminus)
        object.__setattr__(self, "slot_edge", slot_edge)
        object.__setattr__(self, "slot_reversal", reversal)
        object.__setattr__(self, "slot_length", lengths)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_slots(self) -> int:
        return 2 * len(self.edges)

    @property
    def min_edge_length(self) -> float:
        return float(self.slot_length.min())

    @property
    def max_edge_length(self) -> float:
        return float(self.slot_length.max())

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def edge_length(self, t: int) -> float:
        return self.edges[t][2]

    def slots_out(self, v: int) -> np.ndarray:
        """Directed slots leaving vertex v (the adjacency list E_v)."""
        return np.flatnonzero(self.slot_origin == v)

    def slots_in(self, v: int) -> np.ndarray:
        """Directed slots ending at vertex v."""
        return np.flatnonzero(self.slot_terminus == v)


@dataclass(frozen=True)
class RobinSpec:
    """Robin vertex set and a single global coupling sigma >= 0.

    sigma = 0 reduces every condition to Neumann-Kirchhoff, whatever the
    vertex set.  Membership of a vertex in `vertices` marks the delta-type
    condition sum of outward derivatives = sigma * f(v) there.
    """

    vertices: frozenset[int]
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(int(v) for v in self.vertices))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError(f"coupling must be finite and >= 0, got {self.sigma}")

    @classmethod
    def neumann(cls) -> "RobinSpec":
        return cls(frozenset(), 0.0)

    def with_sigma(self, sigma: float) -> "RobinSpec":
        return RobinSpec(self.vertices, sigma)

    def sigma_at(self, v: int) -> float:
        return self.sigma if v in self.vertices else 0.0

    def vertex_sigmas(self, graph: MetricGraph) -> np.ndarray:
        """Per-vertex coupling array; validates the vertex set against the graph."""
        out = np.zeros(graph.num_vertices)
        for v in self.vertices:
            if not (0 <= v < graph.num_vertices):
                raise DanglingEndpoint(f"Robin vertex {v} is not a graph vertex")
            out[v] = self.sigma
        return out


@dataclass(frozen=True)
class StarDecomposition:
    """Partition of the graph into vertex stars by splitting each edge.

    splits[t] = (s_u, s_v) assigns the portion of edge t adjacent to each
    endpoint; the two parts sum to the edge length exactly.  star_length(v)
    is the total length |S_v| of the star at v, and harmonic_split(v) the
    harmonic mean-type quantity s_v = 1 / sum(1/s), zero when any incident
    split is zero.
    """

    graph: MetricGraph
    splits: tuple[tuple[float, float], ...]
    slot_split: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        splits = tuple((float(a), float(b)) for a, b in self.splits)
        object.__setattr__(self, "splits", splits)
        g = self.graph
        if len(splits) != g.num_edges:
            raise ValueError("one split per edge required")
        slot_split = np.empty(g.num_slots)
        for t, (s_u, s_v) in enumerate(splits):
            length = g.edge_length(t)
            if s_u < 0.0 or s_v < 0.0:
                raise ValueError(f"negative split on edge {t}")
            if abs((s_u + s_v) - length) > 4.0 * np.finfo(float).eps * length:
                raise ValueError(
                    f"splits {s_u} + {s_v} do not sum to edge length {length}"
                )
            slot_split[2 * t] = s_u
            slot_split[2 * t + 1] = s_v
        object.__setattr__(self, "slot_split", slot_split)

    def star_length(self, v: int) -> float:
        """|S_v|: total length assigned to the star at v."""
        return float(self.slot_split[self.graph.slots_out(v)].sum())

    def harmonic_split(self, v: int) -> float:
        """s_v = (sum over incident splits of 1/s)^(-1), or 0 if any split is 0."""
        parts = self.slot_split[self.graph.slots_out(v)]
        if np.any(parts == 0.0):
            return 0.0
        return float(1.0 / np.sum(1.0 / parts))


def build_graph(edges, num_vertices=None) -> MetricGraph:
    """Validated MetricGraph from raw (u, v, length) triples.

    num_vertices defaults to 1 + the largest referenced vertex id.
    """
    edges = tuple((int(u), int(v), float(length)) for u, v, length in edges)
    if not edges:
        raise ValueError("a metric graph needs at least one edge")
    if num_vertices is None:
        num_vertices = 1 + max(max(u, v) for u, v, _ in edges)
    return MetricGraph(num_vertices, edges)


def make_star(d: int, lengths) -> MetricGraph:
    """Star with d edges, central vertex 0, leaves 1..d."""
    if d < 1:
        raise ValueError("a star needs at least one edge")
    lengths = tuple(float(x) for x in lengths)
    if len(lengths) != d:
        raise ValueError(f"expected {d} lengths, got {len(lengths)}")
    return build_graph([(0, i + 1, lengths[i]) for i in range(d)], num_vertices=d + 1)


_COMPLETE4_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def make_complete4(lengths) -> MetricGraph:
    """Complete graph on 4 vertices; lengths follow the fixed edge order
    (0,1), (0,2), (0,3), (1,2), (1,3), (2,3)."""
    lengths = tuple(float(x) for x in lengths)
    if len(lengths) != 6:
        raise ValueError(f"expected 6 lengths, got {len(lengths)}")
    return build_graph(
        [(u, v, lengths[i]) for i, (u, v) in enumerate(_COMPLETE4_EDGES)],
        num_vertices=4,
    )


def _first_primes(n: int) -> list[int]:
    primes = []
    candidate = 2
    while len(primes) < n:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


def incommensurate_lengths(count: int, scale: float = 1.0) -> tuple[float, ...]:
    """Lengths scale*sqrt(p_i)/sqrt(p_1) over the first `count` primes p_i.

    Square roots of distinct primes are linearly independent over the
    rationals, so these lengths admit no rational dependence; the first
    length is exactly `scale`.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not (scale > 0.0) or not math.isfinite(scale):
        raise ValueError("scale must be positive and finite")
    primes = _first_primes(count)
    root0 = math.sqrt(primes[0])
    return tuple(scale * math.sqrt(p) / root0 for p in primes)


def midpoint_star_decomposition(graph: MetricGraph) -> StarDecomposition:
    """Split every edge at its midpoint."""
    return StarDecomposition(
        graph, tuple((0.5 * length, 0.5 * length) for _, _, length in graph.edges)
    )


def boundary_star_decomposition(graph: MetricGraph, robin: RobinSpec) -> StarDecomposition:
    """Assign each edge fully to its Robin endpoint where possible.

    An edge with exactly one endpoint in the Robin set contributes its whole
    length to that endpoint's star; edges with zero or two Robin endpoints
    (including loops at a Robin vertex) fall back to the midpoint split.
    On a star with a Robin center this yields |S_center| = total length.
    """
    robin_set = robin.vertices
    splits = []
    for u, v, length in graph.edges:
        u_in = u in robin_set
        v_in = v in robin_set
        if u_in and not v_in:
            splits.append((length, 0.0))
        elif v_in and not u_in:
            splits.append((0.0, length))
        else:
            splits.append((0.5 * length, 0.5 * length))
    return StarDecomposition(graph, tuple(splits))


def parse_graph(mapping) -> tuple[MetricGraph, RobinSpec]:
    """Build (graph, robin) from the JSON graph schema.

    Schema: {"vertices": N, "edges": [{"u": int, "v": int, "len": float}],
    "robin": {"vertices": [int, ...], "sigma": float}}.  The robin block is
    optional and defaults to no Robin vertices with sigma 0.
    """
    try:
        num_vertices = int(mapping["vertices"])
        raw_edges = mapping["edges"]
        edges = [(e["u"], e["v"], e["len"]) for e in raw_edges]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph description: {exc}") from exc
    graph = MetricGraph(num_vertices, tuple(edges))
    robin_block = mapping.get("robin")
    if robin_block is None:
        robin = RobinSpec.neumann()
    else:
        robin = RobinSpec(
            frozenset(robin_block.get("vertices", ())),
            float(robin_block.get("sigma", 0.0)),
        )
    robin.vertex_sigmas(graph)  # validates the vertex set
    return graph, robin


def load_graph_file(path) -> tuple[MetricGraph, RobinSpec]:
    """Read a graph JSON file and return (graph, robin)."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_graph(json.load(handle))
