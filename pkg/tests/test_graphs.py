"""Graph model, generators, and star decompositions."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphspectra.errors import (
    DanglingEndpoint,
    DisconnectedGraph,
    NonPositiveLength,
)
from graphspectra.graphs import (
    MetricGraph,
    RobinSpec,
    StarDecomposition,
    boundary_star_decomposition,
    build_graph,
    incommensurate_lengths,
    make_complete4,
    make_star,
    midpoint_star_decomposition,
    parse_graph,
)
from oracles import min_integer_relation


def test_single_edge_graph():
    g = build_graph([(0, 1, 1.0)])
    assert g.num_edges == 1
    assert g.total_length == 1.0
    assert g.degree(0) == g.degree(1) == 1
    assert list(g.slot_reversal) == [1, 0]
    assert g.slot_origin[0] == 0 and g.slot_terminus[0] == 1


def test_star_topology():
    g = make_star(4, (1.0, 1.0, 1.0, 1.0))
    assert g.degree(0) == 4
    assert all(g.degree(v) == 1 for v in range(1, 5))
    assert g.total_length == 4.0


def test_complete4_topology():
    g = make_complete4([1.0] * 6)
    assert g.total_length == 6.0
    assert all(g.degree(v) == 3 for v in range(4))


def test_loop_contributes_two_slots():
    g = build_graph([(0, 0, 2.0), (0, 1, 1.0)])
    assert g.degree(0) == 3  # loop twice plus the pendant edge
    assert g.slot_reversal[0] == 1 and g.slot_origin[1] == 0


def test_reversal_is_involution_without_fixed_points():
    g = make_complete4(incommensurate_lengths(6))
    rev = g.slot_reversal
    assert np.array_equal(rev[rev], np.arange(g.num_slots))
    assert np.all(rev != np.arange(g.num_slots))


def test_rejects_bad_lengths():
    with pytest.raises(NonPositiveLength):
        build_graph([(0, 1, 0.0)])
    with pytest.raises(NonPositiveLength):
        build_graph([(0, 1, -2.0)])
    with pytest.raises(NonPositiveLength):
        build_graph([(0, 1, math.inf)])


def test_rejects_disconnected():
    with pytest.raises(DisconnectedGraph):
        build_graph([(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedGraph):
        MetricGraph(3, ((0, 1, 1.0),))  # vertex 2 isolated


def test_rejects_dangling_endpoint():
    with pytest.raises(DanglingEndpoint):
        MetricGraph(2, ((0, 5, 1.0),))


def test_rejects_empty():
    with pytest.raises(ValueError):
        build_graph([])


def test_graph_hashable_and_equal_on_defining_fields():
    g1 = make_star(3, (1.0, 2.0, 3.0))
    g2 = make_star(3, (1.0, 2.0, 3.0))
    assert g1 == g2 and hash(g1) == hash(g2)
    assert {g1: "x"}[g2] == "x"


def test_robin_spec_validation():
    with pytest.raises(ValueError):
        RobinSpec(frozenset({0}), -1.0)
    g = build_graph([(0, 1, 1.0)])
    with pytest.raises(DanglingEndpoint):
        RobinSpec(frozenset({7}), 1.0).vertex_sigmas(g)
    sig = RobinSpec(frozenset({0}), 2.5).vertex_sigmas(g)
    assert sig[0] == 2.5 and sig[1] == 0.0
    assert RobinSpec.neumann().sigma == 0.0


def test_incommensurate_lengths_formula():
    vals = incommensurate_lengths(3)
    assert vals[0] == 1.0
    assert abs(vals[1] - math.sqrt(3.0 / 2.0)) < 1e-15
    assert abs(vals[2] - math.sqrt(5.0 / 2.0)) < 1e-15
    assert incommensurate_lengths(1, 2.5) == (2.5,)
    scaled = incommensurate_lengths(2, 3.0)
    assert abs(scaled[1] / scaled[0] - math.sqrt(1.5)) < 1e-15


def test_incommensurate_lengths_pass_rational_probe():
    vals = incommensurate_lengths(4)
    assert min_integer_relation(vals, bound=10) > 1e-12


def test_midpoint_decomposition():
    g = build_graph([(0, 1, 1.0)])
    d = midpoint_star_decomposition(g)
    assert d.splits == ((0.5, 0.5),)
    assert d.star_length(0) == d.star_length(1) == 0.5

    star = make_star(4, (1.0, 1.0, 1.0, 1.0))
    d = midpoint_star_decomposition(star)
    assert d.star_length(0) == 2.0
    assert d.star_length(1) == 0.5

    tetra = make_complete4([1.0] * 6)
    d = midpoint_star_decomposition(tetra)
    assert all(abs(d.star_length(v) - 1.5) < 1e-15 for v in range(4))


def test_boundary_decomposition_star_center():
    star = make_star(4, incommensurate_lengths(4))
    robin = RobinSpec(frozenset({0}), 2.0)
    d = boundary_star_decomposition(star, robin)
    assert abs(d.star_length(0) - star.total_length) < 1e-14
    assert d.star_length(1) == 0.0


def test_boundary_decomposition_interval_and_fallback():
    g = build_graph([(0, 1, 1.0)])
    d = boundary_star_decomposition(g, RobinSpec(frozenset({1}), 1.0))
    assert d.splits == ((0.0, 1.0),)

    tetra = make_complete4([1.0] * 6)
    d = boundary_star_decomposition(tetra, RobinSpec(frozenset(range(4)), 1.0))
    assert d.splits == midpoint_star_decomposition(tetra).splits


def test_harmonic_split():
    star = make_star(4, (1.0, 2.0, 4.0, 4.0))
    robin = RobinSpec(frozenset({0}), 1.0)
    d = boundary_star_decomposition(star, robin)
    # 1/(1/1 + 1/2 + 1/4 + 1/4) = 0.5
    assert abs(d.harmonic_split(0) - 0.5) < 1e-15
    assert d.harmonic_split(1) == 0.0  # a zero split collapses s_v


def test_decomposition_rejects_bad_splits():
    g = build_graph([(0, 1, 1.0)])
    with pytest.raises(ValueError):
        StarDecomposition(g, ((0.7, 0.7),))
    with pytest.raises(ValueError):
        StarDecomposition(g, ((-0.1, 1.1),))


def test_parse_graph_roundtrip():
    g, robin = parse_graph(
        {
            "vertices": 3,
            "edges": [
                {"u": 0, "v": 1, "len": 1.0},
                {"u": 1, "v": 2, "len": 2.0},
            ],
            "robin": {"vertices": [0], "sigma": 1.5},
        }
    )
    assert g.num_vertices == 3 and g.total_length == 3.0
    assert robin.vertices == frozenset({0}) and robin.sigma == 1.5

    g2, robin2 = parse_graph(
        {"vertices": 2, "edges": [{"u": 0, "v": 1, "len": 1.0}]}
    )
    assert robin2.sigma == 0.0 and not robin2.vertices

    with pytest.raises(ValueError):
        parse_graph({"edges": []})


# ---------------------------------------------------------------------------
# property suites

edge_lists = st.lists(
    st.tuples(
        st.integers(0, 5),
        st.integers(0, 5),
        st.floats(0.3, 2.5, allow_nan=False),
    ),
    min_size=1,
    max_size=8,
)


def _try_build(edges):
    try:
        return build_graph(edges)
    except (DisconnectedGraph, DanglingEndpoint, NonPositiveLength):
        return None


@given(edge_lists)
@settings(max_examples=60, deadline=None)
def test_star_lengths_partition_total_length(edges):
    g = _try_build(edges)
    if g is None:
        return
    for decomp in (
        midpoint_star_decomposition(g),
        boundary_star_decomposition(g, RobinSpec(frozenset({0}), 1.0)),
    ):
        total = sum(decomp.star_length(v) for v in range(g.num_vertices))
        assert abs(total - g.total_length) < 1e-12 * (1 + g.total_length)
        for t, (s_u, s_v) in enumerate(decomp.splits):
            assert s_u + s_v == pytest.approx(g.edge_length(t), abs=0, rel=1e-15)


@given(edge_lists)
@settings(max_examples=60, deadline=None)
def test_slot_tables_consistent(edges):
    g = _try_build(edges)
    if g is None:
        return
    rev = g.slot_reversal
    assert np.array_equal(g.slot_origin[rev], g.slot_terminus)
    assert np.array_equal(g.slot_length[rev], g.slot_length)
    assert int(g.degrees.sum()) == g.num_slots
