"""Geodesic graph, shortest paths, metric axioms, and the metric-weighted
length integral."""
import numpy as np
import pytest

from harmonic_gasket import derham, geodesic, geometry
from harmonic_gasket.errors import InvalidPairError


def test_boundary_arc_is_permutation_image():
    n, depth = 3, 8
    base = derham.gamma_polyline(n, depth)
    assert np.array_equal(geodesic.arc_gamma_jk(n, 1, 2, depth), base)
    # all arcs have the boundary arc's length (orthogonal images)
    ref = derham.polyline_length(base)
    for j, k in [(1, 3), (2, 3), (3, 1)]:
        arc = geodesic.arc_gamma_jk(n, j, k, depth)
        assert derham.polyline_length(arc) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(InvalidPairError):
        geodesic.arc_gamma_jk(n, 2, 2, depth)


def test_cell_arc_endpoints():
    n, depth = 3, 6
    word = (2, 1)
    arc = geodesic.cell_arc(n, word, 1, 3, depth)
    s_w = geometry.compose_word(n, word, "S")
    start = geometry.to_float_point(s_w(geometry.vertex(n, 3)))
    end = geometry.to_float_point(s_w(geometry.vertex(n, 1)))
    assert np.allclose(arc[0], start, atol=1e-15)
    assert np.allclose(arc[-1], end, atol=1e-15)


def test_graph_shape_and_weights():
    n, m = 3, 1
    graph = geodesic.build_geodesic_graph(n, m, 8)
    assert len(graph.vertices) == n * (n ** m + 1) // 2
    assert len(graph.edges) == n ** m * n * (n - 1) // 2
    for e in graph.edges:
        chord = np.linalg.norm(graph.coords[e.u] - graph.coords[e.v])
        assert e.weight >= chord - 1e-12  # arc length dominates the chord


def test_distance_p1_p2_is_arc_length():
    n = 3
    graph = geodesic.build_geodesic_graph(n, 0, 12)
    src = graph.vertex_of((), 1)
    dst = graph.vertex_of((), 2)
    path = geodesic.shortest_path(graph, src, dst)
    assert path.length == pytest.approx(
        derham.polyline_length(derham.gamma_polyline(n, 12)), rel=1e-12)
    assert len(path.arcs) == 1


def test_level_distances_nonincreasing():
    n, depth = 3, 10
    dists = []
    for m in range(0, 4):
        graph = geodesic.build_geodesic_graph(n, m, depth - m)
        d = geodesic.shortest_path(
            graph, graph.vertex_of((), 1), graph.vertex_of((), 2)).length
        dists.append(d)
    assert all(b <= a + 1e-12 for a, b in zip(dists, dists[1:]))


def test_metric_axioms_on_level_two():
    n = 3
    graph = geodesic.build_geodesic_graph(n, 2, 8)
    dmat = geodesic.distance_matrix(graph)
    assert np.max(np.abs(dmat - dmat.T)) == 0.0
    nv = dmat.shape[0]
    for k in range(nv):
        assert np.all(dmat <= dmat[:, [k]] + dmat[[k], :] + 1e-12)
    chords = np.linalg.norm(graph.coords[:, None] - graph.coords[None], axis=-1)
    assert np.all(dmat >= chords - 1e-12)
    assert np.all(np.diag(dmat) == 0.0)


def test_shortest_path_deterministic_and_trivial():
    n = 3
    graph = geodesic.build_geodesic_graph(n, 1, 6)
    src, dst = 0, len(graph.vertices) - 1
    p1 = geodesic.shortest_path(graph, src, dst)
    p2 = geodesic.shortest_path(graph, src, dst)
    assert p1 == p2
    trivial = geodesic.shortest_path(graph, src, src)
    assert trivial.length == 0.0 and trivial.arcs == ()


def test_path_polyline_and_junctions():
    n = 3
    graph = geodesic.build_geodesic_graph(n, 1, 8)
    path = geodesic.shortest_path(
        graph, graph.vertex_of((), 3), graph.vertex_of((1,), 2))
    assert len(path.arcs) >= 2
    poly = geodesic.path_polyline(n, path, 8)
    assert np.allclose(poly[0], graph.coords[path.vertex_indices[0]], atol=1e-12)
    assert np.allclose(poly[-1], graph.coords[path.vertex_indices[-1]], atol=1e-12)
    angles = geodesic.junction_angles(n, path, 12)
    assert len(angles) == len(path.arcs) - 1


def test_gamma_junction_angle_vanishes_with_depth():
    a = geodesic.gamma_junction_angle(3, 10)
    b = geodesic.gamma_junction_angle(3, 14)
    assert b < a
    assert b < 1e-4


def test_metric_integral_matches_length():
    n, depth, panels = 3, 12, 1024
    metric_len = geodesic.gamma_metric_integral(n, depth, panels)
    poly_len = derham.polyline_length(derham.gamma_polyline(n, depth))
    assert metric_len == pytest.approx(poly_len, rel=1e-5)
    # identity-metric variant reduces exactly to the polyline length
    ident = geodesic.gamma_metric_integral(n, depth, panels, use_identity=True)
    assert ident == pytest.approx(poly_len, rel=1e-14)


def test_metric_integral_panel_validation():
    with pytest.raises(ValueError):
        geodesic.arc_metric_integral(3, (), 1, 2, 6, 3)
    with pytest.raises(ValueError):
        geodesic.arc_metric_integral(3, (), 1, 2, 6, 256)
