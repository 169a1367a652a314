import random

import pytest
from hypothesis import given, strategies as st

from untangling.errors import (
    DisconnectedMap,
    MalformedDrawing,
    NonInvolutiveTwin,
    NotASpanningForest,
)
from untangling.generators import random_small_host
from untangling.surface_map import (
    Drawing,
    build_map,
    check_spanning_forest,
    contract_edges,
    contract_spanning_tree,
    delete_edges,
    map_from_faces,
    remove_monogons_and_bigons,
    reverse_walk,
)


def small_hosts():
    return st.integers(0, 10_000).map(lambda s: random_small_host(random.Random(s), 4, 8))


def test_single_loop_is_sphere():
    m = build_map([[0, 1]])
    assert (m.n_vertices, m.n_edges, m.n_faces) == (1, 1, 2)
    assert m.genus == 0


def test_torus_from_one_face():
    m = map_from_faces([[0, 2, 1, 3]])
    assert (m.n_vertices, m.n_edges, m.n_faces, m.genus) == (1, 2, 1, 1)


def test_face_successor_keeps_face_on_left():
    m = map_from_faces([[0, 2, 1, 3]])
    cyc = m.faces[0]
    for i, d in enumerate(cyc):
        assert m.face_next(d) == cyc[(i + 1) % len(cyc)]
        assert m.head(d) == m.source(m.face_next(d))


def test_boundary_marks_change_euler_count():
    m = build_map([[0, 1]], boundary=[0])
    assert m.boundary_count == 1
    assert m.euler_characteristic == m.euler_characteristic_closed - 1


def test_rejects_disconnected_and_bad_twins():
    with pytest.raises(DisconnectedMap):
        build_map([[0, 1], [2, 3]])
    with pytest.raises(NonInvolutiveTwin):
        build_map([[0, 2]])
    with pytest.raises(NonInvolutiveTwin):
        build_map([[0, 1, 1]])


def test_explicit_twins_relabel():
    m = build_map([[10, 20, 11, 21]], twin_pairs=[(10, 11), (20, 21)])
    assert m.genus == 1
    assert set(m.relabel) == {10, 11, 20, 21}


@given(small_hosts())
def test_euler_and_orbits(m):
    assert sum(len(f) for f in m.faces) == m.n_darts
    assert sum(len(r) for r in m.rotations) == m.n_darts
    assert m.n_vertices - m.n_edges + m.n_faces == 2 - 2 * m.genus
    for d in range(m.n_darts):
        assert m.sigma_inv[m.sigma[d]] == d
        assert m.vertex_of[m.sigma[d]] == m.vertex_of[d]


@given(small_hosts(), st.integers(0, 10_000))
def test_delete_edges_preserves_faces_on_the_left(m, seed):
    rng = random.Random(seed)
    loops = [e for e in range(m.n_edges) if m.face_of[2 * e] != m.face_of[2 * e + 1]]
    if not loops or m.n_edges < 2:
        return
    e = rng.choice(loops)
    new, dart_map = delete_edges(m, [e])
    assert new.n_edges == m.n_edges - 1
    assert new.n_faces == m.n_faces - 1
    assert new.genus == m.genus
    assert set(dart_map) == {d for d in range(m.n_darts) if d >> 1 != e}


def test_delete_keeps_boundary_mark_of_merged_faces():
    m = build_map([[0, 1, 2, 3]], boundary=[])
    f = m.face_of[0]
    m = build_map([[0, 1, 2, 3]], boundary=[f])
    new, _ = delete_edges(m, [0])
    assert new.boundary_count == 1


@given(small_hosts())
def test_contract_tree_keeps_genus(m):
    parent = {0: None}
    tree = []
    stack = [0]
    while stack:
        v = stack.pop()
        for d in m.rotations[v]:
            w = m.vertex_of[d ^ 1]
            if w not in parent:
                parent[w] = d
                tree.append(d >> 1)
                stack.append(w)
    if len(tree) == m.n_edges:
        return
    new, _ = contract_edges(m, tree)
    assert new.n_vertices == 1
    assert new.genus == m.genus
    assert new.n_faces == m.n_faces


def test_spanning_forest_checks():
    edges = [(0, 1), (1, 2), (2, 0)]
    assert check_spanning_forest(3, edges, [0, 1]) == [0, 1]
    with pytest.raises(NotASpanningForest):
        check_spanning_forest(3, edges, [0, 1, 2])
    with pytest.raises(NotASpanningForest):
        check_spanning_forest(3, edges, [0])


def test_drawing_validation():
    m = build_map([[0, 1]])
    Drawing(m, 1, [(0, 0)], [0], [[0]])
    with pytest.raises(MalformedDrawing):
        Drawing(m, 1, [(0, 0)], [3], [[0]])
    with pytest.raises(MalformedDrawing):
        Drawing(m, 1, [(0, 0)], [0], [[7]])


def test_contract_spanning_tree_of_drawing():
    # a triangle on the sphere; contracting two sides leaves the third as a loop
    m = build_map([[0, 4], [1, 2], [3, 5]])
    d = Drawing(m, 2, [(0, 1)], [0, 2], [[0, 2]])
    out = contract_spanning_tree(d, [0, 1])
    assert out.host.n_vertices == 1
    assert out.edge_image == [[]]


def test_monogons_and_bigons_removed_with_homotopic_reroute():
    # two parallel edges between two vertices on the sphere form bigons
    m = build_map([[0, 2, 4], [1, 5, 3]])
    new, reroute = remove_monogons_and_bigons(m)
    assert all(len(f) > 2 for f in new.faces) or new.n_edges <= 1
    for d in range(m.n_darts):
        w = reroute[d]
        assert all(0 <= x < new.n_darts for x in w)


@given(st.lists(st.integers(0, 20), max_size=12))
def test_reverse_is_involution(walk):
    assert reverse_walk(reverse_walk(walk)) == walk
