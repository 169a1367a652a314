import random

import pytest
from hypothesis import given, settings, strategies as st

from untangling.cover_oracle import CoverOracle, GroupModel
from untangling.errors import HostNotReducing, HostNotTorusSchema
from untangling.factorize import (
    NotUntangleable,
    factorize,
    factorize_boundary,
    factorize_torus,
)
from untangling.generators import planted_many_classes, random_drawing
from untangling.surface_map import Drawing, build_map
from untangling.untangle import check_sparse_reducing, check_sparse_torus


def _check_projection(drawing, fact, oracle):
    for i, (u, _) in enumerate(drawing.edges):
        start = drawing.vertex_image[u]
        assert oracle.homotopic(drawing.edge_image[i], fact.composed_image(drawing, i), start)


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_reducing_factorization_is_sparse_and_homotopic(tri2, seed):
    rng = random.Random(seed)
    n = rng.randint(1, 30)
    d = random_drawing(tri2.map, n, rng.randint(0, 6), 6, rng)
    fact = factorize(d, tri2, cutoff=False)
    check_sparse_reducing(fact.loop_drawing(), tri2)
    _check_projection(d, fact, CoverOracle(tri2.map))
    size = d.n_vertices + sum(len(w) + 1 for w in d.edge_image)
    assert fact.size <= 12 * 2 * size


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_brute_force_agrees_with_tree_store(tri2, seed):
    rng = random.Random(seed)
    d = random_drawing(tri2.map, rng.randint(1, 12), rng.randint(0, 4), 5, rng)
    a = factorize(d, tri2, cutoff=False)
    b = factorize(d, tri2, brute_force=True)
    assert a.n_loops == b.n_loops
    assert [len(a.loops_of(c)) for c in set(a.loop_vertex)] == \
        [len(b.loops_of(c)) for c in set(b.loop_vertex)]


def test_cutoff_on_many_classes(tri2):
    assert isinstance(factorize(planted_many_classes(tri2, 25), tri2), NotUntangleable)
    assert factorize(planted_many_classes(tri2, 24), tri2).n_loops == 24


def test_inverse_classes_merge(tri2):
    a = tri2.canonical["a1"]
    v = tri2.map.vertex_of[a]
    d = Drawing(tri2.map, 1, [(0, 0), (0, 0)], [v], [[a], [a ^ 1]])
    fact = factorize(d, tri2)
    assert fact.n_loops == 1
    assert fact.gamma_edge[0][0] == fact.gamma_edge[1][0]
    assert fact.gamma_edge[0][1] == -fact.gamma_edge[1][1]


def test_contractible_loops_vanish(tri2):
    f = tri2.map.faces[0]
    v = tri2.map.vertex_of[f[0]]
    fact = factorize(Drawing(tri2.map, 1, [(0, 0)], [v], [list(f)]), tri2)
    assert fact.n_loops == 0 and fact.gamma_edge == [None]


def test_host_checks(tri2, torus):
    d = Drawing(torus, 1, [(0, 0)], [0], [[0]])
    with pytest.raises(HostNotReducing):
        factorize(d, tri2)
    with pytest.raises(HostNotTorusSchema):
        factorize_torus(Drawing(tri2.map, 1, [(0, 0)], [0], [[0]]))


@given(st.integers(0, 10**6))
def test_torus_factorization(torus, seed):
    rng = random.Random(seed)
    d = random_drawing(torus, rng.randint(1, 15), rng.randint(0, 5), 6, rng)
    fact = factorize_torus(d)
    check_sparse_torus(fact.loop_drawing())
    _check_projection(d, fact, CoverOracle(torus))


@given(st.integers(0, 10**6))
def test_boundary_factorization(seed):
    rng = random.Random(seed)
    # one vertex, two loops, three boundary faces: a pair of pants
    host = build_map([[0, 1, 2, 3]], boundary=[0, 1, 2])
    assert host.genus == 0 and host.n_faces == 3
    d = random_drawing(host, rng.randint(1, 10), rng.randint(0, 4), 6, rng)
    fact = factorize_boundary(d)
    group = GroupModel(host)
    words = [group.word_of(w) for w in fact.loop_walks]
    assert all(not group.is_identity(w) for w in words)
    _check_projection(d, fact, CoverOracle(host))
