import random

import pytest
from hypothesis import given, settings, strategies as st

from untangling.errors import NotSparse, UnsupportedSurface
from untangling.generators import planted_drawing, random_small_host
from untangling.schema import SCALE, PLDrawing
from untangling.surface_map import Drawing, build_map
from untangling.untangle import (
    check_sparse_reducing,
    torus_loop_verdict,
    torus_rotation,
    untangle,
    untangle_loop_graph_torus,
    untangle_plane,
)


def loops_at(host, v, *walks):
    return Drawing(host, 1, [(0, 0)] * len(walks), [v], [list(w) for w in walks])


def test_canonical_loops_on_genus_two(tri2):
    a, b = tri2.canonical["a1"], tri2.canonical["b1"]
    assert untangle(loops_at(tri2.map, 0, [a]), tri2)
    assert untangle(loops_at(tri2.map, 0, [a], [b]), tri2)
    verdict = untangle(loops_at(tri2.map, 0, [a, a]), tri2)
    assert not verdict and verdict.word == "no"


def test_trees_untangle(tri2):
    d = Drawing(tri2.map, 3, [(0, 1), (1, 2)], [0, 0, 0], [[], []])
    verdict = untangle(d, tri2)
    assert verdict and verdict.stats["loops"] == 0


def test_theta_graph_on_torus(torus):
    d = Drawing(torus, 2, [(0, 1), (0, 1), (0, 1)], [0, 0], [[0], [2], []])
    assert untangle(d)


def test_torus_loop_rule():
    assert torus_loop_verdict([[(1, 0), (0, 1), (1, 1)]])[0]
    assert torus_loop_verdict([[(1, 0), (0, 1), (1, -1)]])[0]
    assert not torus_loop_verdict([[(1, 0), (0, 1), (2, 1)]])[0]
    assert not torus_loop_verdict([[(2, 2)]])[0]
    assert torus_loop_verdict([[(1, 2)], [(-1, -2)], []])[0]
    assert not torus_loop_verdict([[(1, 2)], [(1, 0)]])[0]
    assert not torus_loop_verdict([[(1, 0), (0, 1)], [(1, 0)]])[0]


def test_torus_rotation_alternates_ends():
    rot = torus_rotation({0: (1, 0), 1: (0, 1), 2: (1, 1)})
    assert rot == [(0, 0), (2, 0), (1, 0), (0, 1), (2, 1), (1, 1)]


def test_untangle_loop_graph_torus(torus):
    verdict = untangle_loop_graph_torus(loops_at(torus, 0, [0], [2], [0, 2]))
    assert verdict and verdict.rotation[0][0] == (0, 0)
    assert not untangle_loop_graph_torus(loops_at(torus, 0, [0, 0, 2, 2]))


def test_sparsity_is_checked(tri2):
    a = tri2.canonical["a1"]
    with pytest.raises(NotSparse):
        check_sparse_reducing(loops_at(tri2.map, 0, [a], [a]), tri2)
    with pytest.raises(NotSparse):
        check_sparse_reducing(loops_at(tri2.map, 0, tri2.map.faces[0]), tri2)


def test_sphere_is_unsupported():
    m = build_map([[0, 1]])
    with pytest.raises(UnsupportedSurface):
        untangle(Drawing(m, 1, [(0, 0)], [0], [[0]]))


def _square(k=1, cx=0):
    s = SCALE
    ring = [(cx - s, -s), (cx + s, -s), (cx + s, s), (cx - s, s)]
    return ring * k + [ring[0]]


def test_plane_circle_and_double_circle():
    assert untangle_plane(PLDrawing([(0, 0)], [(-SCALE, -SCALE)], [(0, 0)], [_square()]))
    assert not untangle_plane(PLDrawing([(0, 0)], [(-SCALE, -SCALE)], [(0, 0)], [_square(2)]))
    assert untangle_plane(PLDrawing([(0, 0), (5 * SCALE, 0)], [(-SCALE, -SCALE)], [(0, 0)],
                                    [_square()]))


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.booleans())
def test_planted_genus_two(tri2, seed, answer):
    rng = random.Random(seed)
    d = planted_drawing(tri2.map, rng, rng.randint(1, 9), answer=answer)
    verdict = untangle(d, tri2)
    assert bool(verdict) == answer
    if not verdict:
        assert verdict.reason and verdict.stage


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.booleans())
def test_planted_on_random_hosts(seed, answer):
    rng = random.Random(seed)
    h0 = random_small_host(rng, 4, 7)
    b = rng.randint(0, h0.n_faces)
    h = build_map([list(r) for r in h0.rotations], boundary=rng.sample(range(h0.n_faces), b))
    if h.genus == 0 and b <= 1:
        return
    d = planted_drawing(h, rng, rng.randint(1, 6), answer=answer)
    assert bool(untangle(d)) == answer


def test_config_controls_cutoff(tri2):
    from untangling.config import UntangleConfig
    from untangling.generators import planted_many_classes

    d = planted_many_classes(tri2, 25)
    assert untangle(d, tri2).stage == "factorize"
    assert untangle(d, tri2, config=UntangleConfig(cutoff=False)).stage != "factorize"
    with pytest.raises(ValueError):
        UntangleConfig(budget=-1)
