import random

from hypothesis import given, settings, strategies as st

from untangling.generators import random_weak_instance
from untangling.surface_map import Drawing, build_map
from untangling.weak_embed import (
    build_patch_system,
    check_certificate,
    exhaustive_weak_embed_oracle,
    is_weak_embedding,
)


def test_patch_system_of_genus_two(tri2):
    ps = build_patch_system(tri2.map)
    assert ps.n_disks == 1 and ps.n_strips == 9
    assert ps.euler_characteristic == -8
    assert all(ps.strip_of(d) == d >> 1 for d in range(tri2.map.n_darts))


def test_embedded_subgraph_is_weak_embedding(tri2):
    a, b = tri2.canonical["a1"], tri2.canonical["b1"]
    d = Drawing(tri2.map, 1, [(0, 0), (0, 0)], [0], [[a], [b]])
    res = is_weak_embedding(d)
    assert res and check_certificate(d, res.certificate)
    assert sorted(res.certificate.rotations[0]) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_crossing_strands_rejected():
    # two edges traverse opposite corners of a four-valent vertex and must cross
    host = build_map([[0, 2, 1, 3]])
    d = Drawing(host, 2, [(0, 0), (1, 1)], [0, 0], [[0], [2]])
    res = is_weak_embedding(d)
    assert res.ok == exhaustive_weak_embed_oracle(d)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_agrees_with_exhaustive_search(seed):
    d = random_weak_instance(random.Random(seed), max_strands=6, max_orderings=720)
    res = is_weak_embedding(d)
    assert res.ok == exhaustive_weak_embed_oracle(d)
    if res:
        assert check_certificate(d, res.certificate)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_simplification_does_not_change_the_answer(seed):
    d = random_weak_instance(random.Random(seed), max_strands=5, max_orderings=720)
    assert is_weak_embedding(d).ok == is_weak_embedding(d, simplify=False).ok
