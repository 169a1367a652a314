import random

from hypothesis import given, strategies as st

from untangling.cover_oracle import CoverOracle, GroupModel, free_reduce, inverse
from untangling.generators import random_small_host, random_walk
from untangling.surface_map import build_map


@given(st.lists(st.integers(1, 5).flatmap(lambda g: st.sampled_from([g, -g])), max_size=20))
def test_free_reduce_idempotent_and_inverse(word):
    r = free_reduce(word)
    assert free_reduce(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))
    assert free_reduce(list(word) + inverse(word)) == []


def test_face_relators_are_trivial(tri2, torus):
    for m in (tri2.map, torus):
        group = GroupModel(m)
        for f in m.faces:
            assert group.is_identity(group.word_of(f))


def test_torus_is_abelian(torus):
    group = GroupModel(torus)
    commutator = [0, 2, 1, 3]
    assert group.is_identity(group.word_of(commutator))
    assert not group.is_identity(group.word_of([0]))
    assert not group.is_identity(group.word_of([0, 0, 2]))


def test_genus_two_generators_do_not_commute(tri2):
    a, b = tri2.canonical["a1"], tri2.canonical["a2"]
    group = GroupModel(tri2.map)
    assert not group.is_identity(group.word_of([a, b, a ^ 1, b ^ 1]))


@given(st.integers(0, 10**6))
def test_homotopy_of_detours_on_random_hosts(seed):
    rng = random.Random(seed)
    m = random_small_host(rng, 3, 6)
    oracle = CoverOracle(m)
    w = random_walk(m, 0, rng.randint(0, 8), rng)
    f = m.faces[rng.randrange(m.n_faces)]
    k = rng.randint(0, len(w))
    at = m.vertex_of[w[k]] if k < len(w) else (m.vertex_of[w[-1] ^ 1] if w else 0)
    if m.vertex_of[f[0]] != at:
        return
    assert oracle.homotopic(w, w[:k] + list(f) + w[k:], 0)
    assert oracle.homotopic(w, w[:k] + [f[0], f[0] ^ 1] + w[k:], 0)


def test_sphere_loops_all_contractible():
    m = build_map([[0, 1, 2, 3]])
    assert m.genus == 0
    oracle = CoverOracle(m)
    assert oracle.is_contractible_loop([0])
    assert oracle.is_contractible_loop([0, 2])
